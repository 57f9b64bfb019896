#include "hedgeemd/config.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hedgeemd {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, key + ": " + what);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad(key, "not a number: '" + value + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    const double v = parse_number<double>(key, value);
    if (!std::isfinite(v)) bad(key, "must be finite");
    return v;
}

int parse_int(const std::string& key, const std::string& value, int lo) {
    const int v = parse_number<int>(key, value);
    if (v < lo) bad(key, "must be >= " + std::to_string(lo));
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad(key, "expected true or false, got '" + value + "'");
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

} // namespace

bool RunConfig::has_method(Method m) const {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

bool RunConfig::needs_decomposition() const {
    return std::any_of(methods.begin(), methods.end(), is_emd_method);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "input", "out", "date_column", "spot_column", "futures_column",
        "partition", "k", "horizons", "horizon_cap", "methods", "alpha", "min_obs",
        "threads", "determinants", "decompose_scope", "envelope_tolerance", "max_sifts",
        "max_imfs", "mirror_count", "stride", "max_lag", "ecm_levels", "eecm_residual",
        "coint_levels", "seed", "synth_length", "synth_slope", "synth_intercept",
        "synth_phi", "synth_phi2", "synth_basis_sigma", "synth_futures_sigma",
        "synth_futures_drift", "synth_error_correction", "synth_initial_futures",
        "synth_tones"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    auto& conv = cfg.estimator.conventional;
    auto& sift = cfg.estimator.sift;
    auto& coint = cfg.synth_coint;

    if (key == "input") {
        cfg.inputs.clear();
        for (const auto& p : split_list(value)) cfg.inputs.emplace_back(p);
    } else if (key == "out") {
        if (value.empty()) bad(key, "empty path");
        cfg.out = value;
    } else if (key == "date_column") {
        cfg.schema.date_column = value;
    } else if (key == "spot_column") {
        cfg.schema.spot_column = value;
    } else if (key == "futures_column") {
        cfg.schema.futures_column = value;
    } else if (key == "partition") {
        try {
            cfg.partition = PartitionScheme::parse(value);
        } catch (const Error& e) {
            bad(key, e.what());
        }
    } else if (key == "k") {
        cfg.k = parse_int(key, value, 1);
    } else if (key == "horizons") {
        if (value == "auto") {
            cfg.horizons.reset();
        } else {
            std::vector<int> hs;
            for (const auto& item : split_list(value)) hs.push_back(parse_int(key, item, 1));
            if (hs.empty()) bad(key, "expected 'auto' or a list of positive integers");
            std::sort(hs.begin(), hs.end());
            hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
            cfg.horizons = std::move(hs);
        }
    } else if (key == "horizon_cap") {
        cfg.horizon_cap = parse_int(key, value, 1);
    } else if (key == "methods") {
        std::vector<Method> ms;
        if (value == "all") {
            ms.assign(std::begin(kAllMethods), std::end(kAllMethods));
        } else {
            for (const auto& item : split_list(value)) {
                Method m{};
                try {
                    m = parse_method(upper(item));
                } catch (const Error& e) {
                    bad(key, e.what());
                }
                if (std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
            }
        }
        if (ms.empty()) bad(key, "no methods given");
        // canonical order keeps outputs independent of how the list was typed
        std::sort(ms.begin(), ms.end());
        cfg.methods = std::move(ms);
    } else if (key == "alpha") {
        const double a = parse_real(key, value);
        if (!(a > 0.0 && a <= 0.5)) bad(key, "must lie in (0, 0.5]");
        cfg.alpha = a;
    } else if (key == "min_obs") {
        if (value == "auto") cfg.min_obs.reset();
        else cfg.min_obs = static_cast<std::size_t>(parse_int(key, value, 2));
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(parse_int(key, value, 1));
    } else if (key == "determinants") {
        if (value == "pooled") cfg.pool_determinants = true;
        else if (value == "per-input") cfg.pool_determinants = false;
        else bad(key, "expected 'pooled' or 'per-input'");
    } else if (key == "decompose_scope") {
        if (value == "full") cfg.estimator.scope = DecomposeScope::Full;
        else if (value == "per-segment") cfg.estimator.scope = DecomposeScope::PerSegment;
        else bad(key, "expected 'full' or 'per-segment'");
    } else if (key == "envelope_tolerance") {
        sift.envelope_tolerance = parse_real(key, value);
        if (!(sift.envelope_tolerance > 0.0)) bad(key, "must be positive");
    } else if (key == "max_sifts") {
        sift.max_sifts_per_imf = parse_int(key, value, 1);
    } else if (key == "max_imfs") {
        sift.max_imfs = parse_int(key, value, 1);
    } else if (key == "mirror_count") {
        sift.boundary_mirror_count = parse_int(key, value, 0);
    } else if (key == "stride") {
        conv.stride = parse_int(key, value, 1);
    } else if (key == "max_lag") {
        conv.max_lag = parse_int(key, value, 0);
    } else if (key == "ecm_levels") {
        conv.ecm_levels = parse_bool(key, value);
    } else if (key == "eecm_residual") {
        conv.eecm_residual = parse_bool(key, value);
    } else if (key == "coint_levels") {
        if (value == "log") conv.levels = CointLevels::Log;
        else if (value == "raw") conv.levels = CointLevels::Raw;
        else bad(key, "expected 'log' or 'raw'");
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "synth_length") {
        cfg.synth_length = static_cast<std::size_t>(parse_int(key, value, 100));
    } else if (key == "synth_slope") {
        coint.long_run_slope = parse_real(key, value);
    } else if (key == "synth_intercept") {
        coint.intercept = parse_real(key, value);
    } else if (key == "synth_phi") {
        coint.phi = parse_real(key, value);
    } else if (key == "synth_phi2") {
        coint.phi2 = parse_real(key, value);
    } else if (key == "synth_basis_sigma") {
        coint.basis_sigma = parse_real(key, value);
        if (coint.basis_sigma < 0.0) bad(key, "must be >= 0");
    } else if (key == "synth_futures_sigma") {
        coint.futures_sigma = parse_real(key, value);
        if (coint.futures_sigma < 0.0) bad(key, "must be >= 0");
    } else if (key == "synth_futures_drift") {
        coint.futures_drift = parse_real(key, value);
    } else if (key == "synth_error_correction") {
        coint.futures_error_correction = parse_real(key, value);
    } else if (key == "synth_initial_futures") {
        coint.initial_futures = parse_real(key, value);
        if (!(coint.initial_futures > 0.0)) bad(key, "must be positive");
    } else if (key == "synth_tones") {
        std::vector<Tone> tones;
        for (const auto& item : split_list(value)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) bad(key, "expected period:amplitude, got '" + item + "'");
            Tone t{parse_real(key, item.substr(0, colon)), parse_real(key, item.substr(colon + 1))};
            if (!(t.period >= 4.0)) bad(key, "tone period must be >= 4");
            tones.push_back(t);
        }
        cfg.synth_tones = std::move(tones);
    } else {
        bad(key, "unknown key");
    }
}

Settings parse_config_text(std::string_view text, const std::string& origin) {
    Settings out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const auto where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidArgument, where + ": expected 'key = value'");
        const auto key = trim(std::string_view(body).substr(0, eq));
        const auto value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::InvalidArgument, where + ": missing key");
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(ErrorCode::InvalidArgument, where + ": " + key + ": unknown key");
        if (out.count(key))
            throw Error(ErrorCode::InvalidArgument, where + ": " + key + ": set twice");
        out[key] = value;
    }
    return out;
}

Settings read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

void validate(const RunConfig& cfg) {
    if (cfg.partition.kind == PartitionScheme::Kind::EqualCount && cfg.k >= cfg.partition.groups)
        bad("k", "must be below the group count " + std::to_string(cfg.partition.groups));
    const auto& sift = cfg.estimator.sift;
    if (!(sift.envelope_tolerance > 0.0 && sift.envelope_tolerance < 1.0))
        bad("envelope_tolerance", "must lie in (0, 1)");
    if (sift.boundary_mirror_count < 1) bad("mirror_count", "must be at least 1");
    if (cfg.schema.date_column.empty() || cfg.schema.spot_column.empty() ||
        cfg.schema.futures_column.empty())
        bad("columns", "column names must not be empty");
    if (cfg.schema.spot_column == cfg.schema.futures_column)
        bad("spot_column", "spot and futures columns must differ");
    SynthSpec probe;
    probe.length = cfg.synth_length;
    probe.coint = cfg.synth_coint;
    probe.tones = cfg.synth_tones;
    try {
        probe.validate();
    } catch (const Error& e) {
        bad("synth", e.what());
    }
}

RunConfig parse_config(const Settings& flags, const std::optional<std::filesystem::path>& file) {
    RunConfig cfg;
    if (file)
        for (const auto& [k, v] : read_config_file(*file)) apply_setting(cfg, k, v);
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
    validate(cfg);
    return cfg;
}

Settings to_settings(const RunConfig& cfg) {
    Settings s;
    std::vector<std::string> inputs;
    for (const auto& p : cfg.inputs) inputs.push_back(p.string());
    s["input"] = join(inputs);
    s["out"] = cfg.out.string();
    s["date_column"] = cfg.schema.date_column;
    s["spot_column"] = cfg.schema.spot_column;
    s["futures_column"] = cfg.schema.futures_column;
    s["partition"] = cfg.partition.to_string();
    s["k"] = std::to_string(cfg.k);
    if (cfg.horizons) {
        std::vector<std::string> hs;
        for (int h : *cfg.horizons) hs.push_back(std::to_string(h));
        s["horizons"] = join(hs);
    } else {
        s["horizons"] = "auto";
    }
    s["horizon_cap"] = std::to_string(cfg.horizon_cap);
    std::vector<std::string> ms;
    for (auto m : cfg.methods) ms.emplace_back(to_string(m));
    s["methods"] = join(ms);
    s["alpha"] = format_double(cfg.alpha);
    s["min_obs"] = cfg.min_obs ? std::to_string(*cfg.min_obs) : "auto";
    s["threads"] = std::to_string(cfg.threads);
    s["determinants"] = cfg.pool_determinants ? "pooled" : "per-input";
    s["decompose_scope"] = std::string(to_string(cfg.estimator.scope));
    const auto& sift = cfg.estimator.sift;
    s["envelope_tolerance"] = format_double(sift.envelope_tolerance);
    s["max_sifts"] = std::to_string(sift.max_sifts_per_imf);
    s["max_imfs"] = std::to_string(sift.max_imfs);
    s["mirror_count"] = std::to_string(sift.boundary_mirror_count);
    const auto& conv = cfg.estimator.conventional;
    s["stride"] = std::to_string(conv.stride);
    s["max_lag"] = std::to_string(conv.max_lag);
    s["ecm_levels"] = conv.ecm_levels ? "true" : "false";
    s["eecm_residual"] = conv.eecm_residual ? "true" : "false";
    s["coint_levels"] = conv.levels == CointLevels::Log ? "log" : "raw";
    s["seed"] = std::to_string(cfg.seed);
    const auto& c = cfg.synth_coint;
    s["synth_length"] = std::to_string(cfg.synth_length);
    s["synth_slope"] = format_double(c.long_run_slope);
    s["synth_intercept"] = format_double(c.intercept);
    s["synth_phi"] = format_double(c.phi);
    s["synth_phi2"] = format_double(c.phi2);
    s["synth_basis_sigma"] = format_double(c.basis_sigma);
    s["synth_futures_sigma"] = format_double(c.futures_sigma);
    s["synth_futures_drift"] = format_double(c.futures_drift);
    s["synth_error_correction"] = format_double(c.futures_error_correction);
    s["synth_initial_futures"] = format_double(c.initial_futures);
    std::vector<std::string> tones;
    for (const auto& t : cfg.synth_tones)
        tones.push_back(format_double(t.period) + ":" + format_double(t.amplitude));
    s["synth_tones"] = join(tones);
    return s;
}

std::string format_config(const RunConfig& cfg) {
    const auto s = to_settings(cfg);
    std::string out;
    for (const auto& key : config_keys()) out += key + " = " + s.at(key) + "\n";
    return out;
}

} // namespace hedgeemd
