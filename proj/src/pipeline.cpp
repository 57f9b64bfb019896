#include "hedgeemd/pipeline.hpp"

#include "hedgeemd/analysis.hpp"
#include "hedgeemd/cpcv.hpp"
#include "hedgeemd/performance.hpp"
#include "hedgeemd/synth.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <tuple>

namespace hedgeemd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view to_string(Command command) {
    switch (command) {
    case Command::Synth: return "synth";
    case Command::Decompose: return "decompose";
    case Command::Hedge: return "hedge";
    case Command::Cv: return "cv";
    case Command::Analyze: return "analyze";
    case Command::Pipeline: return "pipeline";
    }
    return "?";
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::EmptyData: return "empty_data";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::SingularDesign: return "singular_design";
    case ErrorCode::DegenerateFutures: return "degenerate_futures";
    case ErrorCode::EmptyAggregate: return "empty_aggregate";
    case ErrorCode::UndefinedCycle: return "undefined_cycle";
    case ErrorCode::Misaligned: return "misaligned";
    case ErrorCode::AllGroupsExcluded: return "all_groups_excluded";
    }
    return "?";
}

namespace {

std::string num(double v) { return std::isfinite(v) ? format_double(v) : ""; }

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvFile {
public:
    explicit CsvFile(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(cells[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

const Criterion kCriteria[] = {Criterion::VarianceReduction, Criterion::VaR};

struct CvCell {
    std::optional<int> imf_index;
    int horizon = 0;
    std::vector<PathReport> reports;  // one per criterion
};

struct ContractState {
    Contract data;
    std::unique_ptr<HedgeEngine> engine;
    std::optional<ImfPairing> pairing;
    std::vector<HorizonRow> horizons;
    std::vector<MatchRow> matching;
    // (method, horizon row) -> reports; absent when CV could not run
    std::map<std::pair<Method, std::size_t>, CvCell> cv;

    double cv_mean(Method m, std::size_t row, Criterion c) const {
        const auto it = cv.find({m, row});
        if (it == cv.end()) return std::numeric_limits<double>::quiet_NaN();
        for (const auto& r : it->second.reports)
            if (r.criterion == c) return r.stats.mean;
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::optional<double> matching_of(const HorizonRow& row) const {
        if (!row.imf_index) return std::nullopt;
        for (const auto& m : matching)
            if (!m.is_residue && m.imf_index == *row.imf_index) return m.r_squared;
        return std::nullopt;
    }
};

class Runner {
public:
    Runner(Command command, const RunConfig& cfg) : command_(command), cfg_(cfg) {}

    RunResult run();

private:
    using Stage = std::pair<std::string, std::function<void()>>;

    bool emd_tables() const {
        return command_ == Command::Decompose || cfg_.needs_decomposition();
    }
    bool wants_decomposition() const {
        return cfg_.needs_decomposition() || !cfg_.horizons || command_ == Command::Decompose;
    }
    void skip(const std::string& artifact, const std::string& reason) {
        skipped_.push_back({{"artifact", artifact}, {"reason", reason}});
    }
    void warn(const std::string& contract, const std::string& what) {
        warnings_.push_back(contract.empty() ? what : contract + ": " + what);
    }
    void produced(const std::string& artifact, const std::string& file) {
        result_.artifacts.push_back(file);
        artifact_files_[artifact].push_back(file);
    }
    fs::path file(const std::string& name) const { return cfg_.out / name; }

    void stage_load();
    void stage_prepare();
    void stage_decomposition();
    void stage_cycles();
    void stage_variance();
    void stage_matching();
    void stage_in_sample();
    void stage_cv_compute();
    void stage_cv_write();
    void stage_determinants();
    void stage_relative();
    void write_manifest();

    Command command_;
    const RunConfig& cfg_;
    RunResult result_;
    std::vector<ContractState> contracts_;
    json skipped_ = json::array();
    json exclusions_ = json::array();
    std::vector<std::string> warnings_;
    std::map<std::string, std::vector<std::string>> artifact_files_;
};

void Runner::stage_load() {
    for (auto& c : load_inputs(cfg_)) {
        ContractState st{std::move(c), nullptr, std::nullopt, {}, {}, {}};
        if (st.data.dropped_rows > 0)
            warn(st.data.id, std::to_string(st.data.dropped_rows) + " row(s) with missing values dropped");
        contracts_.push_back(std::move(st));
    }
}

void Runner::stage_prepare() {
    for (auto& st : contracts_) {
        st.engine = std::make_unique<HedgeEngine>(st.data.spot, st.data.fut, cfg_.estimator,
                                                  wants_decomposition());
        const ImfSet* spot_set = nullptr;
        if (st.engine->has_decomposition()) {
            spot_set = &st.engine->spot_set();
            st.pairing = pair_imfs(st.engine->spot_set(), st.engine->fut_set());
            for (const auto& w : st.pairing->warnings) warn(st.data.id, w);
            for (const auto& imf : spot_set->imfs)
                if (!imf.converged)
                    warn(st.data.id, "spot IMF" + std::to_string(imf.index) + " hit the sift cap");
            for (const auto& imf : st.engine->fut_set().imfs)
                if (!imf.converged)
                    warn(st.data.id, "futures IMF" + std::to_string(imf.index) + " hit the sift cap");
        }
        st.horizons = select_horizons(cfg_, spot_set);
        if (st.horizons.empty()) warn(st.data.id, "no horizon within the cap");
    }
}

void Runner::stage_decomposition() {
    const auto& sift = cfg_.estimator.sift;
    for (const auto& st : contracts_) {
        json sidecar;
        sidecar["contract"] = st.data.id;
        sidecar["config"] = {{"envelope_tolerance", sift.envelope_tolerance},
                             {"max_sifts", sift.max_sifts_per_imf},
                             {"max_imfs", sift.max_imfs},
                             {"mirror_count", sift.boundary_mirror_count}};
        for (Leg leg : {Leg::Spot, Leg::Futures}) {
            const auto& set = leg == Leg::Spot ? st.engine->spot_set() : st.engine->fut_set();
            const std::string tag = std::string(to_string(leg));
            const std::string name = "decomposition_" + st.data.id + "_" + tag + ".csv";
            CsvFile out(file(name));
            std::vector<std::string> head{"t", "date"};
            for (const auto& imf : set.imfs) head.push_back("imf" + std::to_string(imf.index));
            head.push_back("residue");
            out.row(head);
            const auto& dates = st.data.spot.timestamps();
            for (std::size_t t = 0; t < dates.size(); ++t) {
                std::vector<std::string> row{std::to_string(t), format_date(dates[t])};
                for (const auto& imf : set.imfs) row.push_back(num(imf.values[t]));
                row.push_back(num(set.residue[t]));
                out.row(row);
            }
            produced("decomposition", name);
            json imfs = json::array();
            for (const auto& imf : set.imfs)
                imfs.push_back({{"imf", imf.index},
                                {"cycle", imf.cycle},
                                {"n_maxima", imf.n_maxima},
                                {"n_minima", imf.n_minima},
                                {"n_zero_crossings", imf.n_zero_crossings},
                                {"sifts", imf.sifts},
                                {"converged", imf.converged}});
            sidecar[tag] = {{"source_len", set.source_len}, {"imfs", imfs}};
        }
        const std::string name = "decomposition_" + st.data.id + ".json";
        std::ofstream(file(name), std::ios::binary) << sidecar.dump(2) << '\n';
        produced("decomposition", name);
    }
}

void Runner::stage_cycles() {
    CsvFile out(file("cycles.csv"));
    out.row({"contract", "leg", "component", "n_maxima", "n_minima", "n_zero_crossings", "cycle",
             "horizon", "sifts", "converged"});
    for (const auto& st : contracts_) {
        for (Leg leg : {Leg::Spot, Leg::Futures}) {
            const auto& set = leg == Leg::Spot ? st.engine->spot_set() : st.engine->fut_set();
            for (const auto& imf : set.imfs)
                out.row({st.data.id, std::string(to_string(leg)), "IMF" + std::to_string(imf.index),
                         std::to_string(imf.n_maxima), std::to_string(imf.n_minima),
                         std::to_string(imf.n_zero_crossings), num(imf.cycle),
                         std::isfinite(imf.cycle) ? std::to_string(canonical_horizon(imf)) : "",
                         std::to_string(imf.sifts), imf.converged ? "true" : "false"});
        }
    }
    produced("cycles", "cycles.csv");
}

void Runner::stage_variance() {
    CsvFile out(file("variance_decomposition.csv"));
    out.row({"contract", "leg", "component", "variance", "percent"});
    for (const auto& st : contracts_) {
        for (Leg leg : {Leg::Spot, Leg::Futures}) {
            const auto& series = leg == Leg::Spot ? st.data.spot : st.data.fut;
            // second decomposition, on one-step log returns
            const auto ret = horizon_diff(series, 1, DiffKind::LogDiff);
            const auto set = decompose(ret.values, cfg_.estimator.sift);
            double total = 0.0;
            for (const auto& r : variance_decomposition(set, leg)) {
                total += r.percent;
                out.row({st.data.id, std::string(to_string(leg)),
                         r.is_residue ? "residue" : "IMF" + std::to_string(r.imf_index),
                         num(r.variance), num(r.percent)});
            }
            if (total < 90.0 || total > 110.0)
                warn(st.data.id, std::string(to_string(leg)) + " variance shares sum to " +
                                     format_double(total) + "%");
        }
    }
    produced("variance_decomposition", "variance_decomposition.csv");
}

void Runner::stage_matching() {
    CsvFile out(file("matching_degree.csv"));
    out.row({"contract", "component", "beta", "r_squared", "cycle_spot", "cycle_futures"});
    for (auto& st : contracts_) {
        const auto pairs = st.pairing->with_residue();
        st.matching = matching_degree(pairs);
        for (const auto& m : st.matching)
            out.row({st.data.id, m.is_residue ? "residue" : "IMF" + std::to_string(m.imf_index),
                     num(m.beta), num(m.r_squared), num(m.cycle_spot), num(m.cycle_fut)});
    }
    produced("matching_degree", "matching_degree.csv");
}

void Runner::stage_in_sample() {
    CsvFile out(file("in_sample.csv"));
    std::vector<std::string> head{"contract", "component", "cycle", "horizon"};
    for (auto m : cfg_.methods) head.push_back("ratio_" + std::string(to_string(m)));
    for (auto m : cfg_.methods) head.push_back("he_variance_" + std::string(to_string(m)));
    for (auto m : cfg_.methods) head.push_back("he_var_" + std::string(to_string(m)));
    for (auto m : cfg_.methods) head.push_back("r_squared_" + std::string(to_string(m)));
    for (auto m : cfg_.methods) head.push_back("n_obs_" + std::string(to_string(m)));
    for (auto m : cfg_.methods) head.push_back("imf_" + std::string(to_string(m)));
    if (cfg_.has_method(Method::EECM)) head.push_back("lags_EECM");
    out.row(head);
    const int stride = cfg_.estimator.conventional.stride;
    // single failures are warnings; a table with no estimate at all fails the stage
    bool any_estimate = false;
    std::optional<Error> first_error;
    for (const auto& st : contracts_) {
        for (const auto& row : st.horizons) {
            const auto n = cfg_.methods.size();
            std::vector<std::string> ratio(n), hev(n), hvar(n), r2(n), nobs(n), imf(n);
            std::string lags;
            for (std::size_t i = 0; i < n; ++i) {
                const Method m = cfg_.methods[i];
                const auto tag = std::string(to_string(m)) + " at horizon " + std::to_string(row.horizon);
                try {
                    const auto est = st.engine->estimate(m, row.horizon, {}, row.imf_index);
                    any_estimate = true;
                    ratio[i] = num(est.ratio);
                    r2[i] = num(est.fit.r_squared);
                    nobs[i] = std::to_string(est.fit.n_obs);
                    if (est.imf_index) imf[i] = std::to_string(*est.imf_index);
                    if (est.lags) lags = std::to_string(est.lags->first) + ":" + std::to_string(est.lags->second);
                    const auto hedged = build_portfolio(st.data.spot, st.data.fut, est.ratio, row.horizon,
                                                        {}, stride);
                    for (Criterion c : kCriteria) {
                        try {
                            const auto eff = evaluate(c, hedged.spot_returns.values, hedged.portfolio,
                                                      cfg_.alpha);
                            auto& cell = c == Criterion::VaR ? hvar[i] : hev[i];
                            if (eff.degenerate) warn(st.data.id, tag + ": degenerate " + std::string(to_string(c)));
                            else cell = num(eff.value);
                            if (eff.sign_anomaly)
                                warn(st.data.id, tag + ": spot quantile above zero");
                        } catch (const Error& e) {
                            warn(st.data.id, tag + ": " + e.what());
                        }
                    }
                } catch (const Error& e) {
                    warn(st.data.id, tag + ": " + e.what());
                    if (!first_error) first_error = e;
                }
            }
            std::vector<std::string> cells{st.data.id, row.component, num(row.cycle),
                                           std::to_string(row.horizon)};
            cells.insert(cells.end(), ratio.begin(), ratio.end());
            cells.insert(cells.end(), hev.begin(), hev.end());
            cells.insert(cells.end(), hvar.begin(), hvar.end());
            cells.insert(cells.end(), r2.begin(), r2.end());
            cells.insert(cells.end(), nobs.begin(), nobs.end());
            cells.insert(cells.end(), imf.begin(), imf.end());
            if (cfg_.has_method(Method::EECM)) cells.push_back(lags);
            out.row(cells);
        }
    }
    if (!any_estimate && first_error) throw *first_error;
    produced("in_sample", "in_sample.csv");
}

void Runner::stage_cv_compute() {
    for (auto& st : contracts_) {
        const auto groups = partition(st.data.spot, cfg_.partition);
        if (static_cast<int>(groups.size()) <= cfg_.k)
            throw Error(ErrorCode::InvalidArgument,
                        "k = " + std::to_string(cfg_.k) + " needs more than " +
                            std::to_string(groups.size()) + " groups");
        for (std::size_t r = 0; r < st.horizons.size(); ++r) {
            const auto& row = st.horizons[r];
            for (Method m : cfg_.methods) {
                CvConfig cv;
                cv.method = m;
                cv.horizon = row.horizon;
                cv.criteria.assign(std::begin(kCriteria), std::end(kCriteria));
                cv.k = cfg_.k;
                cv.min_obs = cfg_.min_obs;
                cv.alpha = cfg_.alpha;
                cv.imf_index = row.imf_index;
                cv.threads = cfg_.threads;
                const auto tag = std::string(to_string(m)) + " at horizon " + std::to_string(row.horizon);
                try {
                    auto reports = run_cv(*st.engine, groups, cv);
                    const auto& first = reports.front();
                    for (const auto& ex : first.excluded_groups)
                        exclusions_.push_back({{"contract", st.data.id},
                                               {"method", to_string(m)},
                                               {"horizon", row.horizon},
                                               {"group", groups.labels[static_cast<std::size_t>(ex.group)]},
                                               {"reason", ex.reason}});
                    for (const auto& f : first.failed_splits)
                        warn(st.data.id, tag + ": split " + std::to_string(f.split + 1) + " failed: " + f.reason);
                    st.cv[{m, r}] = CvCell{row.imf_index, row.horizon, std::move(reports)};
                } catch (const Error& e) {
                    warn(st.data.id, "cv " + tag + " skipped: " + e.what());
                }
            }
        }
    }
}

void Runner::stage_cv_write() {
    json sidecar = json::array();
    for (Criterion c : kCriteria) {
        const std::string cname = c == Criterion::VaR ? "cv_var.csv" : "cv_variance.csv";
        CsvFile out(file(cname));
        std::vector<std::string> head{"contract", "component", "horizon", "n_groups", "k", "paths"};
        for (Method m : cfg_.methods)
            for (const char* col : {"_mean", "_std", "_skew", "_kurt", "_paths_used"})
                head.push_back(std::string(to_string(m)) + col);
        out.row(head);
        for (const auto& st : contracts_) {
            for (std::size_t r = 0; r < st.horizons.size(); ++r) {
                const auto& row = st.horizons[r];
                std::vector<std::string> cells{st.data.id, row.component, std::to_string(row.horizon)};
                std::string groups, k, paths;
                std::vector<std::string> stats;
                for (Method m : cfg_.methods) {
                    const PathReport* rep = nullptr;
                    if (const auto it = st.cv.find({m, r}); it != st.cv.end())
                        for (const auto& candidate : it->second.reports)
                            if (candidate.criterion == c) rep = &candidate;
                    if (!rep) {
                        stats.insert(stats.end(), 5, "");
                        continue;
                    }
                    groups = std::to_string(rep->n_groups);
                    k = std::to_string(rep->k);
                    paths = std::to_string(rep->n_paths);
                    stats.insert(stats.end(), {num(rep->stats.mean), num(rep->stats.std), num(rep->stats.skewness),
                                               num(rep->stats.excess_kurtosis),
                                               std::to_string(rep->path_ids.size())});
                    json excluded = json::array();
                    for (const auto& e : rep->excluded_groups)
                        excluded.push_back({{"group", e.group + 1}, {"reason", e.reason}});
                    json failed = json::array();
                    for (const auto& f : rep->failed_splits)
                        failed.push_back({{"split", f.split + 1}, {"reason", f.reason}});
                    json split_values = json::array();
                    for (const auto& v : rep->per_split_values)
                        split_values.push_back(v && std::isfinite(*v) ? json(*v) : json(nullptr));
                    json split_ratios = json::array();
                    for (double v : rep->split_ratios)
                        split_ratios.push_back(std::isfinite(v) ? json(v) : json(nullptr));
                    sidecar.push_back({{"contract", st.data.id},
                                       {"criterion", to_string(c)},
                                       {"component", row.component},
                                       {"horizon", row.horizon},
                                       {"method", to_string(m)},
                                       {"n_groups", rep->n_groups},
                                       {"k", rep->k},
                                       {"n_paths", rep->n_paths},
                                       {"path_ids", rep->path_ids},
                                       {"path_values", rep->per_path_values},
                                       {"dropped_paths", rep->dropped_paths},
                                       {"split_ratios", split_ratios},
                                       {"split_values", split_values},
                                       {"excluded_groups", excluded},
                                       {"failed_splits", failed}});
                }
                cells.insert(cells.end(), {groups, k, paths});
                cells.insert(cells.end(), stats.begin(), stats.end());
                out.row(cells);
            }
        }
        produced("cv", cname);
    }
    std::ofstream(file("cv_paths.json"), std::ios::binary) << sidecar.dump(2) << '\n';
    produced("cv", "cv_paths.json");
}

// Observations for one regression scope: (performance, matching degree).
struct Points {
    std::string scope;
    std::vector<double> perf;
    std::vector<double> match;
};

void Runner::stage_determinants() {
    CsvFile out(file("determinants.csv"));
    out.row({"scope", "criterion", "method", "n", "beta", "beta_t", "beta_p", "beta_sig", "r_squared",
             "alpha", "alpha_t", "alpha_p", "alpha_sig", "beta_affine", "beta_affine_t", "beta_affine_p",
             "beta_affine_sig", "r_squared_affine"});
    for (Criterion c : kCriteria) {
        for (Method m : cfg_.methods) {
            std::vector<Points> scopes;
            if (cfg_.pool_determinants) scopes.push_back({"pooled", {}, {}});
            for (const auto& st : contracts_) {
                if (!cfg_.pool_determinants) scopes.push_back({st.data.id, {}, {}});
                for (std::size_t r = 0; r < st.horizons.size(); ++r) {
                    const auto md = st.matching_of(st.horizons[r]);
                    const double perf = st.cv_mean(m, r, c);
                    if (!md || !std::isfinite(perf) || !std::isfinite(*md)) continue;
                    scopes.back().perf.push_back(perf);
                    scopes.back().match.push_back(*md);
                }
            }
            for (const auto& p : scopes) {
                const auto tag = std::string(to_string(m)) + " " + std::string(to_string(c));
                if (p.perf.size() < 3) {
                    warn(p.scope, "determinants " + tag + ": fewer than 3 horizons with results");
                    continue;
                }
                try {
                    const auto f = determinant_regression(p.perf, p.match);
                    out.row({p.scope, std::string(to_string(c)), std::string(to_string(m)), std::to_string(f.n),
                             num(f.origin_beta), num(f.origin_beta_t), num(f.origin_beta_p),
                             significance_stars(f.origin_beta_p), num(f.origin_r_squared), num(f.alpha),
                             num(f.alpha_t), num(f.alpha_p), significance_stars(f.alpha_p), num(f.beta),
                             num(f.beta_t), num(f.beta_p), significance_stars(f.beta_p), num(f.r_squared)});
                } catch (const Error& e) {
                    warn(p.scope, "determinants " + tag + ": " + e.what());
                }
            }
        }
    }
    produced("determinants", "determinants.csv");
}

void Runner::stage_relative() {
    CsvFile points(file("relative_points.csv"));
    points.row({"contract", "component", "horizon", "method", "matching_degree", "model_he_var", "mv_he_var",
                "relative", "degenerate"});
    CsvFile out(file("relative_performance.csv"));
    out.row({"scope", "method", "n", "alpha", "alpha_t", "alpha_p", "alpha_sig", "beta", "beta_t", "beta_p",
             "beta_sig", "r_squared"});
    for (Method m : cfg_.methods) {
        if (m == Method::MV) continue;
        std::vector<Points> scopes;
        if (cfg_.pool_determinants) scopes.push_back({"pooled", {}, {}});
        for (const auto& st : contracts_) {
            if (!cfg_.pool_determinants) scopes.push_back({st.data.id, {}, {}});
            for (std::size_t r = 0; r < st.horizons.size(); ++r) {
                const auto& row = st.horizons[r];
                const auto md = st.matching_of(row);
                const double model = st.cv_mean(m, r, Criterion::VaR);
                const double mv = st.cv_mean(Method::MV, r, Criterion::VaR);
                if (!md || !std::isfinite(model) || !std::isfinite(mv)) continue;
                const auto rel = relative_performance(model, mv);
                points.row({st.data.id, row.component, std::to_string(row.horizon), std::string(to_string(m)),
                            num(*md), num(model), num(mv), num(rel.value), rel.degenerate ? "true" : "false"});
                if (rel.degenerate) continue;
                scopes.back().perf.push_back(rel.value);
                scopes.back().match.push_back(*md);
            }
        }
        for (const auto& p : scopes) {
            const auto tag = "relative performance " + std::string(to_string(m));
            if (p.perf.size() < 3) {
                warn(p.scope, tag + ": fewer than 3 horizons with results");
                continue;
            }
            try {
                const auto f = determinant_regression(p.perf, p.match);
                out.row({p.scope, std::string(to_string(m)), std::to_string(f.n), num(f.alpha), num(f.alpha_t),
                         num(f.alpha_p), significance_stars(f.alpha_p), num(f.beta), num(f.beta_t),
                         num(f.beta_p), significance_stars(f.beta_p), num(f.r_squared)});
            } catch (const Error& e) {
                warn(p.scope, tag + ": " + e.what());
            }
        }
    }
    produced("relative_performance", "relative_performance.csv");
    produced("relative_performance", "relative_points.csv");
}

void Runner::write_manifest() {
    json m;
    m["tool"] = "hedgeemd";
    m["version"] = kVersion;
    m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                                    std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                                    std::to_string(BOOST_VERSION % 100)}};
    m["command"] = to_string(command_);
    m["status"] = result_.ok ? "ok" : "failed";
    m["decompose_scope"] =
        cfg_.estimator.scope == DecomposeScope::Full
            ? "full: one decomposition of the whole series; training regressions see IMF values shaped by test data"
            : "per-segment: each training segment decomposed on its own; no look-ahead, shorter series";
    if (!result_.ok) {
        m["failed_stage"] = result_.failed_stage;
        m["error_code"] = result_.error_code ? std::string(to_string(*result_.error_code)) : "internal";
        m["error"] = result_.error;
    }
    json config = json::object();
    const auto settings = to_settings(cfg_);
    for (const auto& key : config_keys()) config[key] = settings.at(key);
    m["config"] = config;
    json inputs = json::array();
    for (const auto& st : contracts_) {
        const auto& dates = st.data.spot.timestamps();
        json h = json::array();
        for (const auto& row : st.horizons) {
            json r = {{"component", row.component}, {"horizon", row.horizon}};
            r["imf"] = row.imf_index ? json(*row.imf_index) : json(nullptr);
            h.push_back(r);
        }
        inputs.push_back({{"id", st.data.id},
                          {"path", st.data.path.string()},
                          {"rows", st.data.spot.size()},
                          {"dropped_rows", st.data.dropped_rows},
                          {"first_date", format_date(dates.front())},
                          {"last_date", format_date(dates.back())},
                          {"horizons", h}});
    }
    m["inputs"] = inputs;
    json artifacts = json::object();
    for (const auto& [name, files] : artifact_files_) artifacts[name] = files;
    m["artifacts"] = artifacts;
    m["skipped"] = skipped_;
    m["exclusions"] = exclusions_;
    m["warnings"] = warnings_;
    std::ofstream out(file("manifest.json"), std::ios::binary);
    out << m.dump(2) << '\n';
    result_.artifacts.push_back("manifest.json");
}

RunResult Runner::run() {
    std::error_code ec;
    fs::create_directories(cfg_.out, ec);
    if (ec) throw Error(ErrorCode::InvalidArgument, "out: cannot create '" + cfg_.out.string() + "'");
    if (cfg_.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "input: no input file given");

    const bool all = command_ == Command::Pipeline;
    const bool emd = emd_tables();
    std::vector<Stage> stages;
    stages.emplace_back("load", [this] { stage_load(); });
    stages.emplace_back("decompose", [this] { stage_prepare(); });

    auto add = [&](bool wanted, bool needs_emd, const std::string& name, std::function<void()> fn) {
        if (!wanted) return;
        if (needs_emd && !emd) {
            skip(name, "no EMD method selected");
            return;
        }
        stages.emplace_back(name, std::move(fn));
    };
    const bool analyze = all || command_ == Command::Analyze;
    add(all || command_ == Command::Decompose, true, "decomposition", [this] { stage_decomposition(); });
    add(all || command_ == Command::Decompose, true, "cycles", [this] { stage_cycles(); });
    add(analyze, true, "variance_decomposition", [this] { stage_variance(); });
    add(analyze, true, "matching_degree", [this] { stage_matching(); });
    add(all || command_ == Command::Hedge, false, "in_sample", [this] { stage_in_sample(); });
    const bool need_cv = all || command_ == Command::Cv || (analyze && emd);
    if (need_cv) stages.emplace_back("cv", [this] { stage_cv_compute(); });
    add(all || command_ == Command::Cv, false, "cv", [this] { stage_cv_write(); });
    add(analyze, true, "determinants", [this] { stage_determinants(); });
    add(analyze, true, "relative_performance", [this] { stage_relative(); });
    if (analyze && !cfg_.has_method(Method::MV) && emd)
        warn("", "relative performance needs MV among the methods");

    for (auto& [name, fn] : stages) {
        try {
            fn();
        } catch (const Error& e) {
            result_.ok = false;
            result_.failed_stage = name;
            result_.error_code = e.code();
            result_.error = e.what();
            break;
        } catch (const std::exception& e) {
            result_.ok = false;
            result_.failed_stage = name;
            result_.error = e.what();
            break;
        }
    }
    write_manifest();
    return result_;
}

} // namespace

std::vector<Contract> load_inputs(const RunConfig& cfg) {
    std::vector<Contract> out;
    std::set<std::string> seen;
    for (const auto& path : cfg.inputs) {
        std::string id = path.stem().string();
        if (id.empty()) id = "input";
        for (int n = 2; seen.count(id); ++n) id = path.stem().string() + "_" + std::to_string(n);
        seen.insert(id);
        auto pair = load_csv(path, cfg.schema, id);
        out.push_back(Contract{id, path, std::move(pair.spot), std::move(pair.futures), pair.dropped_rows});
    }
    return out;
}

std::vector<HorizonRow> select_horizons(const RunConfig& cfg, const ImfSet* spot_set) {
    std::vector<HorizonRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!cfg.horizons) {
        if (!spot_set) throw Error(ErrorCode::InvalidArgument, "horizons: auto needs a decomposition");
        for (const auto& imf : spot_set->imfs) {
            if (!std::isfinite(imf.cycle)) continue;
            const int h = canonical_horizon(imf);
            if (h > cfg.horizon_cap) continue;
            rows.push_back({"IMF" + std::to_string(imf.index), h, imf.index, imf.cycle});
        }
        return rows;
    }
    for (int h : *cfg.horizons) {
        if (h > cfg.horizon_cap) continue;
        HorizonRow row{"h" + std::to_string(h), h, std::nullopt, nan};
        if (spot_set && !spot_set->imfs.empty()) {
            row.imf_index = imf_for_horizon(*spot_set, h);
            row.cycle = spot_set->imfs[static_cast<std::size_t>(*row.imf_index - 1)].cycle;
        }
        rows.push_back(row);
    }
    return rows;
}

std::filesystem::path write_synthetic(const RunConfig& cfg) {
    SynthSpec spec;
    spec.length = cfg.synth_length;
    spec.seed = cfg.seed;
    spec.tones = cfg.synth_tones;
    spec.coint = cfg.synth_coint;
    const auto pair = gen_coint_pair(spec, "synthetic");
    fs::path target = cfg.out;
    if (target.extension() != ".csv") {
        std::error_code ec;
        fs::create_directories(target, ec);
        if (ec) throw Error(ErrorCode::InvalidArgument, "out: cannot create '" + target.string() + "'");
        target /= "synthetic.csv";
    } else if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    write_csv(target, pair.spot, pair.fut, cfg.schema);
    return target;
}

RunResult run_command(Command command, const RunConfig& cfg) {
    if (command == Command::Synth) {
        RunResult r;
        r.artifacts.push_back(write_synthetic(cfg).string());
        return r;
    }
    Runner runner(command, cfg);
    return runner.run();
}

} // namespace hedgeemd
