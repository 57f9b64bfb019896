#include "hedgeemd/config.hpp"
#include "hedgeemd/error.hpp"
#include "hedgeemd/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace hedgeemd;

namespace {

int exit_code(ErrorCode code) {
    switch (category(code)) {
    case ErrorCategory::Usage: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Numeric: return 3;
    }
    return 3;
}

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

const Flag kFlags[] = {
    {"--input", "input", "price CSV (date,spot,futures); comma-separate several"},
    {"--out", "out", "output directory (synth: directory or .csv file)"},
    {"--k", "k", "test groups per split"},
    {"--alpha", "alpha", "VaR level in (0, 0.5]"},
    {"--horizons", "horizons", "'auto' or a comma list of days"},
    {"--horizon-cap", "horizon_cap", "largest horizon kept, days"},
    {"--partition", "partition", "equal:N or year"},
    {"--methods", "methods", "comma list of MV,ECM,EECM,VEMD,SEMD,AEMD or 'all'"},
    {"--decompose-scope", "decompose_scope", "full or per-segment"},
    {"--seed", "seed", "generator seed"},
    {"--threads", "threads", "worker threads for the cross-validation splits"},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EMD hedge ratios with combinatorial cross-validation"};
    app.require_subcommand(1);

    const std::pair<const char*, Command> commands[] = {
        {"synth", Command::Synth},         {"decompose", Command::Decompose},
        {"hedge", Command::Hedge},         {"cv", Command::Cv},
        {"analyze", Command::Analyze},     {"pipeline", Command::Pipeline}};
    const std::map<std::string, std::string> blurbs = {
        {"synth", "write a seeded synthetic spot/futures pair"},
        {"decompose", "IMF decomposition and cycle table"},
        {"hedge", "in-sample hedge ratios and effectiveness"},
        {"cv", "combinatorial cross-validation path reports"},
        {"analyze", "variance shares, matching degree and determinant regressions"},
        {"pipeline", "every stage, end to end"}};

    std::map<std::string, std::string> values;
    std::string config_file;
    std::vector<std::string> extra;
    std::map<CLI::App*, Command> subs;
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        for (const auto& f : kFlags) sub->add_option(f.name, values[f.key], f.help);
        sub->add_option("--config", config_file, "key = value file; flags win over it");
        sub->add_option("--set", extra, "any config key as key=value");
        subs[sub] = cmd;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    CLI::App* chosen = app.get_subcommands().front();
    Settings flags;
    for (const auto& f : kFlags)
        if (chosen->count(f.name) > 0) flags[f.key] = values[f.key];
    try {
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::InvalidArgument, "--set expects key=value, got '" + kv + "'");
            flags[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        const auto cfg = parse_config(flags, config_file.empty()
                                                 ? std::nullopt
                                                 : std::optional<std::filesystem::path>(config_file));
        const auto result = run_command(subs.at(chosen), cfg);
        if (!result.ok) {
            std::cerr << "error: stage " << result.failed_stage << ": " << result.error << '\n';
            return result.error_code ? exit_code(*result.error_code) : 3;
        }
        for (const auto& a : result.artifacts) std::cout << a << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
