#pragma once

#include "hedgeemd/config.hpp"
#include "hedgeemd/error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hedgeemd {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { Synth, Decompose, Hedge, Cv, Analyze, Pipeline };

std::string_view to_string(Command command);
std::string_view to_string(ErrorCode code);

struct Contract {
    std::string id;  // file stem, suffixed when two inputs share one
    std::filesystem::path path;
    PriceSeries spot;
    PriceSeries fut;
    std::size_t dropped_rows = 0;
};

std::vector<Contract> load_inputs(const RunConfig& cfg);

struct HorizonRow {
    std::string component;  // "IMF3", or "h20" for an explicit horizon
    int horizon = 1;
    std::optional<int> imf_index;
    double cycle = 0.0;  // NaN when no decomposition backs the row
};

/// Auto: one row per spot IMF whose rounded cycle is within the cap.
/// Explicit: the listed horizons, each tied to the nearest-cycle IMF when a
/// decomposition is given.
std::vector<HorizonRow> select_horizons(const RunConfig& cfg, const ImfSet* spot_set);

struct RunResult {
    bool ok = true;
    std::string failed_stage;
    std::optional<ErrorCode> error_code;
    std::string error;
    std::vector<std::string> artifacts;  // file names inside cfg.out
};

/// Runs the stages of one subcommand, writing each artifact as soon as it
/// is ready. A failing stage stops the run; finished files stay on disk and
/// manifest.json names the stage.
RunResult run_command(Command command, const RunConfig& cfg);

inline RunResult run_pipeline(const RunConfig& cfg) { return run_command(Command::Pipeline, cfg); }

// Synthetic cointegrated pair in the ingestion format. `--out` naming a
// .csv file is used as is; otherwise synthetic.csv goes inside it.
std::filesystem::path write_synthetic(const RunConfig& cfg);

} // namespace hedgeemd
