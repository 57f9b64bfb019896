#pragma once

#include "hedgeemd/cpcv.hpp"
#include "hedgeemd/estimators.hpp"
#include "hedgeemd/series.hpp"
#include "hedgeemd/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hedgeemd {

struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    CsvSchema schema;
    PartitionScheme partition = PartitionScheme::calendar_year();
    int k = 2;
    std::optional<std::vector<int>> horizons;  // nullopt: auto from spot IMF cycles
    int horizon_cap = 183;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    double alpha = 0.05;
    EstimatorConfig estimator;
    std::optional<std::size_t> min_obs;
    unsigned threads = 1;
    // Determinant regressions over all inputs together, or one per input.
    bool pool_determinants = true;
    std::filesystem::path out = "out";
    std::uint64_t seed = 1;
    // synth subcommand
    std::size_t synth_length = 2000;
    CointSpec synth_coint;
    std::vector<Tone> synth_tones;  // added to log spot and log futures alike

    bool has_method(Method m) const;
    bool needs_decomposition() const;
};

using Settings = std::map<std::string, std::string>;

// Every accepted key, in file order.
const std::vector<std::string>& config_keys();

// Sets one key; usage error naming the key on a bad value or unknown key.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat "key = value" text with '#' comments.
Settings read_config_file(const std::filesystem::path& path);
Settings parse_config_text(std::string_view text, const std::string& origin = "config");

/// Defaults, then the file (when given), then the flags. Cross-field checks
/// run last.
RunConfig parse_config(const Settings& flags,
                       const std::optional<std::filesystem::path>& file = std::nullopt);

void validate(const RunConfig& cfg);

// Every key with its effective value; feeding this back reproduces cfg.
Settings to_settings(const RunConfig& cfg);
std::string format_config(const RunConfig& cfg);

} // namespace hedgeemd
