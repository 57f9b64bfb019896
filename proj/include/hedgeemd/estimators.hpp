#pragma once

#include "hedgeemd/emd.hpp"
#include "hedgeemd/series.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hedgeemd {

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct OlsOptions {
    bool intercept = true;
    // Drop regressors that are exact linear combinations of earlier pivots
    // instead of failing. Dropped coefficients report 0 with NaN t-stats.
    bool drop_collinear = false;
};

/// Least-squares fit. With an intercept, r_squared is the centred R^2;
/// without one it is the uncentred 1 - SSE / sum(y^2).
struct OlsFit {
    double alpha = 0.0;
    std::vector<double> beta;
    double r_squared = 0.0;
    // Intercept first when present, then the slopes.
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> residuals;
    std::vector<bool> dropped;
    std::size_t n_obs = 0;
    int n_params = 0;
    double sse = 0.0;
    // n ln(SSE / n) + 2p
    double aic = 0.0;
    bool intercept = true;

    double slope() const { return beta.at(0); }
    int dof() const { return static_cast<int>(n_obs) - n_params; }
};

OlsFit ols(std::span<const double> y, const std::vector<std::vector<double>>& columns,
           const OlsOptions& options = {});
OlsFit ols(std::span<const double> y, std::span<const double> x,
           const OlsOptions& options = {});

// ---------------------------------------------------------------------------
// Hedge estimators
// ---------------------------------------------------------------------------

enum class Method { MV, ECM, EECM, VEMD, SEMD, AEMD };

inline constexpr Method kAllMethods[] = {Method::MV,   Method::ECM,  Method::EECM,
                                         Method::VEMD, Method::SEMD, Method::AEMD};

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_emd_method(Method method);

struct HedgeEstimate {
    Method method = Method::MV;
    int horizon = 1;
    double ratio = 0.0;
    OlsFit fit;
    std::optional<int> imf_index;
    std::optional<std::pair<int, int>> lags;  // (m, n) for EECM
};

enum class CointLevels { Log, Raw };

struct ConventionalOptions {
    int stride = 1;
    // ECM: include the lagged log levels. Off gives the restricted model.
    bool ecm_levels = true;
    int max_lag = 10;
    // EECM: include the lagged cointegration residual.
    bool eecm_residual = true;
    CointLevels levels = CointLevels::Log;
};

// Observation ranges over the common index of an aligned spot/futures
// pair. An empty span means the whole series.
using Sample = std::vector<IndexRange>;

HedgeEstimate mv_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                       std::span<const IndexRange> sample = {},
                       const ConventionalOptions& options = {});
HedgeEstimate mv_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut,
                       int horizon, const ConventionalOptions& options = {});

/// Error-correction hedge: regress the horizon log change of spot on the
/// futures change plus both log levels at the start of the horizon.
HedgeEstimate ecm_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                        std::span<const IndexRange> sample = {},
                        const ConventionalOptions& options = {});
HedgeEstimate ecm_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut,
                        int horizon, const ConventionalOptions& options = {});

/// Extended error-correction hedge. Lags are counted in horizon steps, so
/// lag i of a horizon-h change ends at t - i*h. All (m, n) candidates share
/// the sample aligned to max_lag; ties in AIC go to smaller m + n, then m.
HedgeEstimate eecm_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                         std::span<const IndexRange> sample = {},
                         const ConventionalOptions& options = {});
HedgeEstimate eecm_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut,
                         int horizon, const ConventionalOptions& options = {});

struct LagCandidate {
    int m = 0;  // spot lags
    int n = 0;  // futures lags
    double aic = 0.0;
};

// Position of the lowest-AIC candidate, ties broken as in eecm_ratio.
std::size_t select_lag_order(std::span<const LagCandidate> candidates);

struct ImfPair {
    int index = 0;  // 1-based; residue pair gets count + 1
    bool is_residue = false;
    std::vector<double> spot;
    std::vector<double> fut;
    double cycle_spot = 0.0;  // NaN for the residue pair
    double cycle_fut = 0.0;
};

struct ImfPairing {
    std::vector<ImfPair> pairs;
    ImfPair residue;
    int surplus_spot = 0;
    int surplus_fut = 0;
    std::vector<std::string> warnings;

    // IMF pairs followed by the residue pair.
    std::vector<ImfPair> with_residue() const;
};

ImfPairing pair_imfs(const ImfSet& spot_set, const ImfSet& fut_set);

HedgeEstimate vemd_ratio(const ImfPair& pair, int horizon,
                         std::span<const IndexRange> sample = {}, int stride = 1);
HedgeEstimate semd_ratio(const ImfPair& pair, std::span<const IndexRange> sample = {});

// Sum of the IMFs whose rounded cycle does not exceed the horizon, or
// nullopt when none qualifies.
std::optional<std::vector<double>> aggregate_imfs(const ImfSet& set, int horizon);
int qualifying_imf_count(const ImfSet& set, int horizon);

HedgeEstimate aemd_ratio(const ImfSet& spot_set, const ImfSet& fut_set, int horizon,
                         std::span<const IndexRange> sample = {});

/// IMF index (1-based) whose cycle lies closest to the horizon; ties go to
/// the lower index.
int imf_for_horizon(const ImfSet& set, int horizon);

// Adaptive horizon for an IMF: its cycle rounded to whole days.
int canonical_horizon(const Imf& imf);

// ---------------------------------------------------------------------------
// Dispatch over all six methods for one spot/futures pair
// ---------------------------------------------------------------------------

enum class DecomposeScope { Full, PerSegment };

std::string_view to_string(DecomposeScope scope);

struct EstimatorConfig {
    ConventionalOptions conventional;
    SiftConfig sift;
    DecomposeScope scope = DecomposeScope::Full;
};

/// Holds an aligned pair and, when EMD methods are in play, the full-series
/// decompositions of both legs. estimate() is const and safe to call from
/// several threads.
class HedgeEngine {
public:
    HedgeEngine(PriceSeries spot, PriceSeries fut, EstimatorConfig config = {},
                bool with_decomposition = true);

    const PriceSeries& spot() const { return spot_; }
    const PriceSeries& fut() const { return fut_; }
    const EstimatorConfig& config() const { return config_; }
    bool has_decomposition() const { return spot_set_.has_value(); }
    const ImfSet& spot_set() const;
    const ImfSet& fut_set() const;

    // For VEMD/SEMD an explicit IMF index overrides the horizon lookup.
    HedgeEstimate estimate(Method method, int horizon,
                           std::span<const IndexRange> sample = {},
                           std::optional<int> imf_index = std::nullopt) const;

private:
    HedgeEstimate estimate_emd(Method method, int horizon,
                               std::span<const IndexRange> sample,
                               std::optional<int> imf_index) const;
    HedgeEstimate estimate_emd_per_segment(Method method, int horizon,
                                           std::span<const IndexRange> sample,
                                           std::optional<int> imf_index) const;

    PriceSeries spot_;
    PriceSeries fut_;
    EstimatorConfig config_;
    std::optional<ImfSet> spot_set_;
    std::optional<ImfSet> fut_set_;
};

} // namespace hedgeemd
