#pragma once

#include "hedgeemd/series.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hedgeemd {

enum class Criterion { VarianceReduction, VaR };

std::string_view to_string(Criterion criterion);
Criterion parse_criterion(std::string_view name);

struct HedgedReturns {
    int horizon = 1;
    double ratio = 0.0;
    ReturnSeries spot_returns;
    ReturnSeries futures_returns;
    // p_t = dlog S_t - ratio * dlog F_t
    std::vector<double> portfolio;
};

HedgedReturns build_portfolio(const PriceSeries& spot, const PriceSeries& fut, double ratio,
                              int horizon, std::span<const IndexRange> sample = {},
                              int stride = 1);

struct Effectiveness {
    Criterion criterion = Criterion::VarianceReduction;
    double value = 0.0;
    double alpha = 0.0;  // VaR only
    std::size_t n_obs = 0;
    bool degenerate = false;
    // Spot quantile above zero: the VaR ratio is reported but its sign is
    // not a loss comparison any more.
    bool sign_anomaly = false;
};

// Spot quantiles with smaller magnitude than this make he_var unstable.
inline constexpr double kQuantileFloor = 1e-12;
inline constexpr std::size_t kMinQuantileObservations = 20;

double sample_variance(std::span<const double> x);

/// 1 - var(portfolio) / var(spot), both with the n - 1 denominator.
Effectiveness he_variance(std::span<const double> spot_ret, std::span<const double> portfolio);

/// Empirical alpha-quantile, linear interpolation at 1-based position
/// (n - 1) * alpha + 1 of the sorted sample.
double var_quantile(std::span<const double> returns, double alpha);

/// 1 - q_alpha(portfolio) / q_alpha(spot) on signed returns.
Effectiveness he_var(std::span<const double> spot_ret, std::span<const double> portfolio,
                     double alpha = 0.05);

Effectiveness evaluate(Criterion criterion, std::span<const double> spot_ret,
                       std::span<const double> portfolio, double alpha = 0.05);

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;         // m3 / m2^1.5
    double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
    std::size_t n = 0;
    // False when the spread is zero (skew and kurtosis are NaN then).
    bool higher_defined = true;
};

// Requires at least 4 values.
Moments moments(std::span<const double> values);
// Same estimators on any non-empty sample; NaN wherever undefined.
Moments describe(std::span<const double> values);

} // namespace hedgeemd
