#include "hedgeemd/performance.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hedgeemd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace

std::string_view to_string(Criterion criterion) {
    return criterion == Criterion::VarianceReduction ? "variance" : "var";
}

Criterion parse_criterion(std::string_view name) {
    if (name == "variance" || name == "VR") return Criterion::VarianceReduction;
    if (name == "var" || name == "VaR") return Criterion::VaR;
    throw Error(ErrorCode::InvalidArgument, "unknown criterion '" + std::string(name) + "'");
}

HedgedReturns build_portfolio(const PriceSeries& spot, const PriceSeries& fut, double ratio,
                              int horizon, std::span<const IndexRange> sample, int stride) {
    if (spot.timestamps() != fut.timestamps())
        throw Error(ErrorCode::Misaligned, "spot and futures timestamps differ");
    if (!std::isfinite(ratio)) throw Error(ErrorCode::InvalidArgument, "hedge ratio not finite");
    HedgedReturns out;
    out.horizon = horizon;
    out.ratio = ratio;
    if (sample.empty()) {
        out.spot_returns = horizon_diff(spot, horizon, DiffKind::LogDiff, stride);
        out.futures_returns = horizon_diff(fut, horizon, DiffKind::LogDiff, stride);
    } else {
        const auto ranges = merge_ranges(sample, spot.size());
        out.spot_returns = horizon_diff(spot.values(), ranges, horizon, DiffKind::LogDiff, stride);
        out.futures_returns = horizon_diff(fut.values(), ranges, horizon, DiffKind::LogDiff, stride);
    }
    out.portfolio.resize(out.spot_returns.size());
    for (std::size_t i = 0; i < out.portfolio.size(); ++i)
        out.portfolio[i] = out.spot_returns.values[i] - ratio * out.futures_returns.values[i];
    return out;
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "variance needs 2 observations");
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size() - 1);
}

Effectiveness he_variance(std::span<const double> spot_ret, std::span<const double> portfolio) {
    if (spot_ret.size() != portfolio.size())
        throw Error(ErrorCode::Misaligned, "spot and portfolio returns differ in length");
    Effectiveness out;
    out.criterion = Criterion::VarianceReduction;
    out.n_obs = spot_ret.size();
    const double vs = sample_variance(spot_ret);
    const double vp = sample_variance(portfolio);
    if (!(vs > 0.0)) {
        out.degenerate = true;
        out.value = kNaN;
        return out;
    }
    out.value = 1.0 - vp / vs;
    return out;
}

double var_quantile(std::span<const double> returns, double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 0.5]");
    if (returns.size() < kMinQuantileObservations)
        throw Error(ErrorCode::InsufficientData,
                    "quantile needs at least 20 observations, got " + std::to_string(returns.size()));
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = static_cast<double>(sorted.size() - 1) * alpha;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size() || frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Effectiveness he_var(std::span<const double> spot_ret, std::span<const double> portfolio,
                     double alpha) {
    if (spot_ret.size() != portfolio.size())
        throw Error(ErrorCode::Misaligned, "spot and portfolio returns differ in length");
    Effectiveness out;
    out.criterion = Criterion::VaR;
    out.alpha = alpha;
    out.n_obs = spot_ret.size();
    const double qs = var_quantile(spot_ret, alpha);
    const double qp = var_quantile(portfolio, alpha);
    if (std::abs(qs) < kQuantileFloor) {
        out.degenerate = true;
        out.value = kNaN;
        return out;
    }
    out.sign_anomaly = qs > 0.0;
    out.value = 1.0 - qp / qs;
    return out;
}

Effectiveness evaluate(Criterion criterion, std::span<const double> spot_ret,
                       std::span<const double> portfolio, double alpha) {
    return criterion == Criterion::VarianceReduction ? he_variance(spot_ret, portfolio)
                                                     : he_var(spot_ret, portfolio, alpha);
}

Moments describe(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InsufficientData, "no values to describe");
    Moments out;
    out.n = values.size();
    const double n = static_cast<double>(values.size());
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
        out.mean = values[0];
        out.std = values.size() > 1 ? 0.0 : kNaN;
        out.higher_defined = false;
        out.skewness = kNaN;
        out.excess_kurtosis = kNaN;
        return out;
    }
    out.mean = mean_of(values);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    out.std = values.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : kNaN;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    } else {
        out.higher_defined = false;
        out.skewness = kNaN;
        out.excess_kurtosis = kNaN;
    }
    return out;
}

Moments moments(std::span<const double> values) {
    if (values.size() < 4)
        throw Error(ErrorCode::InsufficientData, "moments need at least 4 values");
    return describe(values);
}

} // namespace hedgeemd
