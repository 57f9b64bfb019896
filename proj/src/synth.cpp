#include "hedgeemd/synth.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hedgeemd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kBasisBurnIn = 500;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed + kGolden) ^ mix(stream * kGolden + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return inverse_normal_cdf(uniform()); }

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "probability outside (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double low = 0.02425;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void SynthSpec::validate() const {
    if (length < 100) throw Error(ErrorCode::InvalidArgument, "synthetic length must be >= 100");
    for (const auto& t : tones)
        if (!(t.period >= 4.0)) throw Error(ErrorCode::InvalidArgument, "tone period must be >= 4");
    if (noise_sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    if (coint) {
        const double p1 = coint->phi, p2 = coint->phi2;
        // AR(2) stationarity triangle; reduces to |phi| < 1 when phi2 = 0.
        if (!(std::abs(p1) < 1.0 || p2 != 0.0) || !(p1 + p2 < 1.0 && p2 - p1 < 1.0 && std::abs(p2) < 1.0))
            throw Error(ErrorCode::InvalidArgument, "basis process is not stationary");
        if (coint->basis_sigma < 0.0 || coint->futures_sigma < 0.0 || !(coint->initial_futures > 0.0))
            throw Error(ErrorCode::InvalidArgument, "invalid cointegration parameters");
    }
}

std::vector<Date> business_days(Date start, std::size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    Date d = start;
    while (out.size() < n) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
        d += std::chrono::days{1};
    }
    return out;
}

std::vector<double> tone_values(const SynthSpec& spec) {
    spec.validate();
    CounterRng rng(spec.seed, 0);
    std::vector<double> x(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        const double tt = static_cast<double>(t);
        double v = spec.level + spec.trend_slope * tt;
        for (const auto& tone : spec.tones)
            v += tone.amplitude * std::sin(2.0 * std::numbers::pi * tt / tone.period);
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
        x[t] = v;
    }
    return x;
}

PriceSeries gen_tones(const SynthSpec& spec, Leg leg, const std::string& id) {
    auto x = tone_values(spec);
    const double lo = *std::min_element(x.begin(), x.end());
    if (lo <= 0.0)
        for (auto& v : x) v += 1.0 - lo;
    return PriceSeries(id, leg, business_days(spec.start, spec.length), std::move(x));
}

CointPair gen_coint_pair(const SynthSpec& spec, const std::string& id) {
    spec.validate();
    if (!spec.coint) throw Error(ErrorCode::InvalidArgument, "cointegration parameters missing");
    const auto& c = *spec.coint;
    CounterRng fut_rng(spec.seed, 1);
    CounterRng basis_rng(spec.seed, 2);

    const std::size_t n = spec.length;
    std::vector<double> u(n + kBasisBurnIn, 0.0);
    for (std::size_t t = 0; t < u.size(); ++t) {
        double v = c.basis_sigma * basis_rng.normal();
        if (t >= 1) v += c.phi * u[t - 1];
        if (t >= 2) v += c.phi2 * u[t - 2];
        u[t] = v;
    }
    std::vector<double> basis(u.begin() + static_cast<std::ptrdiff_t>(kBasisBurnIn), u.end());

    std::vector<double> log_f(n), spot(n), fut(n);
    log_f[0] = std::log(c.initial_futures);
    for (std::size_t t = 1; t < n; ++t)
        log_f[t] = log_f[t - 1] + c.futures_drift + c.futures_error_correction * basis[t - 1] +
                   c.futures_sigma * fut_rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        double lf = log_f[t];
        for (const auto& tone : spec.tones)
            lf += tone.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / tone.period);
        fut[t] = std::exp(lf);
        spot[t] = std::exp(c.intercept + c.long_run_slope * lf + basis[t]);
    }
    const auto dates = business_days(spec.start, n);
    return CointPair{PriceSeries(id, Leg::Spot, dates, std::move(spot)),
                     PriceSeries(id, Leg::Futures, dates, std::move(fut)), std::move(basis)};
}

} // namespace hedgeemd
