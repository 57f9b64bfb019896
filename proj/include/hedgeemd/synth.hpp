#pragma once

#include "hedgeemd/series.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hedgeemd {

/// Counter-based generator: draw i of stream s is splitmix64's output
/// finaliser applied to key(seed, s) + i * 0x9E3779B97F4A7C15. Pure
/// 64-bit integer arithmetic, so every platform sees the same stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    // Standard normal through inverse_normal_cdf(uniform()).
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Acklam's rational approximation of the standard normal quantile;
/// relative error below 1.15e-9 over (0, 1).
double inverse_normal_cdf(double p);

struct Tone {
    double period = 20.0;  // samples
    double amplitude = 1.0;
};

struct CointSpec {
    double long_run_slope = 0.9;  // b in log S = a + b log F + u
    double phi = 0.8;             // basis AR(1) coefficient
    double phi2 = 0.0;            // optional AR(2) coefficient
    double basis_sigma = 0.004;
    double intercept = 0.0;
    double futures_sigma = 0.015;
    double futures_drift = 0.0002;
    // Loading of the futures log change on the previous basis; nonzero
    // values make short-horizon slopes differ from the long-run slope.
    double futures_error_correction = 0.0;
    double initial_futures = 100.0;
};

struct SynthSpec {
    std::size_t length = 2000;
    std::uint64_t seed = 1;
    std::vector<Tone> tones;
    double trend_slope = 0.0;  // units per sample
    double level = 0.0;
    double noise_sigma = 0.0;
    std::optional<CointSpec> coint;
    Date start = std::chrono::sys_days{std::chrono::year{2000} / 1 / 3};

    void validate() const;
};

// Weekdays only, starting at `start` (moved forward off a weekend).
std::vector<Date> business_days(Date start, std::size_t n);

// Tones + trend + level + noise before the positivity shift.
std::vector<double> tone_values(const SynthSpec& spec);

/// Tone series shifted up so its minimum is at least 1 when it would
/// otherwise touch zero or go negative.
PriceSeries gen_tones(const SynthSpec& spec, Leg leg = Leg::Spot,
                      const std::string& id = "synthetic");

struct CointPair {
    PriceSeries spot;
    PriceSeries fut;
    std::vector<double> basis;  // u_t
};

// Tones are added to log F before the spot is formed.
CointPair gen_coint_pair(const SynthSpec& spec, const std::string& id = "synthetic");

} // namespace hedgeemd
