#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hedgeemd {

struct SiftConfig {
    // Sifting stops once rms(envelope mean) <= envelope_tolerance * rms(h).
    double envelope_tolerance = 0.05;
    int max_sifts_per_imf = 64;
    int max_imfs = 16;
    // Extrema reflected beyond each end before the envelope splines are fit.
    int boundary_mirror_count = 2;

    void validate() const;
};

struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
    std::size_t zero_crossings = 0;

    std::size_t count() const { return maxima.size() + minima.size(); }
};

/// Strict interior extrema by neighbour comparison. A flat run that
/// dominates both of its neighbours counts once, at its midpoint. Zero
/// crossings are sign changes between consecutive nonzero samples.
Extrema find_extrema(std::span<const double> x);

/// Natural cubic spline through (knots[i], values[i]), evaluated at the
/// integer positions 0 .. n - 1. Knots must be strictly increasing.
std::vector<double> natural_cubic_spline(std::span<const double> knots,
                                         std::span<const double> values,
                                         std::size_t n);

/// Mean of the upper and lower spline envelopes. Returns nullopt when the
/// series has fewer than two maxima or two minima, which ends sifting.
std::optional<std::vector<double>> envelope_mean(std::span<const double> x,
                                                 const Extrema& extrema,
                                                 int mirror);
std::optional<std::vector<double>> envelope_mean(std::span<const double> x,
                                                 int mirror);

struct ImfCheck {
    bool is_imf = false;
    std::size_t n_maxima = 0;
    std::size_t n_minima = 0;
    std::size_t n_zero_crossings = 0;
    // rms(envelope mean) / rms(x); infinity when no envelope exists.
    double envelope_ratio = 0.0;
};

ImfCheck is_imf(std::span<const double> x, double envelope_tolerance,
                int mirror = 2);

struct SiftResult {
    std::vector<double> values;
    int sifts = 0;
    bool converged = false;
    // Envelopes vanished before convergence: the iterate looks like a trend.
    bool residue_like = false;
};

SiftResult sift(std::span<const double> x, const SiftConfig& cfg);

struct Imf {
    std::vector<double> values;
    int index = 0;  // 1-based
    double cycle = 0.0;
    std::size_t n_maxima = 0;
    std::size_t n_minima = 0;
    std::size_t n_zero_crossings = 0;
    int sifts = 0;
    bool converged = true;
};

struct ImfSet {
    std::vector<Imf> imfs;
    std::vector<double> residue;
    std::size_t source_len = 0;

    std::size_t size() const { return imfs.size(); }
    // Sum of the IMFs plus the residue.
    std::vector<double> reconstruct() const;
};

ImfSet decompose(std::span<const double> x, const SiftConfig& cfg = {});

/// Mean period in samples: series_len / (maxima + minima - 1) * 2.
double cycle(std::size_t n_maxima, std::size_t n_minima, std::size_t series_len);
double cycle(const Imf& imf, std::size_t series_len);

bool is_monotone(std::span<const double> x);

} // namespace hedgeemd
