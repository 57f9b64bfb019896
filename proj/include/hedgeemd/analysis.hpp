#pragma once

#include "hedgeemd/emd.hpp"
#include "hedgeemd/estimators.hpp"
#include "hedgeemd/series.hpp"

#include <span>
#include <string>
#include <vector>

namespace hedgeemd {

struct VarianceRow {
    int imf_index = 0;  // residue row: IMF count + 1
    bool is_residue = false;
    Leg leg = Leg::Spot;
    double variance = 0.0;
    double percent = 0.0;  // of the source series variance
};

/// Per-component sample variance of a decomposition of a LOG-RETURN series,
/// as a share of the variance of the series itself (rebuilt from the set).
std::vector<VarianceRow> variance_decomposition(const ImfSet& logret_set, Leg leg = Leg::Spot);

struct MatchRow {
    int imf_index = 0;
    bool is_residue = false;
    double beta = 0.0;
    double r_squared = 0.0;
    double cycle_spot = 0.0;
    double cycle_fut = 0.0;
};

// Spot IMF regressed on the paired futures IMF, in levels with intercept.
// A constant futures component gives NaN beta and r_squared for that row.
std::vector<MatchRow> matching_degree(std::span<const ImfPair> pairs);

struct DeterminantFit {
    std::size_t n = 0;
    // performance = beta * matching + e
    double origin_beta = 0.0;
    double origin_beta_t = 0.0;
    double origin_beta_p = 0.0;
    double origin_r_squared = 0.0;
    // performance = alpha + beta * matching + e
    double alpha = 0.0;
    double alpha_t = 0.0;
    double alpha_p = 0.0;
    double beta = 0.0;
    double beta_t = 0.0;
    double beta_p = 0.0;
    double r_squared = 0.0;
};

DeterminantFit determinant_regression(std::span<const double> performance,
                                      std::span<const double> matching);

// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double two_sided_p(double t, int dof);
// "***", "**", "*" at 0.01 / 0.05 / 0.10, else "".
std::string significance_stars(double p);

struct RelativePerformance {
    double value = 0.0;
    bool degenerate = false;
};

// (model - mv) / |mv|
RelativePerformance relative_performance(double model_he, double mv_he);

} // namespace hedgeemd
