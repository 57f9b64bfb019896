#include "hedgeemd/analysis.hpp"

#include "hedgeemd/error.hpp"
#include "hedgeemd/performance.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hedgeemd {

std::vector<VarianceRow> variance_decomposition(const ImfSet& logret_set, Leg leg) {
    const auto source = logret_set.reconstruct();
    if (source.size() < 2) throw Error(ErrorCode::InsufficientData, "series too short");
    const double total = sample_variance(source);
    if (!(total > 0.0)) throw Error(ErrorCode::SingularDesign, "source series has zero variance");

    std::vector<VarianceRow> rows;
    for (const auto& imf : logret_set.imfs) {
        const double v = sample_variance(imf.values);
        rows.push_back(VarianceRow{imf.index, false, leg, v, 100.0 * v / total});
    }
    const double vr = sample_variance(logret_set.residue);
    rows.push_back(VarianceRow{static_cast<int>(logret_set.size()) + 1, true, leg, vr,
                               100.0 * vr / total});
    return rows;
}

std::vector<MatchRow> matching_degree(std::span<const ImfPair> pairs) {
    std::vector<MatchRow> rows;
    for (const auto& p : pairs) {
        // a residue sifted away to a constant has no slope to report
        if (std::all_of(p.fut.begin(), p.fut.end(), [&](double v) { return v == p.fut.front(); })) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            rows.push_back(MatchRow{p.index, p.is_residue, nan, nan, p.cycle_spot, p.cycle_fut});
            continue;
        }
        const auto fit = ols(p.spot, p.fut);
        rows.push_back(MatchRow{p.index, p.is_residue, fit.slope(), fit.r_squared, p.cycle_spot,
                                p.cycle_fut});
    }
    return rows;
}

double two_sided_p(double t, int dof) {
    if (dof < 1 || std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(static_cast<double>(dof));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

std::string significance_stars(double p) {
    if (std::isnan(p)) return "";
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

DeterminantFit determinant_regression(std::span<const double> performance,
                                      std::span<const double> matching) {
    if (performance.size() != matching.size())
        throw Error(ErrorCode::Misaligned, "performance and matching lengths differ");
    if (performance.size() < 3)
        throw Error(ErrorCode::InsufficientData, "determinant regression needs 3 observations");

    DeterminantFit out;
    out.n = performance.size();
    const auto origin = ols(performance, matching, OlsOptions{false, false});
    out.origin_beta = origin.slope();
    out.origin_beta_t = origin.t_stats.at(0);
    out.origin_beta_p = two_sided_p(out.origin_beta_t, origin.dof());
    out.origin_r_squared = origin.r_squared;

    const auto affine = ols(performance, matching);
    out.alpha = affine.alpha;
    out.alpha_t = affine.t_stats.at(0);
    out.alpha_p = two_sided_p(out.alpha_t, affine.dof());
    out.beta = affine.slope();
    out.beta_t = affine.t_stats.at(1);
    out.beta_p = two_sided_p(out.beta_t, affine.dof());
    out.r_squared = affine.r_squared;
    return out;
}

RelativePerformance relative_performance(double model_he, double mv_he) {
    if (!(std::abs(mv_he) > 1e-12))
        return {std::numeric_limits<double>::quiet_NaN(), true};
    return {(model_he - mv_he) / std::abs(mv_he), false};
}

} // namespace hedgeemd
