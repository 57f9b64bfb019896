#include "hedgeemd/error.hpp"
#include "hedgeemd/estimators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace hedgeemd {

namespace {

// Pivots below this fraction of the largest one (after scaling every
// column to unit norm) mark the design as rank deficient.
constexpr double kRankThreshold = 1e-10;

struct Solved {
    Eigen::VectorXd coef;
    Eigen::VectorXd inv_diag;  // diag((X'X)^-1)
};

Solved solve_full_rank(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd scale(x.cols());
    Eigen::MatrixXd xs = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double norm = x.col(j).norm();
        scale(j) = norm > 0.0 ? norm : 1.0;
        xs.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    Eigen::VectorXd coef_s = qr.solve(y);

    const auto p = x.cols();
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd inv_perm = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation().indices();

    Solved out{Eigen::VectorXd(p), Eigen::VectorXd(p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        out.coef(j) = coef_s(j) / scale(j);
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto col = perm(j);
        out.inv_diag(col) = inv_perm(j, j) / (scale(col) * scale(col));
    }
    return out;
}

// Indices of the columns that survive pivoted QR on the scaled design.
std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd xs = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double norm = x.col(j).norm();
        if (norm > 0.0) xs.col(j) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(kRankThreshold);
    const auto rank = qr.rank();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < rank; ++j) kept.push_back(qr.colsPermutation().indices()(j));
    std::sort(kept.begin(), kept.end());
    return kept;
}

} // namespace

OlsFit ols(std::span<const double> y, const std::vector<std::vector<double>>& columns,
           const OlsOptions& options) {
    const auto n = y.size();
    const auto k = columns.size();
    const auto p = k + (options.intercept ? 1 : 0);
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "regression without regressors");
    for (const auto& c : columns)
        if (c.size() != n) throw Error(ErrorCode::Misaligned, "regressor length mismatch");
    if (n <= k + 1)
        throw Error(ErrorCode::InsufficientData,
                    "regression needs more than " + std::to_string(k + 1) + " observations, got " +
                        std::to_string(n));

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::VectorXd yy(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index col = 0;
        if (options.intercept) x(static_cast<Eigen::Index>(i), col++) = 1.0;
        for (const auto& c : columns) x(static_cast<Eigen::Index>(i), col++) = c[i];
        yy(static_cast<Eigen::Index>(i)) = y[i];
    }
    if (!x.allFinite() || !yy.allFinite())
        throw Error(ErrorCode::InvalidArgument, "non-finite regression input");

    auto kept = independent_columns(x);
    if (kept.size() < p && !options.drop_collinear)
        throw Error(ErrorCode::SingularDesign, "singular regression design");
    if (kept.empty()) throw Error(ErrorCode::SingularDesign, "singular regression design");

    Eigen::MatrixXd xk(x.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j)
        xk.col(static_cast<Eigen::Index>(j)) = x.col(kept[j]);
    const auto solved = solve_full_rank(xk, yy);

    std::vector<double> coef(p, 0.0), inv_diag(p, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> dropped(p, true);
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const auto col = static_cast<std::size_t>(kept[j]);
        coef[col] = solved.coef(static_cast<Eigen::Index>(j));
        inv_diag[col] = solved.inv_diag(static_cast<Eigen::Index>(j));
        dropped[col] = false;
    }

    OlsFit fit;
    fit.intercept = options.intercept;
    fit.n_obs = n;
    fit.n_params = static_cast<int>(kept.size());
    const Eigen::VectorXd resid = yy - xk * solved.coef;
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    fit.sse = resid.squaredNorm();

    double total = 0.0;
    if (options.intercept) {
        const double mean = yy.mean();
        total = (yy.array() - mean).square().sum();
    } else {
        total = yy.squaredNorm();
    }
    if (total > 0.0) {
        fit.r_squared = 1.0 - fit.sse / total;
        if (fit.r_squared < 0.0 && options.intercept) fit.r_squared = 0.0;
    } else {
        fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    }

    const double nd = static_cast<double>(n);
    fit.aic = fit.sse > 0.0 ? nd * std::log(fit.sse / nd) + 2.0 * fit.n_params
                            : -std::numeric_limits<double>::infinity();

    const double s2 = fit.sse / static_cast<double>(fit.dof());
    fit.std_errors.resize(p);
    fit.t_stats.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        fit.std_errors[j] = std::sqrt(s2 * inv_diag[j]);
        fit.t_stats[j] = coef[j] / fit.std_errors[j];
    }
    std::size_t offset = 0;
    if (options.intercept) {
        fit.alpha = coef[0];
        offset = 1;
    }
    fit.beta.assign(coef.begin() + static_cast<std::ptrdiff_t>(offset), coef.end());
    fit.dropped = std::move(dropped);
    return fit;
}

OlsFit ols(std::span<const double> y, std::span<const double> x, const OlsOptions& options) {
    return ols(y, std::vector<std::vector<double>>{{x.begin(), x.end()}}, options);
}

} // namespace hedgeemd
