#include "hedgeemd/emd.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace hedgeemd {

namespace {

double rms(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Knots for one envelope: the extrema themselves plus up to `mirror`
// extrema reflected about each end sample.
void envelope_knots(std::span<const double> x, const std::vector<std::size_t>& idx,
                    int mirror, std::vector<double>& knots, std::vector<double>& values) {
    const auto n = static_cast<double>(x.size());
    const auto m = std::min<std::size_t>(static_cast<std::size_t>(mirror), idx.size());
    knots.clear();
    values.clear();
    for (std::size_t k = m; k-- > 0;) {
        knots.push_back(-static_cast<double>(idx[k]));
        values.push_back(x[idx[k]]);
    }
    for (auto i : idx) {
        knots.push_back(static_cast<double>(i));
        values.push_back(x[i]);
    }
    for (std::size_t k = 0; k < m; ++k) {
        const auto i = idx[idx.size() - 1 - k];
        knots.push_back(2.0 * (n - 1.0) - static_cast<double>(i));
        values.push_back(x[i]);
    }
}

} // namespace

void SiftConfig::validate() const {
    if (!(envelope_tolerance > 0.0 && envelope_tolerance < 1.0))
        throw Error(ErrorCode::InvalidArgument, "envelope_tolerance must lie in (0, 1)");
    if (max_sifts_per_imf < 1 || max_imfs < 1 || boundary_mirror_count < 1)
        throw Error(ErrorCode::InvalidArgument, "sift limits must be positive");
}

Extrema find_extrema(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorCode::InsufficientData, "extrema need at least 3 samples");

    Extrema out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] == x[i - 1]) {
            // flat run starting at the left edge: no left neighbour to beat
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;
        const std::size_t mid = i + (j - i) / 2;
        if (x[i] > x[i - 1] && x[j + 1] < x[i])
            out.maxima.push_back(mid);
        else if (x[i] < x[i - 1] && x[j + 1] > x[i])
            out.minima.push_back(mid);
        i = j + 1;
    }

    int last = 0;
    for (double v : x) {
        const int s = sign(v);
        if (s == 0) continue;
        if (last != 0 && s != last) ++out.zero_crossings;
        last = s;
    }
    return out;
}

std::vector<double> natural_cubic_spline(std::span<const double> knots,
                                         std::span<const double> values,
                                         std::size_t n) {
    const std::size_t k = knots.size();
    if (k < 2 || values.size() != k)
        throw Error(ErrorCode::InvalidArgument, "spline needs at least 2 knots");
    for (std::size_t i = 1; i < k; ++i)
        if (!(knots[i] > knots[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "spline knots must increase");

    // Second derivatives M_i with M_0 = M_{k-1} = 0 (Thomas algorithm).
    std::vector<double> second(k, 0.0);
    if (k > 2) {
        const std::size_t m = k - 2;
        std::vector<double> diag(m), upper(m), rhs(m);
        for (std::size_t i = 1; i + 1 < k; ++i) {
            const double h0 = knots[i] - knots[i - 1];
            const double h1 = knots[i + 1] - knots[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((values[i + 1] - values[i]) / h1 -
                                (values[i] - values[i - 1]) / h0);
        }
        for (std::size_t i = 1; i < m; ++i) {
            const double lower = knots[i + 1] - knots[i];
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        second[m] = rhs[m - 1] / diag[m - 1];
        for (std::size_t i = m - 1; i-- > 0;)
            second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
    }

    auto slope_at = [&](std::size_t seg, bool right_end) {
        const double h = knots[seg + 1] - knots[seg];
        const double base = (values[seg + 1] - values[seg]) / h;
        return right_end ? base + h * (2.0 * second[seg + 1] + second[seg]) / 6.0
                         : base - h * (2.0 * second[seg] + second[seg + 1]) / 6.0;
    };

    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double pos = static_cast<double>(t);
        if (pos <= knots.front()) {
            out[t] = values.front() + slope_at(0, false) * (pos - knots.front());
            continue;
        }
        if (pos >= knots.back()) {
            out[t] = values.back() + slope_at(k - 2, true) * (pos - knots.back());
            continue;
        }
        while (pos > knots[seg + 1]) ++seg;
        const double h = knots[seg + 1] - knots[seg];
        const double a = (knots[seg + 1] - pos) / h;
        const double b = (pos - knots[seg]) / h;
        out[t] = a * values[seg] + b * values[seg + 1] +
                 ((a * a * a - a) * second[seg] + (b * b * b - b) * second[seg + 1]) *
                     h * h / 6.0;
    }
    return out;
}

std::optional<std::vector<double>> envelope_mean(std::span<const double> x,
                                                 const Extrema& extrema, int mirror) {
    if (extrema.maxima.size() < 2 || extrema.minima.size() < 2) return std::nullopt;
    std::vector<double> knots, values;
    envelope_knots(x, extrema.maxima, mirror, knots, values);
    auto upper = natural_cubic_spline(knots, values, x.size());
    envelope_knots(x, extrema.minima, mirror, knots, values);
    const auto lower = natural_cubic_spline(knots, values, x.size());
    for (std::size_t t = 0; t < upper.size(); ++t) upper[t] = 0.5 * (upper[t] + lower[t]);
    return upper;
}

std::optional<std::vector<double>> envelope_mean(std::span<const double> x, int mirror) {
    return envelope_mean(x, find_extrema(x), mirror);
}

ImfCheck is_imf(std::span<const double> x, double envelope_tolerance, int mirror) {
    const auto ex = find_extrema(x);
    ImfCheck out;
    out.n_maxima = ex.maxima.size();
    out.n_minima = ex.minima.size();
    out.n_zero_crossings = ex.zero_crossings;
    const auto mean = envelope_mean(x, ex, mirror);
    if (!mean) {
        out.envelope_ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    const double scale = rms(x);
    out.envelope_ratio = scale > 0.0 ? rms(*mean) / scale
                                     : std::numeric_limits<double>::infinity();
    const auto diff = static_cast<long long>(ex.count()) -
                      static_cast<long long>(ex.zero_crossings);
    out.is_imf = std::llabs(diff) <= 1 && out.envelope_ratio <= envelope_tolerance;
    return out;
}

SiftResult sift(std::span<const double> x, const SiftConfig& cfg) {
    SiftResult out;
    out.values.assign(x.begin(), x.end());
    auto& h = out.values;
    while (true) {
        const auto ex = find_extrema(h);
        const auto mean = envelope_mean(h, ex, cfg.boundary_mirror_count);
        if (!mean) {
            out.residue_like = true;
            return out;
        }
        const auto diff = static_cast<long long>(ex.count()) -
                          static_cast<long long>(ex.zero_crossings);
        const double scale = rms(h);
        if (std::llabs(diff) <= 1 && scale > 0.0 &&
            rms(*mean) <= cfg.envelope_tolerance * scale) {
            out.converged = true;
            return out;
        }
        if (out.sifts >= cfg.max_sifts_per_imf) return out;
        for (std::size_t t = 0; t < h.size(); ++t) h[t] -= (*mean)[t];
        ++out.sifts;
    }
}

bool is_monotone(std::span<const double> x) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] < x[i - 1]) up = false;
        if (x[i] > x[i - 1]) down = false;
    }
    return up || down;
}

double cycle(std::size_t n_maxima, std::size_t n_minima, std::size_t series_len) {
    const auto extrema = n_maxima + n_minima;
    if (extrema < 2)
        throw Error(ErrorCode::UndefinedCycle,
                    "cycle undefined with " + std::to_string(extrema) + " extrema");
    return static_cast<double>(series_len) / static_cast<double>(extrema - 1) * 2.0;
}

double cycle(const Imf& imf, std::size_t series_len) {
    return cycle(imf.n_maxima, imf.n_minima, series_len);
}

std::vector<double> ImfSet::reconstruct() const {
    std::vector<double> out = residue;
    for (const auto& imf : imfs)
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += imf.values[t];
    return out;
}

ImfSet decompose(std::span<const double> x, const SiftConfig& cfg) {
    cfg.validate();
    if (x.size() < 8)
        throw Error(ErrorCode::InsufficientData, "decomposition needs at least 8 samples");

    ImfSet out;
    out.source_len = x.size();
    out.residue.assign(x.begin(), x.end());
    auto& r = out.residue;

    while (static_cast<int>(out.imfs.size()) < cfg.max_imfs) {
        const auto ex = find_extrema(r);
        if (ex.maxima.size() < 2 || ex.minima.size() < 2 || is_monotone(r)) break;
        auto sifted = sift(r, cfg);
        if (sifted.residue_like) break;

        Imf imf;
        imf.values = std::move(sifted.values);
        imf.index = static_cast<int>(out.imfs.size()) + 1;
        imf.sifts = sifted.sifts;
        imf.converged = sifted.converged;
        const auto imf_ex = find_extrema(imf.values);
        imf.n_maxima = imf_ex.maxima.size();
        imf.n_minima = imf_ex.minima.size();
        imf.n_zero_crossings = imf_ex.zero_crossings;
        imf.cycle = cycle(imf, out.source_len);
        for (std::size_t t = 0; t < r.size(); ++t) r[t] -= imf.values[t];
        out.imfs.push_back(std::move(imf));
    }
    return out;
}

} // namespace hedgeemd
