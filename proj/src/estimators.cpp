#include "hedgeemd/estimators.hpp"

#include "hedgeemd/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace hedgeemd {

namespace {

constexpr std::size_t kMinObservations = 10;

Sample resolve(std::span<const IndexRange> sample, std::size_t n) {
    if (sample.empty()) return {IndexRange{0, n}};
    return merge_ranges(sample, n);
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size() - 1);
}

double rms_of(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

// Futures changes whose spread is negligible against the level scale make
// the slope meaningless.
void require_variation(std::span<const double> dx, double level_scale, const char* what) {
    const double var = variance_of(dx);
    const double floor = 1e-12 * level_scale;
    if (!(var > 0.0) || var <= floor * floor)
        throw Error(ErrorCode::DegenerateFutures,
                    std::string("degenerate ") + what + ": no variation in the regressor");
}

void require_count(std::size_t n, const char* what) {
    if (n < kMinObservations)
        throw Error(ErrorCode::InsufficientData,
                    std::string(what) + " needs at least 10 observations, got " +
                        std::to_string(n));
}

void require_aligned(const PriceSeries& spot, const PriceSeries& fut) {
    if (spot.timestamps() != fut.timestamps())
        throw Error(ErrorCode::Misaligned, "spot and futures timestamps differ");
}

void require_horizon(int horizon) {
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
}

std::vector<double> gather(std::span<const double> x, std::span<const IndexRange> ranges) {
    std::vector<double> out;
    for (const auto& r : ranges)
        for (std::size_t t = r.begin; t < r.end; ++t) out.push_back(x[t]);
    return out;
}

// Concatenates the segments of a SegmentedSeries into one series whose
// ranges mark the original segment boundaries.
std::pair<PriceSeries, Sample> flatten(const SegmentedSeries& s) {
    std::vector<Date> dates;
    std::vector<double> values;
    Sample ranges;
    for (const auto& seg : s.segments()) {
        const auto begin = values.size();
        dates.insert(dates.end(), seg.timestamps().begin(), seg.timestamps().end());
        values.insert(values.end(), seg.values().begin(), seg.values().end());
        ranges.push_back(IndexRange{begin, values.size()});
    }
    if (s.segments().empty())
        throw Error(ErrorCode::InsufficientData, "segmented series has no usable segment");
    const auto& first = s.segments().front();
    return {PriceSeries(first.id(), first.leg(), std::move(dates), std::move(values)),
            std::move(ranges)};
}

template <typename Fn>
HedgeEstimate on_segments(const SegmentedSeries& spot, const SegmentedSeries& fut, Fn fn) {
    if (spot.ranges() != fut.ranges())
        throw Error(ErrorCode::Misaligned, "spot and futures segments differ");
    auto [s, ranges] = flatten(spot);
    auto [f, unused] = flatten(fut);
    (void)unused;
    return fn(s, f, ranges);
}

HedgeEstimate level_regression(Method method, int horizon, std::span<const double> spot,
                               std::span<const double> fut) {
    require_count(spot.size(), "level regression");
    HedgeEstimate est;
    est.method = method;
    est.horizon = horizon;
    est.fit = ols(spot, fut);
    est.ratio = est.fit.slope();
    return est;
}

} // namespace

std::string_view to_string(Method method) {
    switch (method) {
    case Method::MV: return "MV";
    case Method::ECM: return "ECM";
    case Method::EECM: return "EECM";
    case Method::VEMD: return "VEMD";
    case Method::SEMD: return "SEMD";
    case Method::AEMD: return "AEMD";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (auto m : kAllMethods)
        if (to_string(m) == name) return m;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

bool is_emd_method(Method method) {
    return method == Method::VEMD || method == Method::SEMD || method == Method::AEMD;
}

std::string_view to_string(DecomposeScope scope) {
    return scope == DecomposeScope::Full ? "full" : "per-segment";
}

// --- conventional -----------------------------------------------------------

namespace {

HedgeEstimate mv_fit(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                     const Sample& ranges, const ConventionalOptions& options) {
    require_aligned(spot, fut);
    require_horizon(horizon);
    const auto ds = horizon_diff(spot.values(), ranges, horizon, DiffKind::LogDiff, options.stride);
    const auto df = horizon_diff(fut.values(), ranges, horizon, DiffKind::LogDiff, options.stride);
    require_count(ds.size(), "MV hedge");
    require_variation(df.values, rms_of(fut.log_values()), "futures returns");

    HedgeEstimate est;
    est.method = Method::MV;
    est.horizon = horizon;
    est.fit = ols(ds.values, df.values);
    est.ratio = est.fit.slope();
    return est;
}

} // namespace

HedgeEstimate mv_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                       std::span<const IndexRange> sample, const ConventionalOptions& options) {
    return mv_fit(spot, fut, horizon, resolve(sample, spot.size()), options);
}

HedgeEstimate mv_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut, int horizon,
                       const ConventionalOptions& options) {
    return on_segments(spot, fut, [&](const PriceSeries& s, const PriceSeries& f,
                                      const Sample& r) { return mv_fit(s, f, horizon, r, options); });
}

namespace {

HedgeEstimate ecm_fit(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                      const Sample& ranges, const ConventionalOptions& options) {
    require_aligned(spot, fut);
    require_horizon(horizon);
    const auto ds = horizon_diff(spot.values(), ranges, horizon, DiffKind::LogDiff, options.stride);
    const auto df = horizon_diff(fut.values(), ranges, horizon, DiffKind::LogDiff, options.stride);
    require_count(ds.size(), "ECM hedge");
    const auto log_s = spot.log_values();
    const auto log_f = fut.log_values();
    require_variation(df.values, rms_of(log_f), "futures returns");

    std::vector<std::vector<double>> columns{df.values};
    if (options.ecm_levels) {
        std::vector<double> lag_s, lag_f;
        for (auto t : ds.origin_index) {
            lag_s.push_back(log_s[t - static_cast<std::size_t>(horizon)]);
            lag_f.push_back(log_f[t - static_cast<std::size_t>(horizon)]);
        }
        columns.push_back(std::move(lag_s));
        columns.push_back(std::move(lag_f));
    }

    HedgeEstimate est;
    est.method = Method::ECM;
    est.horizon = horizon;
    est.fit = ols(ds.values, columns, OlsOptions{true, true});
    if (est.fit.dropped.at(1))
        throw Error(ErrorCode::SingularDesign, "futures change collinear with lagged levels");
    est.ratio = est.fit.slope();
    return est;
}

} // namespace

HedgeEstimate ecm_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                        std::span<const IndexRange> sample, const ConventionalOptions& options) {
    return ecm_fit(spot, fut, horizon, resolve(sample, spot.size()), options);
}

HedgeEstimate ecm_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut, int horizon,
                        const ConventionalOptions& options) {
    return on_segments(spot, fut, [&](const PriceSeries& s, const PriceSeries& f,
                                      const Sample& r) { return ecm_fit(s, f, horizon, r, options); });
}

namespace {

HedgeEstimate eecm_fit(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                       const Sample& ranges, const ConventionalOptions& options) {
    require_aligned(spot, fut);
    require_horizon(horizon);
    if (options.max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be >= 0");
    if (options.stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
    const auto h = static_cast<std::size_t>(horizon);
    const auto lag_cap = static_cast<std::size_t>(options.max_lag);
    const auto log_s = spot.log_values();
    const auto log_f = fut.log_values();

    // Cointegrating regression over every sample index.
    const auto& lev_s = options.levels == CointLevels::Log ? log_s : spot.values();
    const auto& lev_f = options.levels == CointLevels::Log ? log_f : fut.values();
    std::vector<double> u(spot.size(), std::numeric_limits<double>::quiet_NaN());
    if (options.eecm_residual) {
        const auto ys = gather(lev_s, ranges);
        const auto xf = gather(lev_f, ranges);
        const auto coint = ols(ys, xf);
        for (const auto& r : ranges)
            for (std::size_t t = r.begin; t < r.end; ++t)
                u[t] = lev_s[t] - coint.alpha - coint.slope() * lev_f[t];
    }

    auto dlog = [h](const std::vector<double>& lx, std::size_t t) { return lx[t] - lx[t - h]; };

    std::vector<std::size_t> obs;
    for (const auto& r : ranges) {
        const auto first = r.begin + (lag_cap + 1) * h;
        for (std::size_t t = first; t < r.end; t += static_cast<std::size_t>(options.stride))
            obs.push_back(t);
    }
    require_count(obs.size(), "EECM hedge");

    std::vector<double> y, dfut;
    for (auto t : obs) {
        y.push_back(dlog(log_s, t));
        dfut.push_back(dlog(log_f, t));
    }
    require_variation(dfut, rms_of(log_f), "futures returns");

    auto lagged = [&](const std::vector<double>& lx, std::size_t i) {
        std::vector<double> col;
        col.reserve(obs.size());
        for (auto t : obs) col.push_back(dlog(lx, t - i * h));
        return col;
    };

    std::vector<OlsFit> fits;
    std::vector<LagCandidate> candidates;
    for (int total = 0; total <= 2 * options.max_lag; ++total) {
        for (int m = std::max(0, total - options.max_lag); m <= std::min(total, options.max_lag); ++m) {
            const int n = total - m;
            std::vector<std::vector<double>> columns{dfut};
            if (options.eecm_residual) {
                std::vector<double> ulag;
                for (auto t : obs) ulag.push_back(u[t - h]);
                columns.push_back(std::move(ulag));
            }
            for (int i = 1; i <= m; ++i) columns.push_back(lagged(log_s, static_cast<std::size_t>(i)));
            for (int j = 1; j <= n; ++j) columns.push_back(lagged(log_f, static_cast<std::size_t>(j)));
            fits.push_back(ols(y, columns));
            candidates.push_back({m, n, fits.back().aic});
        }
    }
    const auto pick = select_lag_order(candidates);
    HedgeEstimate best;
    best.fit = std::move(fits[pick]);
    best.lags = std::make_pair(candidates[pick].m, candidates[pick].n);
    best.method = Method::EECM;
    best.horizon = horizon;
    best.ratio = best.fit.slope();
    return best;
}

} // namespace

HedgeEstimate eecm_ratio(const PriceSeries& spot, const PriceSeries& fut, int horizon,
                         std::span<const IndexRange> sample, const ConventionalOptions& options) {
    return eecm_fit(spot, fut, horizon, resolve(sample, spot.size()), options);
}

std::size_t select_lag_order(std::span<const LagCandidate> candidates) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no lag candidates");
    auto key = [](const LagCandidate& c) { return std::make_tuple(c.aic, c.m + c.n, c.m); };
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (key(candidates[i]) < key(candidates[best])) best = i;
    return best;
}

HedgeEstimate eecm_ratio(const SegmentedSeries& spot, const SegmentedSeries& fut, int horizon,
                         const ConventionalOptions& options) {
    return on_segments(spot, fut, [&](const PriceSeries& s, const PriceSeries& f,
                                      const Sample& r) { return eecm_fit(s, f, horizon, r, options); });
}

// --- EMD family -------------------------------------------------------------

std::vector<ImfPair> ImfPairing::with_residue() const {
    auto out = pairs;
    out.push_back(residue);
    return out;
}

ImfPairing pair_imfs(const ImfSet& spot_set, const ImfSet& fut_set) {
    if (spot_set.source_len == 0 || spot_set.source_len != fut_set.source_len)
        throw Error(ErrorCode::Misaligned, "IMF sets cover different sample lengths");
    ImfPairing out;
    const auto common = std::min(spot_set.size(), fut_set.size());
    for (std::size_t i = 0; i < common; ++i) {
        const auto& s = spot_set.imfs[i];
        const auto& f = fut_set.imfs[i];
        out.pairs.push_back(ImfPair{static_cast<int>(i) + 1, false, s.values, f.values, s.cycle, f.cycle});
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.residue = ImfPair{static_cast<int>(common) + 1, true, spot_set.residue, fut_set.residue, nan, nan};
    out.surplus_spot = static_cast<int>(spot_set.size() - common);
    out.surplus_fut = static_cast<int>(fut_set.size() - common);
    if (out.surplus_spot > 0)
        out.warnings.push_back(std::to_string(out.surplus_spot) + " spot IMF(s) without a futures partner");
    if (out.surplus_fut > 0)
        out.warnings.push_back(std::to_string(out.surplus_fut) + " futures IMF(s) without a spot partner");
    return out;
}

HedgeEstimate vemd_ratio(const ImfPair& pair, int horizon, std::span<const IndexRange> sample,
                         int stride) {
    require_horizon(horizon);
    if (pair.spot.size() != pair.fut.size())
        throw Error(ErrorCode::Misaligned, "IMF pair lengths differ");
    const auto ranges = resolve(sample, pair.spot.size());
    const auto ds = horizon_diff(pair.spot, ranges, horizon, DiffKind::LevelDiff, stride);
    const auto df = horizon_diff(pair.fut, ranges, horizon, DiffKind::LevelDiff, stride);
    require_count(ds.size(), "VEMD hedge");
    require_variation(df.values, rms_of(gather(pair.fut, ranges)), "futures IMF changes");

    HedgeEstimate est;
    est.method = Method::VEMD;
    est.horizon = horizon;
    est.imf_index = pair.index;
    est.fit = ols(ds.values, df.values);
    est.ratio = est.fit.slope();
    return est;
}

HedgeEstimate semd_ratio(const ImfPair& pair, std::span<const IndexRange> sample) {
    if (pair.spot.size() != pair.fut.size())
        throw Error(ErrorCode::Misaligned, "IMF pair lengths differ");
    const auto ranges = resolve(sample, pair.spot.size());
    const int horizon = std::isfinite(pair.cycle_spot)
                            ? static_cast<int>(std::max(1L, std::lround(pair.cycle_spot)))
                            : 1;
    auto est = level_regression(Method::SEMD, horizon, gather(pair.spot, ranges),
                                gather(pair.fut, ranges));
    est.imf_index = pair.index;
    return est;
}

int qualifying_imf_count(const ImfSet& set, int horizon) {
    int n = 0;
    for (const auto& imf : set.imfs)
        if (std::lround(imf.cycle) <= horizon) ++n;
    return n;
}

std::optional<std::vector<double>> aggregate_imfs(const ImfSet& set, int horizon) {
    std::optional<std::vector<double>> sum;
    for (const auto& imf : set.imfs) {
        if (std::lround(imf.cycle) > horizon) continue;
        if (!sum) {
            sum = imf.values;
        } else {
            for (std::size_t t = 0; t < sum->size(); ++t) (*sum)[t] += imf.values[t];
        }
    }
    return sum;
}

HedgeEstimate aemd_ratio(const ImfSet& spot_set, const ImfSet& fut_set, int horizon,
                         std::span<const IndexRange> sample) {
    require_horizon(horizon);
    if (spot_set.source_len != fut_set.source_len)
        throw Error(ErrorCode::Misaligned, "IMF sets cover different sample lengths");
    const auto s = aggregate_imfs(spot_set, horizon);
    if (!s)
        throw Error(ErrorCode::EmptyAggregate,
                    "no spot IMF with cycle within horizon " + std::to_string(horizon));
    const auto f = aggregate_imfs(fut_set, horizon);
    if (!f)
        throw Error(ErrorCode::EmptyAggregate,
                    "no futures IMF with cycle within horizon " + std::to_string(horizon));
    const auto ranges = resolve(sample, spot_set.source_len);
    auto est = level_regression(Method::AEMD, horizon, gather(*s, ranges), gather(*f, ranges));
    est.imf_index = qualifying_imf_count(spot_set, horizon);
    return est;
}

int imf_for_horizon(const ImfSet& set, int horizon) {
    if (set.imfs.empty()) throw Error(ErrorCode::InsufficientData, "decomposition has no IMFs");
    int best = 1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& imf : set.imfs) {
        const double gap = std::abs(imf.cycle - static_cast<double>(horizon));
        if (gap < best_gap) {
            best_gap = gap;
            best = imf.index;
        }
    }
    return best;
}

int canonical_horizon(const Imf& imf) {
    return static_cast<int>(std::max(1L, std::lround(imf.cycle)));
}

// --- engine -----------------------------------------------------------------

HedgeEngine::HedgeEngine(PriceSeries spot, PriceSeries fut, EstimatorConfig config,
                         bool with_decomposition)
    : spot_(std::move(spot)), fut_(std::move(fut)), config_(std::move(config)) {
    require_aligned(spot_, fut_);
    config_.sift.validate();
    if (with_decomposition) {
        spot_set_ = decompose(spot_.values(), config_.sift);
        fut_set_ = decompose(fut_.values(), config_.sift);
    }
}

const ImfSet& HedgeEngine::spot_set() const {
    if (!spot_set_) throw Error(ErrorCode::InvalidArgument, "engine built without decomposition");
    return *spot_set_;
}

const ImfSet& HedgeEngine::fut_set() const {
    if (!fut_set_) throw Error(ErrorCode::InvalidArgument, "engine built without decomposition");
    return *fut_set_;
}

HedgeEstimate HedgeEngine::estimate(Method method, int horizon, std::span<const IndexRange> sample,
                                    std::optional<int> imf_index) const {
    const auto& opts = config_.conventional;
    switch (method) {
    case Method::MV: return mv_ratio(spot_, fut_, horizon, sample, opts);
    case Method::ECM: return ecm_ratio(spot_, fut_, horizon, sample, opts);
    case Method::EECM: return eecm_ratio(spot_, fut_, horizon, sample, opts);
    default: break;
    }
    if (config_.scope == DecomposeScope::PerSegment)
        return estimate_emd_per_segment(method, horizon, sample, imf_index);
    return estimate_emd(method, horizon, sample, imf_index);
}

HedgeEstimate HedgeEngine::estimate_emd(Method method, int horizon,
                                        std::span<const IndexRange> sample,
                                        std::optional<int> imf_index) const {
    const auto& s = spot_set();
    const auto& f = fut_set();
    if (method == Method::AEMD) return aemd_ratio(s, f, horizon, sample);

    const int index = imf_index.value_or(imf_for_horizon(s, horizon));
    const auto pairing = pair_imfs(s, f);
    if (index < 1 || index > static_cast<int>(pairing.pairs.size()))
        throw Error(ErrorCode::InsufficientData,
                    "IMF " + std::to_string(index) + " has no spot/futures pair");
    const auto& pair = pairing.pairs[static_cast<std::size_t>(index - 1)];
    auto est = method == Method::VEMD ? vemd_ratio(pair, horizon, sample, config_.conventional.stride)
                                      : semd_ratio(pair, sample);
    est.horizon = horizon;
    return est;
}

HedgeEstimate HedgeEngine::estimate_emd_per_segment(Method method, int horizon,
                                                    std::span<const IndexRange> sample,
                                                    std::optional<int> imf_index) const {
    const auto ranges = resolve(sample, spot_.size());
    ImfPair pooled;
    pooled.index = imf_index.value_or(0);
    Sample pooled_ranges;
    for (const auto& r : ranges) {
        if (r.size() < 8) {
            continue;
        }
        const std::span<const double> sv(spot_.values().data() + r.begin, r.size());
        const std::span<const double> fv(fut_.values().data() + r.begin, r.size());
        const auto sset = decompose(sv, config_.sift);
        const auto fset = decompose(fv, config_.sift);
        std::vector<double> a, b;
        if (method == Method::AEMD) {
            auto sa = aggregate_imfs(sset, horizon);
            auto fa = aggregate_imfs(fset, horizon);
            if (!sa || !fa) {
                continue;
            }
            a = std::move(*sa);
            b = std::move(*fa);
        } else {
            if (sset.imfs.empty() || fset.imfs.empty()) {
                continue;
            }
            const int idx = imf_index.value_or(imf_for_horizon(sset, horizon));
            if (idx < 1 || idx > static_cast<int>(std::min(sset.size(), fset.size()))) {
                continue;
            }
            a = sset.imfs[static_cast<std::size_t>(idx - 1)].values;
            b = fset.imfs[static_cast<std::size_t>(idx - 1)].values;
        }
        const auto begin = pooled.spot.size();
        pooled.spot.insert(pooled.spot.end(), a.begin(), a.end());
        pooled.fut.insert(pooled.fut.end(), b.begin(), b.end());
        pooled_ranges.push_back(IndexRange{begin, pooled.spot.size()});
    }
    if (pooled_ranges.empty())
        throw Error(method == Method::AEMD ? ErrorCode::EmptyAggregate : ErrorCode::InsufficientData,
                    "no training segment yields a usable decomposition");

    HedgeEstimate est;
    if (method == Method::VEMD) {
        est = vemd_ratio(pooled, horizon, pooled_ranges, config_.conventional.stride);
    } else {
        est = level_regression(method, horizon, pooled.spot, pooled.fut);
    }
    est.method = method;
    est.horizon = horizon;
    if (pooled.index > 0) est.imf_index = pooled.index;
    return est;
}

} // namespace hedgeemd
