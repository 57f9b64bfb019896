#include "support.hpp"

#include "hedgeemd/estimators.hpp"

#include <algorithm>
#include <thread>

using namespace hedgeemd;
using fixture::error_of;

namespace {

// Normal equations solved by Gauss-Jordan in long double.
struct NormalFit {
    std::vector<double> coef;
    std::vector<double> se;
};

NormalFit normal_equations(const std::vector<double>& y, const std::vector<std::vector<double>>& cols) {
    const std::size_t n = y.size(), p = cols.size() + 1;
    auto x = [&](std::size_t i, std::size_t j) -> long double { return j == 0 ? 1.0L : cols[j - 1][i]; };
    std::vector<std::vector<long double>> a(p, std::vector<long double>(2 * p + 1, 0.0L));
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < p; ++c)
            for (std::size_t i = 0; i < n; ++i) a[r][c] += x(i, r) * x(i, c);
        for (std::size_t i = 0; i < n; ++i) a[r][2 * p] += x(i, r) * y[i];
        a[r][p + r] = 1.0L;
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        const long double d = a[c][c];
        for (auto& v : a[c]) v /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            for (std::size_t k = 0; k < a[r].size(); ++k) a[r][k] -= f * a[c][k];
        }
    }
    NormalFit out;
    long double sse = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double fitted = 0.0L;
        for (std::size_t j = 0; j < p; ++j) fitted += a[j][2 * p] * x(i, j);
        sse += (y[i] - fitted) * (y[i] - fitted);
    }
    const long double s2 = sse / static_cast<long double>(n - p);
    for (std::size_t j = 0; j < p; ++j) {
        out.coef.push_back(static_cast<double>(a[j][2 * p]));
        out.se.push_back(static_cast<double>(std::sqrt(s2 * a[j][p + j])));
    }
    return out;
}

PriceSeries exp_series(const std::vector<double>& logs, Leg leg) {
    std::vector<double> v;
    for (double l : logs) v.push_back(std::exp(l));
    return fixture::series(v, leg);
}

ImfSet fake_set(int count, std::size_t len, std::uint64_t seed) {
    ImfSet set;
    set.source_len = len;
    for (int i = 0; i < count; ++i) {
        Imf imf;
        imf.index = i + 1;
        imf.values = fixture::sine(len, 4.0 * std::pow(2.0, i), 1.0);
        imf.cycle = 4.0 * std::pow(2.0, i);
        set.imfs.push_back(std::move(imf));
    }
    set.residue = fixture::normals(len, seed);
    return set;
}

SynthSpec coint_spec(std::uint64_t seed, std::size_t length = 2000) {
    SynthSpec spec;
    spec.length = length;
    spec.seed = seed;
    spec.coint = CointSpec{};
    return spec;
}

} // namespace

TEST_SUITE("estimators") {

TEST_CASE("ols exact fits") {
    std::vector<double> x(20), y(20), z(20);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i) * 0.5 - 3.0;
        y[i] = x[i];
        z[i] = 2.0 * x[i] + 1.0;
    }
    auto a = ols(y, x);
    CHECK(a.slope() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(a.alpha) < 1e-14);
    CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    auto b = ols(z, x);
    CHECK(b.slope() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.r_squared == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ols matches the normal equations") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CAPTURE(seed);
        const auto x1 = fixture::normals(50, seed * 3 + 1);
        const auto x2 = fixture::normals(50, seed * 3 + 2);
        const auto e = fixture::normals(50, seed * 3 + 3, 0.5);
        std::vector<double> y(50);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.3 + 1.7 * x1[i] - 0.8 * x2[i] + e[i];
        const std::vector<std::vector<double>> cols{x1, x2};
        const auto fit = ols(y, cols);
        const auto ref = normal_equations(y, cols);
        CHECK(std::abs(fit.alpha - ref.coef[0]) < 1e-8);
        CHECK(std::abs(fit.beta[0] - ref.coef[1]) < 1e-8);
        CHECK(std::abs(fit.beta[1] - ref.coef[2]) < 1e-8);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::abs(fit.std_errors[j] - ref.se[j]) < 1e-8);
            CHECK(fit.t_stats[j] == doctest::Approx(ref.coef[j] / ref.se[j]).epsilon(1e-8));
        }
        CHECK(fit.n_params == 3);
        CHECK(fit.dof() == 47);
        CHECK(fit.aic == doctest::Approx(50.0 * std::log(fit.sse / 50.0) + 6.0).epsilon(1e-12));
        CHECK(fit.r_squared >= 0.0);
        CHECK(fit.r_squared <= 1.0);
    }
}

TEST_CASE("single-regressor slope is cov / var") {
    const auto x = fixture::normals(300, 21);
    const auto e = fixture::normals(300, 22);
    std::vector<double> y(300);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.4 * x[i] + e[i];
    CHECK(std::abs(ols(y, x).slope() - fixture::cov(y, x) / fixture::cov(x, x)) < 1e-12);
}

TEST_CASE("ols through the origin uses the uncentred R2") {
    const auto x = fixture::normals(100, 31);
    const auto e = fixture::normals(100, 32, 0.3);
    std::vector<double> y(100);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 2.0 + 0.5 * x[i] + e[i];
    auto fit = ols(y, x, OlsOptions{false, false});
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    CHECK(fit.slope() == doctest::Approx(sxy / sxx).epsilon(1e-12));
    CHECK(fit.alpha == 0.0);
    CHECK(fit.r_squared == doctest::Approx(1.0 - fit.sse / syy).epsilon(1e-12));
    CHECK(fit.std_errors.size() == 1);
}

TEST_CASE("ols failures") {
    const auto x = fixture::normals(30, 41);
    std::vector<double> y(30, 1.0);
    const std::vector<std::vector<double>> dup{x, x};
    CHECK(error_of([&] { ols(y, dup); }) == ErrorCode::SingularDesign);
    const std::vector<double> flat(30, 2.0);
    CHECK(error_of([&] { ols(y, flat); }) == ErrorCode::SingularDesign);
    CHECK(error_of([&] { ols(std::vector<double>{1, 2}, std::vector<double>{1, 3}); }) ==
          ErrorCode::InsufficientData);

    std::vector<double> twice(x);
    for (auto& v : twice) v *= 2.0;
    const auto e = fixture::normals(30, 42);
    std::vector<double> z(30);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + e[i];
    auto fit = ols(z, {x, twice}, OlsOptions{true, true});
    CHECK(fit.dropped == std::vector<bool>{false, false, true});
    CHECK(fit.beta[1] == 0.0);
    CHECK(std::isnan(fit.t_stats[2]));
    CHECK(fit.slope() == doctest::Approx(ols(z, x).slope()).epsilon(1e-10));
    CHECK(fit.n_params == 2);
}

TEST_CASE("mv examples") {
    // dlog S = 2 dlog F exactly
    const auto steps = fixture::normals(200, 51, 0.01);
    std::vector<double> lf(200), ls(200);
    for (std::size_t t = 1; t < 200; ++t) {
        lf[t] = lf[t - 1] + steps[t];
        ls[t] = ls[t - 1] + 2.0 * steps[t];
    }
    auto est = mv_ratio(exp_series(ls, Leg::Spot), exp_series(lf, Leg::Futures), 1);
    CHECK(est.ratio == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(est.fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(est.method == Method::MV);

    // spot changes orthogonal to futures changes by construction: 50 whole
    // blocks of (+,-,+,-) against (-,+,+,-)
    std::vector<double> ls2(201);
    for (std::size_t t = 1; t < 201; ++t) ls2[t] = ls2[t - 1] + (t % 2 ? 0.01 : -0.01);
    std::vector<double> lf2(201);
    for (std::size_t t = 1; t < 201; ++t) lf2[t] = lf2[t - 1] + ((t / 2) % 2 ? 0.01 : -0.01);
    const auto ds = horizon_diff(exp_series(ls2, Leg::Spot), 1, DiffKind::LogDiff);
    const auto df = horizon_diff(exp_series(lf2, Leg::Futures), 1, DiffKind::LogDiff);
    REQUIRE(std::abs(fixture::cov(ds.values, df.values)) < 1e-15);
    auto zero = mv_ratio(exp_series(ls2, Leg::Spot), exp_series(lf2, Leg::Futures), 1);
    CHECK(std::abs(zero.ratio) < 1e-10);

    const std::vector<double> flat(200, 50.0);
    CHECK(error_of([&] {
              mv_ratio(exp_series(ls, Leg::Spot), fixture::series(flat, Leg::Futures), 1);
          }) == ErrorCode::DegenerateFutures);
}

TEST_CASE("mv on the cointegrated generator") {
    auto pair = gen_coint_pair(coint_spec(3));
    auto est = mv_ratio(pair.spot, pair.fut, 1);
    CHECK(est.ratio >= 0.85);
    CHECK(est.ratio <= 0.95);
}

TEST_CASE("mv on a segmented series pools within-segment differences") {
    auto pair = gen_coint_pair(coint_spec(8, 600));
    const std::vector<IndexRange> groups{{0, 100}, {250, 400}, {500, 600}};
    auto seg = mv_ratio(restrict(pair.spot, groups), restrict(pair.fut, groups), 3);
    auto direct = mv_ratio(pair.spot, pair.fut, 3, groups);
    CHECK(seg.ratio == direct.ratio);
    CHECK(seg.fit.n_obs == 97 + 147 + 97);
}

TEST_CASE("ecm on identical legs") {
    const auto w = fixture::walk(300, 61);
    auto est = ecm_ratio(fixture::series(w, Leg::Spot), fixture::series(w, Leg::Futures), 1);
    CHECK(est.ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(est.fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    // the two level terms are one column; one of them drops out
    CHECK(est.fit.dropped[2] != est.fit.dropped[3]);
    const double net = est.fit.beta[1] + est.fit.beta[2];
    CHECK(std::abs(net) < 1e-8);
}

TEST_CASE("restricted ecm is mv") {
    auto pair = gen_coint_pair(coint_spec(12, 800));
    ConventionalOptions restricted;
    restricted.ecm_levels = false;
    for (int h : {1, 5, 20})
        CHECK(ecm_ratio(pair.spot, pair.fut, h, {}, restricted).ratio == mv_ratio(pair.spot, pair.fut, h).ratio);
}

TEST_CASE("ecm recovers the long-run slope better than mv when futures correct") {
    int closer = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto spec = coint_spec(seed);
        spec.coint->phi = 0.5;
        spec.coint->basis_sigma = 0.01;
        spec.coint->futures_error_correction = 0.5;
        auto pair = gen_coint_pair(spec);
        const double b = spec.coint->long_run_slope;
        const double mv = mv_ratio(pair.spot, pair.fut, 1).ratio;
        const double ecm = ecm_ratio(pair.spot, pair.fut, 1).ratio;
        if (std::abs(ecm - b) < std::abs(mv - b)) ++closer;
    }
    CHECK(closer >= 18);
}

TEST_CASE("eecm with no lags") {
    auto pair = gen_coint_pair(coint_spec(5, 800));
    ConventionalOptions opts;
    opts.max_lag = 0;
    auto est = eecm_ratio(pair.spot, pair.fut, 1, {}, opts);
    CHECK(std::isfinite(est.ratio));
    REQUIRE(est.lags);
    CHECK(*est.lags == std::make_pair(0, 0));
    CHECK(est.fit.beta.size() == 2);
    opts.eecm_residual = false;
    CHECK(eecm_ratio(pair.spot, pair.fut, 1, {}, opts).ratio == mv_ratio(pair.spot, pair.fut, 1).ratio);
    opts.max_lag = -1;
    CHECK(error_of([&] { eecm_ratio(pair.spot, pair.fut, 1, {}, opts); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lag order selection") {
    const std::vector<LagCandidate> plain{{0, 0, 5.0}, {1, 0, 3.0}, {0, 1, 4.0}};
    CHECK(select_lag_order(plain) == 1);
    // tie: smaller m + n wins
    const std::vector<LagCandidate> by_total{{2, 1, -7.0}, {1, 1, -7.0}, {0, 0, 1.0}};
    CHECK(select_lag_order(by_total) == 1);
    // tie on m + n: smaller m wins, wherever it sits
    const std::vector<LagCandidate> by_m{{2, 0, -3.0}, {1, 1, -3.0}, {0, 2, -3.0}};
    CHECK(select_lag_order(by_m) == 2);
    const std::vector<LagCandidate> none;
    CHECK(error_of([&] { select_lag_order(none); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("eecm picks up autoregressive basis dynamics") {
    int nonzero = 0;
    ConventionalOptions opts;
    opts.max_lag = 4;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto spec = coint_spec(seed);
        spec.coint->phi = 1.2;
        spec.coint->phi2 = -0.4;
        auto pair = gen_coint_pair(spec);
        auto est = eecm_ratio(pair.spot, pair.fut, 1, {}, opts);
        REQUIRE(est.lags);
        if (est.lags->first + est.lags->second > 0) ++nonzero;
    }
    CHECK(nonzero > 50);
}

TEST_CASE("pairing IMF sets") {
    auto eight = fake_set(8, 64, 1);
    auto other = fake_set(8, 64, 2);
    auto p = pair_imfs(eight, other);
    CHECK(p.pairs.size() == 8);
    CHECK(p.residue.is_residue);
    CHECK(p.residue.index == 9);
    CHECK(p.warnings.empty());
    CHECK(p.with_residue().size() == 9);

    auto seven = fake_set(7, 64, 3);
    auto q = pair_imfs(eight, seven);
    CHECK(q.pairs.size() == 7);
    CHECK(q.surplus_spot == 1);
    CHECK(q.surplus_fut == 0);
    CHECK(q.warnings.size() == 1);
    CHECK(q.residue.index == 8);
    CHECK(std::isnan(q.residue.cycle_spot));

    CHECK(error_of([&] { pair_imfs(eight, fake_set(8, 65, 4)); }) == ErrorCode::Misaligned);
}

TEST_CASE("vemd and semd on constructed pairs") {
    const auto spot = fixture::sine(400, 20.0, 2.0);
    ImfPair half{1, false, spot, spot, 20.0, 20.0};
    for (auto& v : half.fut) v *= 0.5;
    for (int h : {1, 3, 7}) CHECK(vemd_ratio(half, h).ratio == doctest::Approx(2.0).epsilon(1e-10));

    ImfPair self{1, false, spot, spot, 20.0, 20.0};
    auto v = vemd_ratio(self, 2);
    CHECK(v.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.imf_index == 1);
    auto s = semd_ratio(self);
    CHECK(s.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.horizon == 20);

    ImfPair flipped = self;
    for (auto& x : flipped.fut) x = -x;
    CHECK(semd_ratio(flipped).ratio == doctest::Approx(-1.0).epsilon(1e-12));

    // a whole-period difference wipes out the tone
    CHECK(error_of([&] { vemd_ratio(self, 20); }) == ErrorCode::DegenerateFutures);
}

TEST_CASE("aemd selection") {
    ImfSet a = fake_set(3, 256, 5), b = fake_set(3, 256, 6);  // cycles 4, 8, 16
    for (auto& imf : b.imfs)
        for (auto& v : imf.values) v *= 0.5;
    CHECK(error_of([&] { aemd_ratio(a, b, 3); }) == ErrorCode::EmptyAggregate);
    CHECK(qualifying_imf_count(a, 3) == 0);

    const auto one = aemd_ratio(a, b, 5);
    const auto pairs = pair_imfs(a, b);
    const auto semd = semd_ratio(pairs.pairs[0]);
    CHECK(one.ratio == semd.ratio);
    CHECK(one.fit.r_squared == semd.fit.r_squared);
    CHECK(one.imf_index == 1);

    // every IMF qualifies: the aggregate is the series minus its residue
    const auto all = aggregate_imfs(a, 1000);
    REQUIRE(all);
    const auto back = a.reconstruct();
    for (std::size_t t = 0; t < back.size(); ++t)
        CHECK((*all)[t] == doctest::Approx(back[t] - a.residue[t]).epsilon(1e-12));
    CHECK(aemd_ratio(a, b, 1000).ratio == doctest::Approx(2.0).epsilon(1e-12));

    // one side empty names that side
    ImfSet late = fake_set(3, 256, 7);
    for (auto& imf : late.imfs) imf.cycle *= 4.0;
    try {
        aemd_ratio(a, late, 5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyAggregate);
        CHECK(std::string(e.what()).find("futures") != std::string::npos);
    }
}

TEST_CASE("rounded cycles decide qualification") {
    ImfSet set = fake_set(2, 64, 8);
    set.imfs[0].cycle = 5.4;
    set.imfs[1].cycle = 5.6;
    CHECK(qualifying_imf_count(set, 5) == 1);
    CHECK(qualifying_imf_count(set, 6) == 2);
    CHECK(canonical_horizon(set.imfs[0]) == 5);
    CHECK(canonical_horizon(set.imfs[1]) == 6);
}

TEST_CASE("imf for horizon") {
    ImfSet set = fake_set(4, 64, 9);  // 4, 8, 16, 32
    CHECK(imf_for_horizon(set, 1) == 1);
    CHECK(imf_for_horizon(set, 7) == 2);
    CHECK(imf_for_horizon(set, 12) == 2);  // tie between 8 and 16
    CHECK(imf_for_horizon(set, 13) == 3);
    CHECK(imf_for_horizon(set, 500) == 4);
    ImfSet empty;
    CHECK(error_of([&] { imf_for_horizon(empty, 5); }) == ErrorCode::InsufficientData);
}

TEST_CASE("method names") {
    for (auto m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK(is_emd_method(Method::AEMD));
    CHECK_FALSE(is_emd_method(Method::ECM));
    CHECK(error_of([] { parse_method("OLS"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("engine: scale invariance, scopes and concurrency") {
    auto spec = coint_spec(17, 1200);
    spec.tones = {{12.0, 0.02}, {60.0, 0.03}};
    auto pair = gen_coint_pair(spec);
    ConventionalOptions small;
    small.max_lag = 2;
    EstimatorConfig cfg;
    cfg.conventional = small;
    const HedgeEngine engine(pair.spot, pair.fut, cfg);
    REQUIRE(engine.has_decomposition());
    const int h = canonical_horizon(engine.spot_set().imfs[0]);

    SUBCASE("ratios do not move when both legs are rescaled") {
        for (double c : {2.0, 3.3}) {
            CAPTURE(c);
            auto scale = [c](const PriceSeries& s) {
                std::vector<double> v(s.values());
                for (auto& x : v) x *= c;
                return PriceSeries(s.id(), s.leg(), s.timestamps(), v);
            };
            const HedgeEngine scaled(scale(pair.spot), scale(pair.fut), cfg);
            for (auto m : kAllMethods) {
                CAPTURE(to_string(m));
                const double a = engine.estimate(m, h).ratio;
                const double b = scaled.estimate(m, h).ratio;
                CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
            }
        }
    }
    SUBCASE("per-segment scope on one full segment equals the full scope") {
        EstimatorConfig per = cfg;
        per.scope = DecomposeScope::PerSegment;
        const HedgeEngine seg(pair.spot, pair.fut, per, false);
        const std::vector<IndexRange> whole{{0, pair.spot.size()}};
        for (auto m : {Method::VEMD, Method::SEMD, Method::AEMD}) {
            CAPTURE(to_string(m));
            CHECK(seg.estimate(m, h, whole).ratio == engine.estimate(m, h, whole).ratio);
        }
        // two training blocks decompose separately
        const std::vector<IndexRange> blocks{{0, 500}, {700, 1200}};
        CHECK(std::isfinite(seg.estimate(Method::SEMD, h, blocks).ratio));
        CHECK(std::isfinite(seg.estimate(Method::MV, h, blocks).ratio));
    }
    SUBCASE("estimate is safe from several threads") {
        std::vector<double> ref;
        for (auto m : kAllMethods) ref.push_back(engine.estimate(m, h).ratio);
        std::vector<std::vector<double>> got(4);
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < got.size(); ++i)
            pool.emplace_back([&, i] {
                for (auto m : kAllMethods) got[i].push_back(engine.estimate(m, h).ratio);
            });
        for (auto& t : pool) t.join();
        for (const auto& g : got) CHECK(g == ref);
    }
    SUBCASE("no decomposition, no emd methods") {
        const HedgeEngine bare(pair.spot, pair.fut, cfg, false);
        CHECK(error_of([&] { bare.estimate(Method::VEMD, h); }) == ErrorCode::InvalidArgument);
        CHECK(bare.estimate(Method::MV, h).ratio == engine.estimate(Method::MV, h).ratio);
    }
}

}
