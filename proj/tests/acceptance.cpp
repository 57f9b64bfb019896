// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hedgeemd/analysis.hpp"
#include "hedgeemd/config.hpp"
#include "hedgeemd/cpcv.hpp"
#include "hedgeemd/emd.hpp"
#include "hedgeemd/estimators.hpp"
#include "hedgeemd/performance.hpp"
#include "hedgeemd/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hedgeemd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion_ {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

double rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

std::vector<double> log_diff(const PriceSeries& p, int h) {
    std::vector<double> out;
    for (std::size_t t = static_cast<std::size_t>(h); t < p.size(); ++t)
        out.push_back(std::log(p.values()[t]) - std::log(p.values()[t - static_cast<std::size_t>(h)]));
    return out;
}

SynthSpec coint_spec(std::uint64_t seed, std::size_t n = 2000) {
    SynthSpec s;
    s.length = n;
    s.seed = seed;
    s.coint = CointSpec{};
    s.coint->long_run_slope = 0.9;
    s.coint->phi = 0.8;
    return s;
}

// ---------------------------------------------------------------------------

Outcome five_group_layout() {
    const auto splits = enumerate_splits(5, 2);
    const auto a = assign_paths(splits);
    // (group, split) pairs, 1-based, for N = 5, k = 2
    const std::vector<std::vector<std::pair<int, int>>> expected = {
        {{1, 1}, {2, 1}, {3, 2}, {4, 3}, {5, 4}},
        {{1, 2}, {2, 5}, {3, 5}, {4, 6}, {5, 7}},
        {{1, 3}, {2, 6}, {3, 8}, {4, 8}, {5, 9}},
        {{1, 4}, {2, 7}, {3, 9}, {4, 10}, {5, 10}},
    };
    Outcome o;
    if (splits.splits.size() != 10 || a.n_paths != 4) {
        return {false, std::to_string(splits.splits.size()) + " splits, " + std::to_string(a.n_paths) + " paths"};
    }
    if (splits.splits.front().test != std::vector<int>{0, 1} || splits.splits.back().test != std::vector<int>{3, 4})
        return {false, "split order is not lexicographic"};
    for (std::size_t p = 0; p < expected.size(); ++p) {
        const auto& cells = a.paths[p];
        if (cells.size() != expected[p].size()) return {false, "path " + std::to_string(p + 1) + " size"};
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].group + 1 != expected[p][i].first || cells[i].split + 1 != expected[p][i].second)
                return {false, "path " + std::to_string(p + 1) + " cell " + std::to_string(i + 1) + " differs"};
        }
    }
    o.detail = "10 splits, 4 paths, all 20 cells match";
    return o;
}

Outcome path_count_law() {
    int checked = 0;
    for (int n = 2; n <= 12; ++n) {
        for (int k = 1; k < n; ++k) {
            const auto splits = enumerate_splits(n, k);
            const auto a = assign_paths(splits);
            const std::uint64_t total = binomial(n, k);
            const std::uint64_t law = binomial(n - 1, k - 1);
            if (splits.splits.size() != total) return {false, "split count at N=" + std::to_string(n)};
            if ((static_cast<std::uint64_t>(k) * total) % static_cast<std::uint64_t>(n) != 0 ||
                static_cast<std::uint64_t>(k) * total / static_cast<std::uint64_t>(n) != law ||
                static_cast<std::uint64_t>(a.n_paths) != law)
                return {false, "path count at N=" + std::to_string(n) + " k=" + std::to_string(k)};
            // one cell per group per path
            std::set<std::pair<int, int>> used;
            for (const auto& path : a.paths) {
                std::vector<int> seen(static_cast<std::size_t>(n), 0);
                for (const auto& c : path) {
                    ++seen[static_cast<std::size_t>(c.group)];
                    const auto& test = splits.splits[static_cast<std::size_t>(c.split)].test;
                    if (std::find(test.begin(), test.end(), c.group) == test.end())
                        return {false, "path uses a training cell"};
                    if (!used.insert({c.split, c.group}).second) return {false, "cell used twice"};
                }
                if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; }))
                    return {false, "group count per path at N=" + std::to_string(n) + " k=" + std::to_string(k)};
            }
            // every test cell consumed
            if (used.size() != total * static_cast<std::uint64_t>(k)) return {false, "unused test cells"};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " (N, k) pairs"};
}

Outcome emd_reconstruction() {
    const SiftConfig cfg;
    double worst_rec = 0.0;
    int imfs = 0, bad_imfs = 0;
    std::string first_bad;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        CounterRng pick(seed, 99);
        SynthSpec s;
        s.length = 1000;
        s.seed = seed;
        const int n_tones = 2 + static_cast<int>(pick.uniform() * 2.0);
        double period = 6.0 + 6.0 * pick.uniform();
        for (int i = 0; i < n_tones; ++i) {
            s.tones.push_back({period, 0.5 + pick.uniform()});
            period *= 4.0 + 2.0 * pick.uniform();
        }
        s.trend_slope = 0.004 * (pick.uniform() - 0.5);
        s.noise_sigma = 0.05 * pick.uniform();
        s.level = 10.0;
        const auto x = tone_values(s);
        const auto set = decompose(x, cfg);
        const auto rec = set.reconstruct();
        double err = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) err = std::max(err, std::abs(x[t] - rec[t]));
        worst_rec = std::max(worst_rec, err / rms(x));
        for (const auto& imf : set.imfs) {
            ++imfs;
            const auto check = is_imf(imf.values, cfg.envelope_tolerance, cfg.boundary_mirror_count);
            if (!check.is_imf) {
                ++bad_imfs;
                if (first_bad.empty())
                    first_bad = "seed " + std::to_string(seed) + " IMF" + std::to_string(imf.index) +
                                " ratio " + fmt(check.envelope_ratio);
            }
        }
    }
    Outcome o;
    o.pass = worst_rec <= 1e-9 && bad_imfs == 0;
    o.detail = "max reconstruction error " + fmt(worst_rec) + " x rms; " + std::to_string(imfs) + " IMFs, " +
               std::to_string(bad_imfs) + " failing the IMF conditions" +
               (first_bad.empty() ? "" : " (first: " + first_bad + ")");
    return o;
}

// IMF carrying the most variance
const Imf& dominant(const ImfSet& set) {
    return *std::max_element(set.imfs.begin(), set.imfs.end(), [](const Imf& a, const Imf& b) {
        return sample_variance(a.values) < sample_variance(b.values);
    });
}

Outcome cycle_recovery() {
    std::ostringstream d;
    bool pass = true;
    for (double p : {8.0, 20.0, 50.0, 100.0}) {
        SynthSpec s;
        s.length = 4000;
        s.tones = {{p, 1.0}};
        const auto set = decompose(tone_values(s));
        const double c = dominant(set).cycle;
        const double err = std::abs(c - p) / p;
        pass = pass && err <= 0.05;
        d << "P" << p << "->" << fmt(c) << " ";
    }
    const std::vector<std::pair<double, double>> pairs = {{8, 40}, {10, 50}, {20, 100}, {12, 96}};
    for (const auto& [fast, slow] : pairs) {
        SynthSpec s;
        s.length = 4000;
        s.tones = {{fast, 1.0}, {slow, 1.0}};
        const auto set = decompose(tone_values(s));
        // the IMF closest to each period, which must come in index order
        auto nearest = [&](double p) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < set.imfs.size(); ++i)
                if (std::abs(set.imfs[i].cycle - p) < std::abs(set.imfs[best].cycle - p)) best = i;
            return best;
        };
        const auto i_fast = nearest(fast), i_slow = nearest(slow);
        const double cf = set.imfs[i_fast].cycle, cs = set.imfs[i_slow].cycle;
        bool ok = i_fast < i_slow && std::abs(cf - fast) / fast <= 0.10 && std::abs(cs - slow) / slow <= 0.10;
        for (std::size_t i = 1; i <= i_slow; ++i) ok = ok && set.imfs[i].cycle > set.imfs[i - 1].cycle;
        pass = pass && ok;
        d << "(" << fast << "," << slow << ")->(" << fmt(cf) << "," << fmt(cs) << ") ";
    }
    return {pass, d.str()};
}

Outcome mv_correctness() {
    double worst_cov = 0.0, worst_ols = 0.0, worst_r2 = 0.0;
    int grid_fail = 0, cases = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto pair = gen_coint_pair(coint_spec(seed, 1500));
        for (int h : {1, 5, 20}) {
            ++cases;
            const auto est = mv_ratio(pair.spot, pair.fut, h);
            const auto ds = log_diff(pair.spot, h), df = log_diff(pair.fut, h);
            const double n = static_cast<double>(ds.size());
            const double ms = std::accumulate(ds.begin(), ds.end(), 0.0) / n;
            const double mf = std::accumulate(df.begin(), df.end(), 0.0) / n;
            double cov = 0.0, var = 0.0;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                cov += (ds[i] - ms) * (df[i] - mf);
                var += (df[i] - mf) * (df[i] - mf);
            }
            worst_cov = std::max(worst_cov, std::abs(est.ratio - cov / var));
            worst_ols = std::max(worst_ols, std::abs(est.ratio - ols(ds, df).slope()));

            auto port_var = [&](double ratio) {
                std::vector<double> p(ds.size());
                for (std::size_t i = 0; i < p.size(); ++i) p[i] = ds[i] - ratio * df[i];
                return sample_variance(p);
            };
            std::size_t best = 0;
            double best_v = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g <= 200; ++g) {
                const double v = port_var(est.ratio - 1.0 + 0.01 * static_cast<double>(g));
                if (v < best_v) {
                    best_v = v;
                    best = g;
                }
            }
            if (best != 100) ++grid_fail;

            const auto hedged = build_portfolio(pair.spot, pair.fut, est.ratio, h);
            const auto he = he_variance(hedged.spot_returns.values, hedged.portfolio);
            worst_r2 = std::max(worst_r2, std::abs(he.value - est.fit.r_squared));
        }
    }
    Outcome o;
    o.pass = worst_cov <= 1e-10 && worst_ols <= 1e-10 && grid_fail == 0 && worst_r2 <= 1e-8;
    o.detail = std::to_string(cases) + " cases; |h - cov/var| " + fmt(worst_cov) + ", |h - ols| " + fmt(worst_ols) +
               ", grid misses " + std::to_string(grid_fail) + ", |HE - R2| " + fmt(worst_r2);
    return o;
}

Outcome nesting() {
    int ecm_miss = 0, eecm_miss = 0;
    double worst = 0.0;
    ConventionalOptions restricted;
    restricted.ecm_levels = false;
    ConventionalOptions no_lags;
    no_lags.max_lag = 0;
    no_lags.eecm_residual = false;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto spec = coint_spec(1000 + seed, 800);
        spec.coint->futures_error_correction = 0.1;
        const auto pair = gen_coint_pair(spec);
        const int h = 1 + static_cast<int>(seed % 5);
        const double mv = mv_ratio(pair.spot, pair.fut, h).ratio;
        const double ecm = ecm_ratio(pair.spot, pair.fut, h, {}, restricted).ratio;
        const double eecm = eecm_ratio(pair.spot, pair.fut, h, {}, no_lags).ratio;
        if (ecm != mv) ++ecm_miss;
        if (eecm != mv) ++eecm_miss;
        worst = std::max({worst, std::abs(ecm - mv), std::abs(eecm - mv)});
    }
    return {ecm_miss == 0 && eecm_miss == 0,
            "50 instances; ECM mismatches " + std::to_string(ecm_miss) + ", EECM mismatches " +
                std::to_string(eecm_miss) + ", max |diff| " + fmt(worst)};
}

Outcome coint_oracle() {
    int in_band_1 = 0, near_50 = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto pair = gen_coint_pair(coint_spec(seed));
        const double h1 = mv_ratio(pair.spot, pair.fut, 1).ratio;
        const double h50 = mv_ratio(pair.spot, pair.fut, 50).ratio;
        if (h1 >= 0.85 && h1 <= 0.95) ++in_band_1;
        if (std::abs(h50 - 0.9) <= 0.05) ++near_50;
    }
    return {in_band_1 >= 95 && near_50 >= 90,
            "horizon 1 in [0.85, 0.95]: " + std::to_string(in_band_1) + "/100; horizon 50 within 0.05 of b: " +
                std::to_string(near_50) + "/100"};
}

Outcome performance_criteria() {
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    };
    const std::vector<double> spot4{0.0, 2.0, 4.0}, port1{0.0, 1.0, 2.0};
    expect(he_variance(spot4, port1).value == 0.75, "he_variance 4 vs 1");
    expect(he_variance(spot4, std::vector<double>{3.0, 3.0, 3.0}).value == 1.0, "he_variance constant");
    expect(he_variance(spot4, spot4).value == 0.0, "he_variance identity");

    std::vector<double> ints(100);
    std::iota(ints.begin(), ints.end(), 1.0);
    expect(std::abs(var_quantile(ints, 0.05) - 5.95) <= 1e-12, "quantile 5.95");
    expect(var_quantile(std::vector<double>(30, 1.25), 0.05) == 1.25, "quantile constant");
    std::vector<double> sym;
    for (int i = -10; i <= 10; ++i) sym.push_back(i);
    expect(var_quantile(sym, 0.5) == 0.0, "quantile median");

    const std::vector<double> s2(20, -2.0), p05(20, -0.5), zeros(20, 0.0);
    expect(he_var(s2, p05).value == 0.75, "he_var -2 vs -0.5");
    expect(he_var(s2, s2).value == 0.0, "he_var identity");
    expect(he_var(s2, zeros).value == 1.0, "he_var riskless");

    const auto m = moments(std::vector<double>{-1.0, -1.0, 1.0, 1.0});
    expect(m.mean == 0.0 && m.skewness == 0.0 && m.excess_kurtosis == -2.0, "moments two-point");
    const auto mc = moments(std::vector<double>{2.0, 2.0, 2.0, 2.0});
    expect(mc.std == 0.0 && !mc.higher_defined, "moments constant");

    // joint rescaling
    CounterRng rng(2024, 0);
    std::vector<double> s(250), p(250);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = 0.01 * rng.normal();
        s[i] = 0.9 * f + 0.003 * rng.normal();
        p[i] = s[i] - 0.88 * f;
    }
    const double v0 = he_variance(s, p).value, q0 = he_var(s, p).value;
    double worst = 0.0;
    for (int r = 0; r < 100; ++r) {
        const double c = std::exp(4.0 * (rng.uniform() - 0.5));
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        std::vector<double> cs(s.size()), cp(p.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            cs[i] = sign * c * s[i];
            cp[i] = sign * c * p[i];
        }
        worst = std::max(worst, std::abs(he_variance(cs, cp).value - v0));
        for (std::size_t i = 0; i < s.size(); ++i) {
            cs[i] = c * s[i];
            cp[i] = c * p[i];
        }
        worst = std::max(worst, std::abs(he_var(cs, cp).value - q0));
    }
    expect(worst <= 1e-12, "joint scale invariance");
    std::string detail = "11 fixed examples, scale drift " + fmt(worst);
    for (const auto& f : failed) detail += "; FAILED " + f;
    return {failed.empty(), detail};
}

Outcome path_stats() {
    CounterRng rng(77, 0);
    int instances = 0, mismatches = 0;
    double worst_identity = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const int n = 2 + static_cast<int>(rng.uniform() * 7.0);  // 2..8
        const int k = 1 + static_cast<int>(rng.uniform() * (n - 1));
        const bool with_exclusions = inst % 2 == 1;
        const auto splits = enumerate_splits(n, k);
        const auto a = assign_paths(splits);
        std::vector<bool> excluded(static_cast<std::size_t>(n), false);
        if (with_exclusions) excluded[static_cast<std::size_t>(rng.uniform() * n)] = true;

        CellScores cells(splits.splits.size(), std::vector<std::optional<double>>(static_cast<std::size_t>(n)));
        for (std::size_t s = 0; s < splits.splits.size(); ++s)
            for (int g : splits.splits[s].test)
                if (!excluded[static_cast<std::size_t>(g)])
                    cells[s][static_cast<std::size_t>(g)] = rng.uniform() * 2.0 - 0.5;

        // brute force: rebuild the sequential assignment from scratch
        std::vector<int> next(static_cast<std::size_t>(n), 1);
        std::vector<std::vector<double>> by_path(static_cast<std::size_t>(a.n_paths));
        for (std::size_t s = 0; s < splits.splits.size(); ++s)
            for (int g = 0; g < n; ++g) {
                const auto& test = splits.splits[s].test;
                if (std::find(test.begin(), test.end(), g) == test.end()) continue;
                const int p = next[static_cast<std::size_t>(g)]++;
                if (cells[s][static_cast<std::size_t>(g)])
                    by_path[static_cast<std::size_t>(p - 1)].push_back(*cells[s][static_cast<std::size_t>(g)]);
            }

        for (Criterion c : {Criterion::VarianceReduction, Criterion::VaR}) {
            const auto stats = path_statistics(cells, a, c);
            std::vector<double> expect;
            for (const auto& v : by_path) {
                if (v.empty()) continue;
                expect.push_back(c == Criterion::VaR
                                     ? *std::min_element(v.begin(), v.end())
                                     : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
            }
            if (stats.values.size() != expect.size()) {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < expect.size(); ++i)
                if (std::abs(stats.values[i] - expect[i]) > 1e-12) ++mismatches;
            if (c == Criterion::VarianceReduction && !with_exclusions) {
                double sum = 0.0;
                std::size_t count = 0;
                for (const auto& row : cells)
                    for (const auto& v : row)
                        if (v) {
                            sum += *v;
                            ++count;
                        }
                const double mean_paths = std::accumulate(stats.values.begin(), stats.values.end(), 0.0) /
                                          static_cast<double>(stats.values.size());
                worst_identity = std::max(worst_identity, std::abs(mean_paths - sum / static_cast<double>(count)));
            }
        }
        ++instances;
    }
    return {mismatches == 0 && worst_identity <= 1e-12,
            std::to_string(instances) + " instances; mismatched path values " + std::to_string(mismatches) +
                ", double-counting gap " + fmt(worst_identity)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "hedgeemd_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string cli = HEDGEEMD_CLI;
    const auto data = root / "pair.csv";
    const auto bundle = root / "bundle";
    const auto first = root / "first";
    auto run = [&](const std::string& args) {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    if (run("synth --seed 11 --out \"" + data.string() + "\" --set synth_tones=21:0.03,63:0.04") != 0)
        return {false, "synth failed"};
    const std::string pipe = "pipeline --input \"" + data.string() + "\" --out \"" + bundle.string() +
                             "\" --partition equal:6 --k 2 --set max_lag=4";
    if (run(pipe) != 0) return {false, "first pipeline run failed"};
    fs::rename(bundle, first);
    if (run(pipe) != 0) return {false, "second pipeline run failed"};

    std::set<std::string> a, b;
    for (const auto& e : fs::directory_iterator(first)) a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(bundle)) b.insert(e.path().filename().string());
    if (a != b) return {false, "file sets differ"};
    const auto manifest = slurp(bundle / "manifest.json");
    if (manifest.find("\"status\": \"ok\"") == std::string::npos) return {false, "manifest status not ok"};
    for (const auto& name : a)
        if (slurp(first / name) != slurp(bundle / name)) return {false, name + " differs"};
    fs::remove_all(root);
    return {true, std::to_string(a.size()) + " files byte-identical"};
}

Outcome analysis_identities() {
    std::vector<std::string> failed;
    SynthSpec s;
    s.length = 1200;
    s.tones = {{10.0, 1.0}, {60.0, 2.0}};
    s.noise_sigma = 0.1;
    s.seed = 5;
    const auto set = decompose(tone_values(s));
    const auto pairing = pair_imfs(set, set);
    double worst = 0.0;
    for (const auto& row : matching_degree(pairing.with_residue()))
        worst = std::max({worst, std::abs(row.beta - 1.0), std::abs(row.r_squared - 1.0)});
    if (worst > 1e-10) failed.push_back("self-pair matching " + fmt(worst));

    auto near = [](double a, double b) { return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon(); };
    if (!near(relative_performance(0.6, 0.5).value, 0.2)) failed.push_back("relative 0.6/0.5");
    if (!near(relative_performance(-0.4, -0.5).value, 0.2)) failed.push_back("relative -0.4/-0.5");
    if (relative_performance(0.7, 0.7).value != 0.0) failed.push_back("relative identity");

    const std::vector<double> m{0.31, 0.52, 0.64, 0.77, 0.85, 0.93};
    const auto f = determinant_regression(m, m);
    if (std::abs(f.alpha) > 1e-10 || std::abs(f.beta - 1.0) > 1e-10 || std::abs(f.r_squared - 1.0) > 1e-10)
        failed.push_back("determinant regression");
    std::string detail = "self-pair drift " + fmt(worst) + ", determinant alpha " + fmt(f.alpha) + " beta " +
                         fmt(f.beta) + " R2 " + fmt(f.r_squared);
    for (const auto& x : failed) detail += "; FAILED " + x;
    return {failed.empty(), detail};
}

} // namespace

int main() {
    const std::vector<Criterion_> criteria = {
        {1, "five-group split/path layout", 1.0, five_group_layout},
        {2, "path-count law and path invariants", 5.0, path_count_law},
        {3, "EMD reconstruction and IMF conditions", 60.0, emd_reconstruction},
        {4, "cycle recovery", 30.0, cycle_recovery},
        {5, "MV correctness", 10.0, mv_correctness},
        {6, "estimator nesting", 10.0, nesting},
        {7, "cointegration oracle", 120.0, coint_oracle},
        {8, "performance criteria", 5.0, performance_criteria},
        {9, "path statistics", 10.0, path_stats},
        {10, "end-to-end determinism", 60.0, determinism},
        {11, "analysis identities", 5.0, analysis_identities},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << std::setw(2) << c.id << "] " << c.name << ": " << o.detail
                  << " (" << std::fixed << std::setprecision(2) << secs << " s, limit " << c.limit_s << " s"
                  << (in_time ? "" : ", OVER") << ")" << std::defaultfloat << '\n';
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failing") << '\n';
    return failures == 0 ? 0 : 1;
}
