#include "hedgeemd/cpcv.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace hedgeemd {

namespace {

std::size_t diff_count(std::size_t len, int horizon, int stride) {
    const auto h = static_cast<std::size_t>(horizon);
    if (len <= h) return 0;
    return (len - h - 1) / static_cast<std::size_t>(stride) + 1;
}

struct SplitOutcome {
    double ratio = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::string> failure;
    // [criterion][group]
    std::vector<std::vector<std::optional<double>>> scores;
    // (criterion, group, reason) for cells that could not be scored
    std::vector<std::tuple<std::size_t, int, std::string>> unscored;
};

} // namespace

PartitionScheme PartitionScheme::parse(std::string_view text) {
    if (text == "year") return calendar_year();
    constexpr std::string_view prefix = "equal:";
    if (text.substr(0, prefix.size()) == prefix) {
        const auto num = text.substr(prefix.size());
        int n = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
        if (ec == std::errc{} && ptr == num.data() + num.size() && n >= 2) return equal_count(n);
    }
    throw Error(ErrorCode::InvalidArgument,
                "partition must be 'equal:N' (N >= 2) or 'year', got '" + std::string(text) + "'");
}

std::string PartitionScheme::to_string() const {
    return kind == Kind::CalendarYear ? "year" : "equal:" + std::to_string(groups);
}

std::vector<std::size_t> GroupPartition::sizes() const {
    std::vector<std::size_t> out;
    for (const auto& g : groups) out.push_back(g.size());
    return out;
}

GroupPartition partition(std::span<const Date> timestamps, PartitionScheme scheme) {
    const auto t = timestamps.size();
    GroupPartition out;
    out.scheme = scheme;
    if (scheme.kind == PartitionScheme::Kind::EqualCount) {
        const auto n = static_cast<std::size_t>(std::max(scheme.groups, 0));
        if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 groups");
        if (t < 2 * n)
            throw Error(ErrorCode::InsufficientData,
                        std::to_string(t) + " samples cannot fill " + std::to_string(n) + " groups");
        const auto base = t / n;
        for (std::size_t g = 0; g < n; ++g) {
            const auto begin = g * base;
            const auto end = g + 1 == n ? t : begin + base;
            out.groups.push_back(IndexRange{begin, end});
            out.labels.push_back("G" + std::to_string(g + 1));
        }
        return out;
    }
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= t; ++i) {
        if (i == t || year_of(timestamps[i]) != year_of(timestamps[begin])) {
            out.groups.push_back(IndexRange{begin, i});
            out.labels.push_back(std::to_string(year_of(timestamps[begin])));
            begin = i;
        }
    }
    if (out.groups.size() < 2)
        throw Error(ErrorCode::InsufficientData, "calendar partition needs at least 2 distinct years");
    return out;
}

GroupPartition partition(const PriceSeries& series, PartitionScheme scheme) {
    return partition(series.timestamps(), scheme);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 0; i < k; ++i) {
        r = r * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw Error(ErrorCode::InvalidArgument, "binomial coefficient overflows");
    }
    return static_cast<std::uint64_t>(r);
}

SplitSet enumerate_splits(int n_groups, int k) {
    if (n_groups < 2 || k < 1 || k >= n_groups)
        throw Error(ErrorCode::InvalidArgument,
                    "need 1 <= k < N, got N=" + std::to_string(n_groups) + " k=" + std::to_string(k));
    SplitSet out{n_groups, k, {}};
    std::vector<int> test(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) test[static_cast<std::size_t>(i)] = i;
    while (true) {
        Split s;
        s.test = test;
        for (int g = 0; g < n_groups; ++g)
            if (!std::binary_search(test.begin(), test.end(), g)) s.train.push_back(g);
        out.splits.push_back(std::move(s));
        // next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && test[static_cast<std::size_t>(i)] == n_groups - k + i) --i;
        if (i < 0) break;
        ++test[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            test[static_cast<std::size_t>(j)] = test[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

PathAssignment assign_paths(const SplitSet& splits) {
    PathAssignment out;
    out.n_paths = static_cast<int>(binomial(splits.n_groups - 1, splits.k - 1));
    out.cell_path.assign(splits.splits.size(),
                         std::vector<int>(static_cast<std::size_t>(splits.n_groups), 0));
    out.paths.resize(static_cast<std::size_t>(out.n_paths));
    for (int g = 0; g < splits.n_groups; ++g) {
        int next = 0;
        for (std::size_t s = 0; s < splits.splits.size(); ++s) {
            const auto& test = splits.splits[s].test;
            if (!std::binary_search(test.begin(), test.end(), g)) continue;
            ++next;
            out.cell_path[s][static_cast<std::size_t>(g)] = next;
            out.paths[static_cast<std::size_t>(next - 1)].push_back(PathCell{g, static_cast<int>(s)});
        }
    }
    return out;
}

PathStatistics path_statistics(const CellScores& cells, const PathAssignment& assignment,
                               Criterion criterion, std::span<const int> failed_splits) {
    const std::set<int> failed(failed_splits.begin(), failed_splits.end());
    PathStatistics out;
    for (std::size_t p = 0; p < assignment.paths.size(); ++p) {
        const int id = static_cast<int>(p) + 1;
        std::vector<double> scored;
        bool voided = false;
        for (const auto& cell : assignment.paths[p]) {
            if (failed.count(cell.split)) {
                voided = true;
                break;
            }
            const auto& v = cells.at(static_cast<std::size_t>(cell.split))
                                .at(static_cast<std::size_t>(cell.group));
            if (v) scored.push_back(*v);
        }
        if (voided || scored.empty()) {
            out.dropped_paths.push_back(id);
            continue;
        }
        double value;
        if (criterion == Criterion::VarianceReduction) {
            value = 0.0;
            for (double v : scored) value += v;
            value /= static_cast<double>(scored.size());
        } else {
            value = *std::min_element(scored.begin(), scored.end());
        }
        out.path_ids.push_back(id);
        out.values.push_back(value);
    }
    if (!out.values.empty()) {
        out.stats = describe(out.values);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.stats = Moments{nan, nan, nan, nan, 0, false};
    }
    return out;
}

std::size_t CvConfig::effective_min_obs() const {
    return min_obs.value_or(std::max<std::size_t>(10, 2 * static_cast<std::size_t>(horizon)));
}

std::vector<PathReport> run_cv(const HedgeEngine& engine, const GroupPartition& groups,
                               const CvConfig& config) {
    if (config.criteria.empty()) throw Error(ErrorCode::InvalidArgument, "no criteria requested");
    if (config.horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    const int n_groups = static_cast<int>(groups.size());
    const auto splits = enumerate_splits(n_groups, config.k);
    const auto assignment = assign_paths(splits);
    const int stride = engine.config().conventional.stride;
    const auto min_obs = config.effective_min_obs();

    std::vector<GroupExclusion> excluded;
    std::vector<bool> is_excluded(static_cast<std::size_t>(n_groups), false);
    for (int g = 0; g < n_groups; ++g) {
        const auto count = diff_count(groups.groups[static_cast<std::size_t>(g)].size(),
                                      config.horizon, stride);
        if (count < min_obs) {
            is_excluded[static_cast<std::size_t>(g)] = true;
            excluded.push_back({g, std::to_string(count) + " differenced observations < min_obs " +
                                       std::to_string(min_obs)});
        }
    }
    if (static_cast<int>(excluded.size()) == n_groups)
        throw Error(ErrorCode::AllGroupsExcluded,
                    "every group is too short for horizon " + std::to_string(config.horizon));

    const auto n_splits = splits.splits.size();
    const auto n_crit = config.criteria.size();
    std::vector<SplitOutcome> outcomes(n_splits);

    auto evaluate_split = [&](std::size_t s) {
        const auto& split = splits.splits[s];
        SplitOutcome& out = outcomes[s];
        out.scores.assign(n_crit, std::vector<std::optional<double>>(static_cast<std::size_t>(n_groups)));
        Sample train;
        for (int g : split.train) train.push_back(groups.groups[static_cast<std::size_t>(g)]);
        try {
            out.ratio = engine.estimate(config.method, config.horizon, train, config.imf_index).ratio;
        } catch (const Error& e) {
            out.failure = e.what();
            return;
        }
        for (int g : split.test) {
            if (is_excluded[static_cast<std::size_t>(g)]) continue;
            const IndexRange group = groups.groups[static_cast<std::size_t>(g)];
            const auto hedged = build_portfolio(engine.spot(), engine.fut(), out.ratio, config.horizon,
                                                std::span<const IndexRange>(&group, 1), stride);
            for (std::size_t c = 0; c < n_crit; ++c) {
                try {
                    const auto eff = evaluate(config.criteria[c], hedged.spot_returns.values,
                                              hedged.portfolio, config.alpha);
                    if (eff.degenerate) {
                        out.unscored.emplace_back(c, g, "degenerate spot returns");
                    } else {
                        out.scores[c][static_cast<std::size_t>(g)] = eff.value;
                    }
                } catch (const Error& e) {
                    out.unscored.emplace_back(c, g, e.what());
                }
            }
        }
    };

    std::vector<std::size_t> order(n_splits);
    for (std::size_t i = 0; i < n_splits; ++i) order[i] = config.reverse_order ? n_splits - 1 - i : i;
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n_splits)));
    if (workers == 1) {
        for (auto s : order) evaluate_split(s);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n_splits; i = next++) evaluate_split(order[i]);
            });
    }

    std::vector<PathReport> reports;
    for (std::size_t c = 0; c < n_crit; ++c) {
        PathReport rep;
        rep.method = config.method;
        rep.horizon = config.horizon;
        rep.criterion = config.criteria[c];
        rep.n_groups = n_groups;
        rep.k = config.k;
        rep.n_paths = assignment.n_paths;
        rep.excluded_groups = excluded;
        rep.cells.assign(n_splits, std::vector<std::optional<double>>(static_cast<std::size_t>(n_groups)));
        std::vector<int> failed;
        std::set<std::pair<int, std::string>> seen;
        for (std::size_t s = 0; s < n_splits; ++s) {
            const auto& o = outcomes[s];
            rep.split_ratios.push_back(o.ratio);
            if (o.failure) {
                failed.push_back(static_cast<int>(s));
                rep.failed_splits.push_back({static_cast<int>(s), *o.failure});
                rep.per_split_values.push_back(std::nullopt);
                continue;
            }
            rep.cells[s] = o.scores[c];
            double sum = 0.0;
            int count = 0;
            for (const auto& v : o.scores[c])
                if (v) {
                    sum += *v;
                    ++count;
                }
            rep.per_split_values.push_back(count ? std::optional<double>(sum / count) : std::nullopt);
            for (const auto& [crit, g, reason] : o.unscored) {
                if (crit != c || !seen.insert({g, reason}).second) continue;
                rep.excluded_groups.push_back({g, reason});
            }
        }
        const auto ps = path_statistics(rep.cells, assignment, rep.criterion, failed);
        rep.path_ids = ps.path_ids;
        rep.per_path_values = ps.values;
        rep.stats = ps.stats;
        rep.dropped_paths = ps.dropped_paths;
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace hedgeemd
