#pragma once

#include "hedgeemd/estimators.hpp"
#include "hedgeemd/performance.hpp"
#include "hedgeemd/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hedgeemd {

struct PartitionScheme {
    enum class Kind { EqualCount, CalendarYear };
    Kind kind = Kind::EqualCount;
    int groups = 10;  // EqualCount only

    static PartitionScheme equal_count(int n) { return {Kind::EqualCount, n}; }
    static PartitionScheme calendar_year() { return {Kind::CalendarYear, 0}; }

    // "equal:N" or "year"
    static PartitionScheme parse(std::string_view text);
    std::string to_string() const;
};

struct GroupPartition {
    PartitionScheme scheme;
    std::vector<IndexRange> groups;
    std::vector<std::string> labels;  // "G1".. or the calendar year

    std::size_t size() const { return groups.size(); }
    std::vector<std::size_t> sizes() const;
};

GroupPartition partition(std::span<const Date> timestamps, PartitionScheme scheme);
GroupPartition partition(const PriceSeries& series, PartitionScheme scheme);

// Exact binomial coefficient; throws on overflow.
std::uint64_t binomial(int n, int k);

struct Split {
    std::vector<int> test;   // 0-based group indices, ascending
    std::vector<int> train;
};

/// All C(N, k) splits with test sets in lexicographic order.
struct SplitSet {
    int n_groups = 0;
    int k = 0;
    std::vector<Split> splits;
};

SplitSet enumerate_splits(int n_groups, int k);

struct PathCell {
    int group = 0;  // 0-based
    int split = 0;  // 0-based
};

/// Each group's test appearances, taken in split order, get path ids
/// 1, 2, ... C(N-1, k-1) in turn.
struct PathAssignment {
    int n_paths = 0;
    // [split][group]: path id for test cells, 0 elsewhere.
    std::vector<std::vector<int>> cell_path;
    // [path - 1]: the path's cells in group order.
    std::vector<std::vector<PathCell>> paths;
};

PathAssignment assign_paths(const SplitSet& splits);

// [split][group]; nullopt marks a cell that is not scored (not a test
// cell, or excluded).
using CellScores = std::vector<std::vector<std::optional<double>>>;

struct PathStatistics {
    std::vector<int> path_ids;       // surviving paths, ascending
    std::vector<double> values;      // one per surviving path
    std::vector<int> dropped_paths;  // all cells excluded, or a failed split
    Moments stats;
};

/// Path value is the mean of its scored cells for variance reduction and
/// the minimum for VaR.
PathStatistics path_statistics(const CellScores& cells, const PathAssignment& assignment,
                               Criterion criterion, std::span<const int> failed_splits = {});

struct CvConfig {
    Method method = Method::MV;
    int horizon = 1;
    std::vector<Criterion> criteria{Criterion::VarianceReduction, Criterion::VaR};
    int k = 2;
    // Minimum horizon-differenced observations per test group; default
    // max(10, 2 * horizon).
    std::optional<std::size_t> min_obs;
    double alpha = 0.05;
    std::optional<int> imf_index;
    unsigned threads = 1;
    // Evaluate splits in reverse; results must not change.
    bool reverse_order = false;

    std::size_t effective_min_obs() const;
};

struct GroupExclusion {
    int group = 0;
    std::string reason;
};

struct SplitFailure {
    int split = 0;
    std::string reason;
};

struct PathReport {
    Method method = Method::MV;
    int horizon = 1;
    Criterion criterion = Criterion::VarianceReduction;
    int n_groups = 0;
    int k = 0;
    int n_paths = 0;
    std::vector<double> split_ratios;                 // NaN for failed splits
    std::vector<std::optional<double>> per_split_values;
    CellScores cells;
    std::vector<int> path_ids;
    std::vector<double> per_path_values;
    Moments stats;
    std::vector<GroupExclusion> excluded_groups;
    std::vector<SplitFailure> failed_splits;
    std::vector<int> dropped_paths;
};

std::vector<PathReport> run_cv(const HedgeEngine& engine, const GroupPartition& groups,
                               const CvConfig& config);

} // namespace hedgeemd
