#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hedgeemd {

using Date = std::chrono::sys_days;

enum class Leg { Spot, Futures };
enum class DiffKind { LevelDiff, LogDiff };

std::string_view to_string(Leg leg);

// Strict ISO-8601 calendar date, YYYY-MM-DD.
Date parse_date(std::string_view text);
std::string format_date(Date date);
int year_of(Date date);

// Half-open index interval [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return end <= begin; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// A level series for one leg of a hedge. Immutable once built; the
/// constructor rejects non-increasing timestamps, non-positive or
/// non-finite values and series shorter than two observations.
class PriceSeries {
public:
    PriceSeries(std::string id, Leg leg, std::vector<Date> timestamps,
                std::vector<double> values);

    const std::string& id() const { return id_; }
    Leg leg() const { return leg_; }
    const std::vector<Date>& timestamps() const { return timestamps_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    PriceSeries slice(IndexRange range) const;
    std::vector<double> log_values() const;

private:
    std::string id_;
    Leg leg_;
    std::vector<Date> timestamps_;
    std::vector<double> values_;
};

/// Horizon differences of a series. `origin_index[i]` is the index in the
/// source series of the later endpoint of observation i.
struct ReturnSeries {
    int horizon = 1;
    DiffKind kind = DiffKind::LevelDiff;
    std::vector<double> values;
    std::vector<std::size_t> origin_index;

    std::size_t size() const { return values.size(); }
};

/// Chronologically ordered, non-overlapping slices of one source series.
/// Differencing never crosses from one segment into the next.
class SegmentedSeries {
public:
    SegmentedSeries(const PriceSeries& source, std::vector<IndexRange> ranges);

    const std::vector<IndexRange>& ranges() const { return ranges_; }
    const std::vector<PriceSeries>& segments() const { return segments_; }
    // Number of source samples skipped between segment i and i + 1.
    const std::vector<std::size_t>& gaps() const { return gaps_; }
    std::size_t total_size() const;

private:
    std::vector<IndexRange> ranges_;
    std::vector<PriceSeries> segments_;
    std::vector<std::size_t> gaps_;
};

// Sorts the ranges, rejects overlaps and out-of-bounds ranges, and fuses
// ranges that touch end to start.
std::vector<IndexRange> merge_ranges(std::span<const IndexRange> ranges,
                                     std::size_t bound);

SegmentedSeries restrict(const PriceSeries& series,
                         std::span<const IndexRange> groups);

/// Overlapping horizon differences x_t - x_{t-h} (or of logs). `stride`
/// spaces consecutive observations; 1 gives the overlapping form and
/// `horizon` the block form.
ReturnSeries horizon_diff(std::span<const double> x, int horizon,
                          DiffKind kind, int stride = 1);
ReturnSeries horizon_diff(const PriceSeries& series, int horizon,
                          DiffKind kind, int stride = 1);

// Differences taken inside each segment and concatenated. Segments not
// longer than the horizon contribute nothing.
ReturnSeries horizon_diff(std::span<const double> x,
                          std::span<const IndexRange> segments, int horizon,
                          DiffKind kind, int stride = 1);
ReturnSeries horizon_diff(const SegmentedSeries& series, int horizon,
                          DiffKind kind, int stride = 1);

struct CsvSchema {
    std::string date_column = "date";
    std::string spot_column = "spot";
    std::string futures_column = "futures";
};

struct PairedSeries {
    PriceSeries spot;
    PriceSeries futures;
    std::size_t dropped_rows = 0;
};

PairedSeries load_csv(const std::filesystem::path& path,
                      const CsvSchema& schema = {},
                      const std::string& id = "");

// Writes the pair in the ingestion format with shortest round-trip
// number formatting, so load_csv(write_csv(x)) == x exactly.
void write_csv(const std::filesystem::path& path, const PriceSeries& spot,
               const PriceSeries& futures, const CsvSchema& schema = {});

std::string format_double(double value);

} // namespace hedgeemd
