#include "hedgeemd/series.hpp"

#include "hedgeemd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <fstream>
#include <sstream>

namespace hedgeemd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "N/A" || cell == "NaN" ||
           cell == "nan";
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::Parse, "bad integer");
    return v;
}

std::size_t column_index(const std::vector<std::string_view>& header,
                         const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error(ErrorCode::Parse, "column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
}

void check_kind_inputs(double v, DiffKind kind) {
    if (kind == DiffKind::LogDiff && !(v > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "log difference of a non-positive value");
}

void append_diffs(std::span<const double> x, IndexRange seg, int horizon,
                  DiffKind kind, int stride, ReturnSeries& out) {
    const auto h = static_cast<std::size_t>(horizon);
    if (seg.size() <= h) return;
    for (std::size_t t = seg.begin + h; t < seg.end;
         t += static_cast<std::size_t>(stride)) {
        const double later = x[t];
        const double earlier = x[t - h];
        double v;
        if (kind == DiffKind::LogDiff) {
            check_kind_inputs(later, kind);
            check_kind_inputs(earlier, kind);
            v = std::log(later) - std::log(earlier);
        } else {
            v = later - earlier;
        }
        out.values.push_back(v);
        out.origin_index.push_back(t);
    }
}

void check_diff_args(int horizon, int stride) {
    if (horizon < 1)
        throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    if (stride < 1)
        throw Error(ErrorCode::InvalidArgument, "stride must be positive");
}

} // namespace

std::string_view to_string(Leg leg) {
    return leg == Leg::Spot ? "spot" : "futures";
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw Error(ErrorCode::Parse, "unparseable date '" + std::string(text) + "'");
    try {
        const int y = parse_int(text.substr(0, 4));
        const int m = parse_int(text.substr(5, 2));
        const int d = parse_int(text.substr(8, 2));
        const std::chrono::year_month_day ymd{
            std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) throw Error(ErrorCode::Parse, "invalid calendar date");
        return std::chrono::sys_days{ymd};
    } catch (const Error&) {
        throw Error(ErrorCode::Parse, "unparseable date '" + std::string(text) + "'");
    }
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

int year_of(Date date) {
    return static_cast<int>(std::chrono::year_month_day{date}.year());
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

PriceSeries::PriceSeries(std::string id, Leg leg, std::vector<Date> timestamps,
                         std::vector<double> values)
    : id_(std::move(id)), leg_(leg), timestamps_(std::move(timestamps)),
      values_(std::move(values)) {
    if (timestamps_.size() != values_.size())
        throw Error(ErrorCode::Misaligned, "timestamps and values differ in length");
    if (values_.size() < 2)
        throw Error(ErrorCode::EmptyData, "a price series needs at least 2 observations");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] <= 0.0)
            throw Error(ErrorCode::Parse,
                        "non-positive or non-finite price at " +
                            format_date(timestamps_[i]));
        if (i > 0 && timestamps_[i] <= timestamps_[i - 1])
            throw Error(ErrorCode::Parse, "timestamps not strictly increasing at " +
                                              format_date(timestamps_[i]));
    }
}

PriceSeries PriceSeries::slice(IndexRange range) const {
    if (range.end > size() || range.begin >= range.end)
        throw Error(ErrorCode::InvalidArgument, "slice out of bounds");
    return PriceSeries(id_, leg_,
                       {timestamps_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                        timestamps_.begin() + static_cast<std::ptrdiff_t>(range.end)},
                       {values_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                        values_.begin() + static_cast<std::ptrdiff_t>(range.end)});
}

std::vector<double> PriceSeries::log_values() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [](double v) { return std::log(v); });
    return out;
}

std::vector<IndexRange> merge_ranges(std::span<const IndexRange> ranges,
                                     std::size_t bound) {
    std::vector<IndexRange> sorted(ranges.begin(), ranges.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const IndexRange& a, const IndexRange& b) { return a.begin < b.begin; });
    std::vector<IndexRange> merged;
    for (const auto& r : sorted) {
        if (r.empty() || r.end > bound)
            throw Error(ErrorCode::InvalidArgument, "range empty or out of bounds");
        if (!merged.empty()) {
            auto& last = merged.back();
            if (r.begin < last.end)
                throw Error(ErrorCode::InvalidArgument, "overlapping ranges");
            if (r.begin == last.end) {
                last.end = r.end;
                continue;
            }
        }
        merged.push_back(r);
    }
    return merged;
}

SegmentedSeries::SegmentedSeries(const PriceSeries& source,
                                 std::vector<IndexRange> ranges)
    : ranges_(merge_ranges(ranges, source.size())) {
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
        // A one-sample segment cannot be a PriceSeries; it still occupies
        // its range but yields no differences.
        if (ranges_[i].size() >= 2) segments_.push_back(source.slice(ranges_[i]));
        if (i > 0) gaps_.push_back(ranges_[i].begin - ranges_[i - 1].end);
    }
}

std::size_t SegmentedSeries::total_size() const {
    std::size_t n = 0;
    for (const auto& r : ranges_) n += r.size();
    return n;
}

SegmentedSeries restrict(const PriceSeries& series,
                         std::span<const IndexRange> groups) {
    return SegmentedSeries(series, {groups.begin(), groups.end()});
}

ReturnSeries horizon_diff(std::span<const double> x, int horizon, DiffKind kind,
                          int stride) {
    check_diff_args(horizon, stride);
    if (static_cast<std::size_t>(horizon) >= x.size())
        throw Error(ErrorCode::InsufficientData,
                    "horizon " + std::to_string(horizon) + " not shorter than series length " +
                        std::to_string(x.size()));
    ReturnSeries out{horizon, kind, {}, {}};
    append_diffs(x, IndexRange{0, x.size()}, horizon, kind, stride, out);
    return out;
}

ReturnSeries horizon_diff(const PriceSeries& series, int horizon, DiffKind kind,
                          int stride) {
    return horizon_diff(std::span<const double>(series.values()), horizon, kind, stride);
}

ReturnSeries horizon_diff(std::span<const double> x,
                          std::span<const IndexRange> segments, int horizon,
                          DiffKind kind, int stride) {
    check_diff_args(horizon, stride);
    ReturnSeries out{horizon, kind, {}, {}};
    for (const auto& seg : segments) {
        if (seg.end > x.size())
            throw Error(ErrorCode::InvalidArgument, "segment out of bounds");
        append_diffs(x, seg, horizon, kind, stride, out);
    }
    return out;
}

ReturnSeries horizon_diff(const SegmentedSeries& series, int horizon,
                          DiffKind kind, int stride) {
    check_diff_args(horizon, stride);
    ReturnSeries out{horizon, kind, {}, {}};
    std::size_t s = 0;
    for (const auto& range : series.ranges()) {
        if (range.size() < 2) continue;
        const auto& seg = series.segments()[s++];
        ReturnSeries local{horizon, kind, {}, {}};
        append_diffs(seg.values(), IndexRange{0, seg.size()}, horizon, kind, stride, local);
        out.values.insert(out.values.end(), local.values.begin(), local.values.end());
        for (auto idx : local.origin_index) out.origin_index.push_back(idx + range.begin);
    }
    return out;
}

PairedSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                      const std::string& id) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyData, "empty file " + path.string());
    const std::string header_line = line;
    const auto header = split_row(header_line);
    const auto date_col = column_index(header, schema.date_column);
    const auto spot_col = column_index(header, schema.spot_column);
    const auto fut_col = column_index(header, schema.futures_column);

    std::vector<Date> dates;
    std::vector<double> spot, fut;
    std::size_t dropped = 0;
    std::size_t row = 1;
    std::optional<Date> last_date;

    auto parse_price = [&](std::string_view cell, const char* leg) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size())
            throw Error(ErrorCode::Parse, "row " + std::to_string(row) + ": unparseable " +
                                              leg + " price '" + std::string(cell) + "'");
        if (!std::isfinite(v) || v <= 0.0)
            throw Error(ErrorCode::Parse, "row " + std::to_string(row) + ": non-positive " +
                                              leg + " price");
        return v;
    };

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        auto cell = [&](std::size_t c) {
            return c < cells.size() ? cells[c] : std::string_view{};
        };
        Date date;
        try {
            date = parse_date(cell(date_col));
        } catch (const Error&) {
            throw Error(ErrorCode::Parse, "row " + std::to_string(row) + ": unparseable date '" +
                                              std::string(cell(date_col)) + "'");
        }
        if (last_date && date <= *last_date) {
            throw Error(ErrorCode::Parse,
                        "row " + std::to_string(row) + ": date " + format_date(date) +
                            (date == *last_date ? " duplicated" : " out of order"));
        }
        last_date = date;
        if (is_missing(cell(spot_col)) || is_missing(cell(fut_col))) {
            ++dropped;
            continue;
        }
        const double s = parse_price(cell(spot_col), "spot");
        const double f = parse_price(cell(fut_col), "futures");
        dates.push_back(date);
        spot.push_back(s);
        fut.push_back(f);
    }
    if (dates.size() < 2)
        throw Error(ErrorCode::EmptyData,
                    "fewer than 2 usable rows in " + path.string());

    const std::string base = id.empty() ? path.stem().string() : id;
    return PairedSeries{PriceSeries(base, Leg::Spot, dates, std::move(spot)),
                        PriceSeries(base, Leg::Futures, dates, std::move(fut)), dropped};
}

void write_csv(const std::filesystem::path& path, const PriceSeries& spot,
               const PriceSeries& futures, const CsvSchema& schema) {
    if (spot.timestamps() != futures.timestamps())
        throw Error(ErrorCode::Misaligned, "spot and futures timestamps differ");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
    out << schema.date_column << ',' << schema.spot_column << ','
        << schema.futures_column << '\n';
    for (std::size_t i = 0; i < spot.size(); ++i) {
        out << format_date(spot.timestamps()[i]) << ',' << format_double(spot.values()[i])
            << ',' << format_double(futures.values()[i]) << '\n';
    }
}

} // namespace hedgeemd
