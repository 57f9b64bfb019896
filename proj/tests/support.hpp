#pragma once

#include "doctest.h"
#include "hedgeemd/error.hpp"
#include "hedgeemd/series.hpp"
#include "hedgeemd/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixture {

using namespace hedgeemd;

inline std::vector<Date> days(std::size_t n) {
    return business_days(std::chrono::sys_days{std::chrono::year{2010} / 1 / 4}, n);
}

inline PriceSeries series(std::vector<double> values, Leg leg = Leg::Spot) {
    const auto n = values.size();
    return PriceSeries("x", leg, days(n), std::move(values));
}

inline std::vector<double> sine(std::size_t n, double period, double amp = 1.0, double offset = 0.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = offset + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    return x;
}

inline std::vector<double> normals(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    CounterRng rng(seed, 7);
    std::vector<double> x(n);
    for (auto& v : x) v = sigma * rng.normal();
    return x;
}

// Random-walk level series that stays positive.
inline std::vector<double> walk(std::size_t n, std::uint64_t seed, double sigma = 0.01) {
    const auto e = normals(n, seed, sigma);
    std::vector<double> x(n);
    double lv = std::log(100.0);
    for (std::size_t t = 0; t < n; ++t) {
        lv += e[t];
        x[t] = std::exp(lv);
    }
    return x;
}

inline double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double cov(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("hedgeemd_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class F>
ErrorCode error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

} // namespace fixture
