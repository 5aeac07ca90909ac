#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "for2for/core.hpp"
#include "for2for/log.hpp"

namespace for2for::testing {

/// Relative closeness with an absolute floor.
inline bool close(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

/// Trend + period-p seasonality + Gaussian noise, kept well above 10.
inline std::vector<double> seasonal_series(std::size_t n, int period, double level, double slope, double amplitude,
                                           double noise, std::mt19937_64& gen) {
    std::normal_distribution<double> eps(0.0, noise);
    std::vector<double> x(n);
    const double pi = std::acos(-1.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double season = period > 1 ? amplitude * std::sin(2.0 * pi * static_cast<double>(t) / period) : 0.0;
        x[t] = level + slope * static_cast<double>(t) + season + eps(gen);
    }
    return x;
}

inline TimeSeries quarterly(std::string id, std::vector<double> values) {
    return TimeSeries(std::move(id), FrequencyClass::of(Frequency::Quarterly), std::move(values));
}

/// Collects warnings for the lifetime of the object.
class WarningCapture {
public:
    WarningCapture() {
        previous_ = set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
    }
    ~WarningCapture() { set_warning_handler(std::move(previous_)); }
    std::vector<std::string> messages;

private:
    WarningHandler previous_;
};

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("for2for_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace for2for::testing
