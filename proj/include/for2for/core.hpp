#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace for2for {

enum class Frequency { Yearly, Quarterly, Monthly, Weekly, Daily, Hourly };

inline constexpr std::array<Frequency, 6> kAllFrequencies = {
    Frequency::Yearly, Frequency::Quarterly, Frequency::Monthly,
    Frequency::Weekly, Frequency::Daily,     Frequency::Hourly};

/**
 * One of the six M4 frequency classes with its forecast horizon and
 * seasonal period. Horizons are fixed; the seasonal period defaults to the
 * M4 convention and may be overridden.
 */
class FrequencyClass {
public:
    static FrequencyClass of(Frequency name);

    /// Accepts "yearly", "Quarterly", "M", ... (case-insensitive).
    static FrequencyClass parse(std::string_view text);

    FrequencyClass with_seasonal_period(int period) const;

    Frequency name() const noexcept { return name_; }
    int horizon() const noexcept { return horizon_; }
    int seasonal_period() const noexcept { return seasonal_period_; }
    std::string_view label() const noexcept;

    friend bool operator==(const FrequencyClass&, const FrequencyClass&) = default;

private:
    FrequencyClass(Frequency name, int horizon, int period)
        : name_(name), horizon_(horizon), seasonal_period_(period) {}

    Frequency name_;
    int horizon_;
    int seasonal_period_;
};

std::string_view to_string(Frequency f) noexcept;

/// Univariate series; values are validated to be finite and at least two long.
class TimeSeries {
public:
    TimeSeries(std::string id, FrequencyClass frequency, std::vector<double> values,
               std::optional<std::string> domain_tag = std::nullopt);

    const std::string& id() const noexcept { return id_; }
    const FrequencyClass& frequency() const noexcept { return frequency_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double last() const noexcept { return values_.back(); }
    const std::optional<std::string>& domain_tag() const noexcept { return domain_tag_; }

    /// First `n` observations, same id and frequency.
    TimeSeries head(std::size_t n) const;

private:
    std::string id_;
    FrequencyClass frequency_;
    std::vector<double> values_;
    std::optional<std::string> domain_tag_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// h x M matrix of base-model forecasts for one series; column j holds
/// model_ids[j], row i the forecast i+1 steps ahead.
class ForecastMatrix {
public:
    ForecastMatrix(std::string series_id, std::vector<std::string> model_ids, Matrix values);

    const std::string& series_id() const noexcept { return series_id_; }
    std::size_t horizon() const noexcept { return values_.rows(); }
    const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
    const Matrix& values() const noexcept { return values_; }

    /// Index of `model_id`; throws DataError for unknown ids.
    std::size_t column_index(std::string_view model_id) const;
    std::vector<double> column(std::string_view model_id) const;

private:
    std::string series_id_;
    std::vector<std::string> model_ids_;
    Matrix values_;
};

enum class ScaleMode { LastObsLog, MaseScale };

std::string_view to_string(ScaleMode mode) noexcept;
ScaleMode parse_scale_mode(std::string_view text);

struct ScaleRecord {
    std::string series_id;
    double normalizer = 1.0;
    ScaleMode mode = ScaleMode::LastObsLog;

    /// Throws DataError unless normalizer is positive and finite.
    void validate() const;
};

struct TransformedSample {
    Matrix features;
    std::optional<std::vector<double>> label;
    ScaleRecord scale;
    FrequencyClass frequency;

    std::size_t horizon() const noexcept { return features.rows(); }
};

}  // namespace for2for
