#include "for2for/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <mutex>
#include <unordered_set>

#include "for2for/errors.hpp"
#include "for2for/log.hpp"

namespace for2for {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& warning_handler() {
    static WarningHandler handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(warning_mutex());
    if (warning_handler()) warning_handler()(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(warning_mutex());
    return std::exchange(warning_handler(), std::move(handler));
}

FrequencyClass FrequencyClass::of(Frequency name) {
    switch (name) {
        case Frequency::Yearly: return {name, 6, 1};
        case Frequency::Quarterly: return {name, 8, 4};
        case Frequency::Monthly: return {name, 18, 12};
        case Frequency::Weekly: return {name, 13, 1};
        case Frequency::Daily: return {name, 14, 1};
        case Frequency::Hourly: return {name, 48, 24};
    }
    throw UsageError("unknown frequency class");
}

FrequencyClass FrequencyClass::parse(std::string_view text) {
    const std::string t = lower(text);
    if (t == "yearly" || t == "y") return of(Frequency::Yearly);
    if (t == "quarterly" || t == "q") return of(Frequency::Quarterly);
    if (t == "monthly" || t == "m") return of(Frequency::Monthly);
    if (t == "weekly" || t == "w") return of(Frequency::Weekly);
    if (t == "daily" || t == "d") return of(Frequency::Daily);
    if (t == "hourly" || t == "h") return of(Frequency::Hourly);
    throw UsageError("unknown frequency '" + std::string(text) + "'");
}

FrequencyClass FrequencyClass::with_seasonal_period(int period) const {
    if (period < 1) throw UsageError("seasonal period must be >= 1");
    FrequencyClass copy = *this;
    copy.seasonal_period_ = period;
    return copy;
}

std::string_view FrequencyClass::label() const noexcept { return to_string(name_); }

std::string_view to_string(Frequency f) noexcept {
    switch (f) {
        case Frequency::Yearly: return "Yearly";
        case Frequency::Quarterly: return "Quarterly";
        case Frequency::Monthly: return "Monthly";
        case Frequency::Weekly: return "Weekly";
        case Frequency::Daily: return "Daily";
        case Frequency::Hourly: return "Hourly";
    }
    return "?";
}

TimeSeries::TimeSeries(std::string id, FrequencyClass frequency, std::vector<double> values,
                       std::optional<std::string> domain_tag)
    : id_(std::move(id)),
      frequency_(frequency),
      values_(std::move(values)),
      domain_tag_(std::move(domain_tag)) {
    if (values_.empty()) throw DataError("series '" + id_ + "' is empty");
    if (values_.size() < 2)
        throw DataError("series '" + id_ + "' has length 1; at least 2 observations required");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw DataError("series '" + id_ + "' has a non-finite value at position " +
                            std::to_string(i + 1));
    }
}

TimeSeries TimeSeries::head(std::size_t n) const {
    n = std::min(n, values_.size());
    return TimeSeries(id_, frequency_, std::vector<double>(values_.begin(), values_.begin() + n),
                      domain_tag_);
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
    if (values.size() != rows_) throw DataError("column length does not match matrix rows");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

ForecastMatrix::ForecastMatrix(std::string series_id, std::vector<std::string> model_ids,
                               Matrix values)
    : series_id_(std::move(series_id)), model_ids_(std::move(model_ids)), values_(std::move(values)) {
    if (values_.rows() == 0) throw DataError("forecast matrix for '" + series_id_ + "' has no rows");
    if (values_.cols() != model_ids_.size())
        throw DataError("forecast matrix for '" + series_id_ + "' has " +
                        std::to_string(values_.cols()) + " columns but " +
                        std::to_string(model_ids_.size()) + " model ids");
    std::unordered_set<std::string> seen;
    for (const auto& id : model_ids_) {
        if (!seen.insert(id).second)
            throw DataError("duplicate model id '" + id + "' in forecast matrix");
    }
    for (double v : values_.data()) {
        if (!std::isfinite(v))
            throw DataError("forecast matrix for '" + series_id_ + "' has a non-finite entry");
    }
}

std::size_t ForecastMatrix::column_index(std::string_view model_id) const {
    auto it = std::find(model_ids_.begin(), model_ids_.end(), model_id);
    if (it == model_ids_.end())
        throw DataError("unknown model id '" + std::string(model_id) + "'");
    return static_cast<std::size_t>(it - model_ids_.begin());
}

std::vector<double> ForecastMatrix::column(std::string_view model_id) const {
    return values_.column(column_index(model_id));
}

std::string_view to_string(ScaleMode mode) noexcept {
    return mode == ScaleMode::LastObsLog ? "last_obs_log" : "mase_scale";
}

ScaleMode parse_scale_mode(std::string_view text) {
    const std::string t = lower(text);
    if (t == "last_obs_log" || t == "lastobslog" || t == "log") return ScaleMode::LastObsLog;
    if (t == "mase_scale" || t == "masescale" || t == "mase") return ScaleMode::MaseScale;
    throw UsageError("unknown preprocessing mode '" + std::string(text) + "'");
}

void ScaleRecord::validate() const {
    if (!(normalizer > 0.0) || !std::isfinite(normalizer))
        throw DataError("series '" + series_id + "': normalizer must be positive and finite");
}

}  // namespace for2for
