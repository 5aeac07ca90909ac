#include "for2for/preprocess.hpp"

#include <cmath>
#include <string>

#include "for2for/errors.hpp"
#include "for2for/log.hpp"
#include "for2for/metrics.hpp"

namespace for2for {

namespace {

constexpr double kMaxLogMagnitude = 700.0;

void require_finite(double x) {
    if (!std::isfinite(x)) throw DataError("cannot transform a non-finite value");
}

}  // namespace

double clip_floor(double x, const ClipPolicy& policy) {
    if (policy.negatives_only) return x < 0.0 ? policy.floor : x;
    return x < policy.floor ? policy.floor : x;
}

double transform(double x, const ScaleRecord& scale, const ClipPolicy& policy) {
    require_finite(x);
    if (scale.mode == ScaleMode::MaseScale) return x / scale.normalizer;
    const double clipped = clip_floor(x, policy);
    if (clipped <= 0.0)
        throw DataError("series '" + scale.series_id + "': non-positive forecast survives clipping");
    return std::log(clipped / scale.normalizer);
}

std::vector<double> transform(std::span<const double> x, const ScaleRecord& scale, const ClipPolicy& policy) {
    scale.validate();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = transform(x[i], scale, policy);
    return out;
}

Matrix transform(const Matrix& x, const ScaleRecord& scale, const ClipPolicy& policy) {
    scale.validate();
    Matrix out(x.rows(), x.cols());
    auto src = x.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = transform(src[i], scale, policy);
    return out;
}

double inverse_transform(double y, const ScaleRecord& scale) {
    if (!std::isfinite(y)) throw NumericError("series '" + scale.series_id + "': non-finite model output");
    if (scale.mode == ScaleMode::MaseScale) return scale.normalizer * y;
    if (std::abs(y) > kMaxLogMagnitude)
        throw NumericError("series '" + scale.series_id + "': model output " + std::to_string(y) +
                           " overflows the inverse log transform");
    return scale.normalizer * std::exp(y);
}

std::vector<double> inverse_transform(std::span<const double> y, const ScaleRecord& scale) {
    scale.validate();
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = inverse_transform(y[i], scale);
    return out;
}

std::vector<double> transform_actuals(std::span<const double> x, const ScaleRecord& scale) {
    scale.validate();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_finite(x[i]);
        if (scale.mode == ScaleMode::MaseScale) {
            out[i] = x[i] / scale.normalizer;
        } else {
            if (x[i] <= 0.0)
                throw DataError("series '" + scale.series_id + "': non-positive actual cannot be log-scaled");
            out[i] = std::log(x[i] / scale.normalizer);
        }
    }
    return out;
}

ScaleRecord make_scale(const TimeSeries& history, ScaleMode mode) {
    ScaleRecord scale;
    scale.series_id = history.id();
    scale.mode = mode;
    scale.normalizer = mode == ScaleMode::LastObsLog
                           ? history.last()
                           : mase_denominator(history.values(), history.frequency().seasonal_period());
    scale.validate();
    return scale;
}

namespace {

std::optional<TransformedSample> build_window(const TimeSeries& series, std::size_t history_length, int h,
                                              const BaseForecastFn& base, const SampleOptions& options) {
    const TimeSeries history = series.head(history_length);
    const auto& values = series.values();
    std::span<const double> actual(values.data() + history_length, static_cast<std::size_t>(h));
    try {
        ScaleRecord scale = make_scale(history, options.mode);
        const ForecastMatrix fm = base(history, h);
        TransformedSample sample{transform(fm.values(), scale, options.clip),
                                 transform_actuals(actual, scale), scale, series.frequency()};
        if (options.mode == ScaleMode::LastObsLog) {
            for (double a : actual) {
                if (a < options.clip.floor) {
                    warn("series '" + series.id() + "': actual below the clip floor; labels are not clipped");
                    break;
                }
            }
        }
        return sample;
    } catch (const DataError& e) {
        warn("series '" + series.id() + "': training sample skipped: " + e.what());
        return std::nullopt;
    }
}

}  // namespace

std::optional<TransformedSample> make_training_sample(const TimeSeries& series, const BaseForecastFn& base,
                                                      const SampleOptions& options) {
    const int h = series.frequency().horizon();
    const std::size_t l = series.size();
    if (l < static_cast<std::size_t>(h) + 2) {
        warn("series '" + series.id() + "' (length " + std::to_string(l) +
             ") is too short for a training sample at horizon " + std::to_string(h) + "; skipped");
        return std::nullopt;
    }
    return build_window(series, l - static_cast<std::size_t>(h), h, base, options);
}

TransformedSample make_inference_sample(const TimeSeries& series, int horizon, const BaseForecastFn& base,
                                        const SampleOptions& options) {
    ScaleRecord scale = make_scale(series, options.mode);
    const ForecastMatrix fm = base(series, horizon);
    return TransformedSample{transform(fm.values(), scale, options.clip), std::nullopt, scale, series.frequency()};
}

std::vector<TransformedSample> stretch_window_samples(const TimeSeries& series, int k_max,
                                                      const BaseForecastFn& base, const SampleOptions& options) {
    if (k_max < 0) throw UsageError("stretch window k_max must be >= 0");
    std::vector<TransformedSample> out;
    const int h = series.frequency().horizon();
    const long l = static_cast<long>(series.size());
    for (int k = 0; k <= k_max; ++k) {
        const long history = l - h - k;
        if (history < 2) break;
        if (auto s = build_window(series, static_cast<std::size_t>(history), h, base, options))
            out.push_back(std::move(*s));
    }
    return out;
}

}  // namespace for2for
