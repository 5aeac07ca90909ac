#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "for2for/config.hpp"
#include "for2for/core.hpp"

namespace for2for {

/// max(x, floor); with `negatives_only` only x < 0 is raised.
double clip_floor(double x, const ClipPolicy& policy = {});

/// LastObsLog: ln(clip(x) / normalizer). MaseScale: x / normalizer.
double transform(double x, const ScaleRecord& scale, const ClipPolicy& policy = {});
std::vector<double> transform(std::span<const double> x, const ScaleRecord& scale,
                              const ClipPolicy& policy = {});
Matrix transform(const Matrix& x, const ScaleRecord& scale, const ClipPolicy& policy = {});

/// Inverse of `transform` on the unclipped domain. Throws NumericError when
/// |y| > 700 in log mode (a diverged model).
double inverse_transform(double y, const ScaleRecord& scale);
std::vector<double> inverse_transform(std::span<const double> y, const ScaleRecord& scale);

/// Transform for actuals used as labels: no clipping. Throws DataError for
/// non-positive actuals in log mode.
std::vector<double> transform_actuals(std::span<const double> x, const ScaleRecord& scale);

/// Computes the base-forecast matrix for a (possibly truncated) series.
using BaseForecastFn = std::function<ForecastMatrix(const TimeSeries& history, int horizon)>;

struct SampleOptions {
    ScaleMode mode = ScaleMode::LastObsLog;
    ClipPolicy clip;
};

ScaleRecord make_scale(const TimeSeries& history, ScaleMode mode);

/// Features from the first l-h observations, label from the last h.
/// Returns nullopt (with a warning) when the series is too short or cannot be scaled.
std::optional<TransformedSample> make_training_sample(const TimeSeries& series, const BaseForecastFn& base,
                                                      const SampleOptions& options = {});

/// Features from the complete series; no label.
TransformedSample make_inference_sample(const TimeSeries& series, int horizon, const BaseForecastFn& base,
                                        const SampleOptions& options = {});

/// Stretching windows: for k = 0..k_max, history = first l-h-k observations
/// (skipped when shorter than 2), label = the following h observations.
std::vector<TransformedSample> stretch_window_samples(const TimeSeries& series, int k_max,
                                                      const BaseForecastFn& base,
                                                      const SampleOptions& options = {});

}  // namespace for2for
