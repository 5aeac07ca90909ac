#pragma once

#include <optional>
#include <span>
#include <vector>

#include "for2for/core.hpp"
#include "for2for/ingest.hpp"

namespace for2for {

/// Multiplicative (or, internally, additive) classical decomposition result.
struct SeasonalDecomposition {
    /// One index per season position; position k applies to observation t with t % p == k.
    std::vector<double> seasonal_indices;
    std::vector<double> deseasonalized;
    bool is_seasonal = false;
};

/// Sample autocorrelations at lags 0..max_lag (lag 0 is 1; all zero for a constant series).
std::vector<double> acf(std::span<const double> x, int max_lag);

/// 90% ACF significance test at the seasonal lag; false for p = 1 or l < 3p.
bool classify_seasonal(std::span<const double> x, int period);

/// Classical multiplicative decomposition with a centred moving average.
/// Requires l >= 2p and positive values. Indices average to 1.
SeasonalDecomposition decompose_multiplicative(std::span<const double> x, int period);

/// Seasonality test, then multiplicative decomposition when seasonal;
/// otherwise unit indices and the series unchanged.
SeasonalDecomposition seasonal_adjust(std::span<const double> x, int period);

/// Index for forecast step i (1-based) of a series of length l.
double future_index(const SeasonalDecomposition& d, std::size_t length, int step);

std::vector<double> forecast_naive(std::span<const double> x, int h);
std::vector<double> forecast_snaive(std::span<const double> x, int h, int period);
std::vector<double> forecast_rwdrift(std::span<const double> x, int h);
std::vector<double> forecast_theta(std::span<const double> x, int h, int period);
std::vector<double> forecast_ets(std::span<const double> x, int h, int period);
std::vector<double> forecast_stlm_ar(std::span<const double> x, int h, int period);
std::vector<double> forecast_naive2(std::span<const double> x, int h, int period);

/// Simple exponential smoothing with alpha chosen by in-sample SSE (level starts at x[0]).
struct SesFit {
    double alpha = 0.5;
    double level = 0.0;
    double sse = 0.0;
};
SesFit fit_ses(std::span<const double> x);

/// Yule-Walker AR fit on a demeaned series, order chosen by AIC over 1..max_order.
struct ArFit {
    double mean = 0.0;
    std::vector<double> coefficients;
    double innovation_variance = 0.0;
};
ArFit fit_ar_yule_walker(std::span<const double> x, int max_order);

enum class EtsTrend { None, Additive, Damped };

struct EtsFit {
    EtsTrend trend = EtsTrend::None;
    bool seasonal = false;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double phi = 1.0;
    double aicc = 0.0;
    std::vector<double> forecast;
};

/// Fits every admissible candidate and returns the AICc winner.
EtsFit fit_ets(std::span<const double> x, int h, int period);

/// AR fit on the (multiplicatively or additively) adjusted series plus its forecast.
struct StlmArFit {
    SeasonalDecomposition decomposition;
    bool multiplicative = true;
    ArFit ar;
    std::vector<double> forecast;
};
StlmArFit fit_stlm_ar(std::span<const double> x, int h, int period);

struct ForecastAllOptions {
    bool prefer_external = false;
};

/**
 * Produces the h x 8 base-forecast matrix in lexicon order. Native models
 * that fail (or produce non-finite output) fall back to seasonal naive and
 * then naive. arima, tbats and nnetar come from `external` when supplied,
 * else the same fallback chain.
 */
ForecastMatrix forecast_all(const TimeSeries& series, int h, int period,
                            const ForecastColumns* external = nullptr,
                            ForecastAllOptions options = {});

}  // namespace for2for
