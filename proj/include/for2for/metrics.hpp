#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "for2for/core.hpp"
#include "for2for/ingest.hpp"

namespace for2for {

/// sMAPE in percent. Throws DataError if |actual|+|forecast| is 0 at any step.
double smape(std::span<const double> actual, std::span<const double> forecast);

/// Mean absolute in-sample seasonal difference at lag p; the MASE denominator.
/// Throws DataError when l <= p or the denominator is 0.
double mase_denominator(std::span<const double> insample, int period);

double mase(std::span<const double> actual, std::span<const double> forecast,
            std::span<const double> insample, int period);

struct AccuracyPair {
    double smape = 0.0;
    double mase = 0.0;
};

/// 0.5 * (sMAPE / sMAPE_naive2 + MASE / MASE_naive2).
double owa(const AccuracyPair& model, const AccuracyPair& naive2);

struct SeriesMetrics {
    std::string series_id;
    Frequency frequency = Frequency::Yearly;
    AccuracyPair model;
    std::optional<AccuracyPair> naive2;
};

struct ReportRow {
    double smape = 0.0;
    double mase = 0.0;
    std::optional<double> owa;
    std::size_t n = 0;
    std::optional<AccuracyPair> naive2;
};

struct MetricsReport {
    std::map<Frequency, ReportRow> per_frequency;
    ReportRow total;
};

/// Means of sMAPE and MASE per frequency and overall; OWA is the ratio of the
/// means against Naive2's means (present only when every series has Naive2).
MetricsReport aggregate(std::span<const SeriesMetrics> metrics);

/// `frequency,n,smape,mase,owa` rows plus a Total row.
void write_report_csv(std::ostream& out, const MetricsReport& report);
void write_report_table(std::ostream& out, const MetricsReport& report);

/**
 * Scores forecasts against actuals with Naive2 computed from the in-sample
 * data. Series whose MASE denominator is zero are excluded with a warning.
 */
struct EvaluationInput {
    const TimeSeries* insample = nullptr;
    std::span<const double> actual;
    std::span<const double> forecast;
};
std::vector<SeriesMetrics> score_series(std::span<const EvaluationInput> inputs);

struct Evaluation {
    std::vector<SeriesMetrics> series;
    MetricsReport report;
};

/// Scores `forecasts` against `actuals` for the series in `insample`. The id
/// sets of forecasts and actuals must match; offenders are listed in the error.
Evaluation evaluate_forecasts(std::span<const TimeSeries> insample, const ForecastTable& actuals,
                              const ForecastTable& forecasts);

}  // namespace for2for
