#include "for2for/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "for2for/baselines.hpp"
#include "for2for/errors.hpp"
#include "for2for/ingest.hpp"
#include "for2for/log.hpp"

namespace for2for {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw DataError("actual and forecast must be non-empty and of equal length (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

}  // namespace

double smape(std::span<const double> actual, std::span<const double> forecast) {
    require_same_length(actual, forecast);
    double acc = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double denom = std::abs(actual[t]) + std::abs(forecast[t]);
        if (denom == 0.0) throw DataError("sMAPE undefined: actual and forecast both zero at t=" + std::to_string(t + 1));
        acc += std::abs(actual[t] - forecast[t]) / denom;
    }
    return 2.0 / static_cast<double>(actual.size()) * acc * 100.0;
}

double mase_denominator(std::span<const double> insample, int period) {
    if (period < 1) throw DataError("seasonal period must be >= 1");
    const std::size_t p = static_cast<std::size_t>(period);
    if (insample.size() <= p)
        throw DataError("MASE needs more than " + std::to_string(period) + " in-sample observations");
    double acc = 0.0;
    for (std::size_t t = p; t < insample.size(); ++t) acc += std::abs(insample[t] - insample[t - p]);
    const double denom = acc / static_cast<double>(insample.size() - p);
    if (!(denom > 0.0)) throw DataError("MASE undefined: in-sample seasonal differences are all zero");
    return denom;
}

double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> insample,
            int period) {
    require_same_length(actual, forecast);
    const double denom = mase_denominator(insample, period);
    double acc = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) acc += std::abs(actual[t] - forecast[t]);
    return acc / static_cast<double>(actual.size()) / denom;
}

double owa(const AccuracyPair& model, const AccuracyPair& naive2) {
    if (!(naive2.smape > 0.0) || !(naive2.mase > 0.0))
        throw DataError("OWA needs positive Naive2 reference values");
    return 0.5 * (model.smape / naive2.smape + model.mase / naive2.mase);
}

namespace {

struct Accumulator {
    double smape = 0.0, mase = 0.0, n2_smape = 0.0, n2_mase = 0.0;
    std::size_t n = 0;
    bool all_naive2 = true;

    void add(const SeriesMetrics& m) {
        smape += m.model.smape;
        mase += m.model.mase;
        if (m.naive2) {
            n2_smape += m.naive2->smape;
            n2_mase += m.naive2->mase;
        } else {
            all_naive2 = false;
        }
        ++n;
    }

    ReportRow finish() const {
        ReportRow row;
        row.n = n;
        if (n == 0) return row;
        const double nd = static_cast<double>(n);
        row.smape = smape / nd;
        row.mase = mase / nd;
        if (all_naive2) {
            row.naive2 = AccuracyPair{n2_smape / nd, n2_mase / nd};
            if (row.naive2->smape > 0.0 && row.naive2->mase > 0.0)
                row.owa = owa({row.smape, row.mase}, *row.naive2);
        }
        return row;
    }
};

}  // namespace

MetricsReport aggregate(std::span<const SeriesMetrics> metrics) {
    if (metrics.empty()) throw DataError("cannot aggregate an empty set of series metrics");
    std::map<Frequency, Accumulator> groups;
    Accumulator total;
    for (const auto& m : metrics) {
        groups[m.frequency].add(m);
        total.add(m);
    }
    MetricsReport report;
    for (const auto& [f, acc] : groups) report.per_frequency[f] = acc.finish();
    report.total = total.finish();
    return report;
}

void write_report_csv(std::ostream& out, const MetricsReport& report) {
    out << "frequency,n,smape,mase,owa\n";
    auto row = [&](std::string_view name, const ReportRow& r) {
        out << name << ',' << r.n << ',' << format_double(r.smape) << ',' << format_double(r.mase) << ',';
        if (r.owa) out << format_double(*r.owa);
        out << '\n';
    };
    for (const auto& [f, r] : report.per_frequency) row(to_string(f), r);
    row("Total", report.total);
}

void write_report_table(std::ostream& out, const MetricsReport& report) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %8s %10s %10s %10s\n", "frequency", "n", "sMAPE", "MASE", "OWA");
    out << buf;
    auto row = [&](std::string_view name, const ReportRow& r) {
        char owa_buf[32] = "-";
        if (r.owa) std::snprintf(owa_buf, sizeof(owa_buf), "%.4f", *r.owa);
        std::snprintf(buf, sizeof(buf), "%-10.*s %8zu %10.4f %10.4f %10s\n", static_cast<int>(name.size()),
                      name.data(), r.n, r.smape, r.mase, owa_buf);
        out << buf;
    };
    for (const auto& [f, r] : report.per_frequency) row(to_string(f), r);
    row("Total", report.total);
}

std::vector<SeriesMetrics> score_series(std::span<const EvaluationInput> inputs) {
    std::vector<SeriesMetrics> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) {
        const TimeSeries& s = *in.insample;
        const int p = s.frequency().seasonal_period();
        try {
            SeriesMetrics m;
            m.series_id = s.id();
            m.frequency = s.frequency().name();
            m.model.smape = smape(in.actual, in.forecast);
            m.model.mase = mase(in.actual, in.forecast, s.values(), p);
            const auto n2 = forecast_naive2(s.values(), static_cast<int>(in.actual.size()), p);
            m.naive2 = AccuracyPair{smape(in.actual, n2), mase(in.actual, n2, s.values(), p)};
            out.push_back(std::move(m));
        } catch (const DataError& e) {
            warn("series '" + s.id() + "' excluded from evaluation: " + e.what());
        }
    }
    return out;
}

Evaluation evaluate_forecasts(std::span<const TimeSeries> insample, const ForecastTable& actuals,
                              const ForecastTable& forecasts) {
    std::vector<std::string> missing, extra;
    for (const auto& [id, _] : actuals)
        if (!forecasts.count(id)) missing.push_back(id);
    for (const auto& [id, _] : forecasts)
        if (!actuals.count(id)) extra.push_back(id);
    if (!missing.empty() || !extra.empty()) {
        auto list = [](const std::vector<std::string>& ids) {
            std::string out;
            for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? " " : "") + ids[i];
            if (ids.size() > 10) out += " ... (" + std::to_string(ids.size()) + " total)";
            return out;
        };
        std::string msg = "forecast ids do not match test ids;";
        if (!missing.empty()) msg += " without forecast: " + list(missing) + ";";
        if (!extra.empty()) msg += " without actuals: " + list(extra) + ";";
        throw DataError(msg);
    }

    std::vector<EvaluationInput> inputs;
    for (const auto& s : insample) {
        auto a = actuals.find(s.id());
        if (a == actuals.end()) continue;
        const auto& f = forecasts.at(s.id());
        if (f.size() != a->second.size())
            throw DataError("series '" + s.id() + "': forecast length " + std::to_string(f.size()) +
                            " differs from test length " + std::to_string(a->second.size()));
        inputs.push_back({&s, a->second, f});
    }
    if (inputs.size() != actuals.size()) throw DataError("some test series have no in-sample history");

    Evaluation ev;
    ev.series = score_series(inputs);
    if (ev.series.empty()) throw DataError("no series could be evaluated");
    ev.report = aggregate(ev.series);
    return ev;
}

}  // namespace for2for
