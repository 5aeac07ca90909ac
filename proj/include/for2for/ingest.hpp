#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "for2for/config.hpp"
#include "for2for/core.hpp"

namespace for2for {

/// Canonical base-model order; this is the column order of every ForecastMatrix.
/// Plain naive is not a meta-learner input.
inline constexpr std::array<std::string_view, 8> kBaseModelLexicon = {
    "rwdrift", "snaive", "theta", "arima", "ets", "tbats", "stlmar", "nnetar"};

inline constexpr std::size_t kNumBaseModels = kBaseModelLexicon.size();

bool in_lexicon(std::string_view model_id) noexcept;
std::size_t lexicon_index(std::string_view model_id);
std::vector<std::string> lexicon_ids();

/// model_id -> forecast vector of length h.
using ForecastColumns = std::map<std::string, std::vector<double>>;

/// series_id -> columns supplied from outside (e.g. R-generated auto.arima).
using ExternalForecasts = std::map<std::string, ForecastColumns>;

/// series_id -> final forecast vector.
using ForecastTable = std::map<std::string, std::vector<double>>;

struct DatasetManifest {
    std::filesystem::path train_path;
    std::optional<std::filesystem::path> test_path;
    FrequencyClass frequency;
    std::optional<std::string> id_prefix_filter;
};

struct Dataset {
    std::vector<TimeSeries> train;
    /// Actuals keyed by series id (empty in forecast-only mode).
    ForecastTable test;
};

std::vector<TimeSeries> parse_series_csv(std::istream& in, const FrequencyClass& frequency,
                                         std::string_view source = "<stream>");
std::vector<TimeSeries> load_series_csv(const std::filesystem::path& path,
                                        const FrequencyClass& frequency);

/// Loads a manifest's train (and optional test) files; test ids must exist in train.
Dataset load_dataset(const DatasetManifest& manifest);

ExternalForecasts parse_external_forecasts(std::istream& in, int horizon,
                                           std::string_view source = "<stream>");
ExternalForecasts load_external_forecasts(const std::filesystem::path& path, int horizon);

/// Reads `series_id,t1..th` prediction files. All rows must share one width.
ForecastTable load_forecast_csv(const std::filesystem::path& path);

void write_forecast_csv(std::ostream& out, const ForecastTable& forecasts);
void write_forecast_csv(const std::filesystem::path& path, const ForecastTable& forecasts);

/// Writes ForecastMatrix columns in the external-forecast layout so they can be re-ingested.
void write_base_forecast_csv(std::ostream& out, const std::vector<ForecastMatrix>& matrices);

RunConfig parse_run_config(std::istream& in, std::string_view source = "<stream>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Shortest round-trippable rendering of a double.
std::string format_double(double v);

}  // namespace for2for
