#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "for2for/config.hpp"
#include "for2for/core.hpp"
#include "for2for/ingest.hpp"
#include "for2for/meta_model.hpp"
#include "for2for/metrics.hpp"
#include "for2for/numgrad.hpp"
#include "for2for/preprocess.hpp"

namespace for2for {

/// Runs fn(0..n-1) on up to `threads` workers; results must go to per-index slots.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Base forecasts for a history, with external columns merged when the
/// history length matches the one they were computed for.
BaseForecastFn make_base_forecaster(const ExternalForecasts* external, bool prefer_external,
                                    std::map<std::string, std::size_t> external_history_length = {});

struct HoldoutSplit {
    std::vector<TransformedSample> train;
    std::vector<TransformedSample> validation;
};

/// Random partition by series (all windows of one series land on the same side).
HoldoutSplit split_holdout(std::vector<TransformedSample> samples, double fraction, std::uint64_t seed);

/// RNN state size used when the config leaves it at 0.
int default_state_size(const RunConfig& config, std::span<const FrequencyClass> frequencies);

/// Fresh model sized for the samples; CNN requires one shared horizon.
MetaModel make_model(const RunConfig& config, std::span<const TransformedSample> samples, std::uint64_t seed);

/// Mini-batches of sample indices; each batch holds a single frequency and
/// horizon. The order of batches is shuffled across frequency groups.
std::vector<std::vector<std::size_t>> make_minibatches(std::span<const TransformedSample> samples,
                                                       int n_minibatches, ng::Rng& rng);

/// One pass: per batch forward, MAE, backward and an Adam step. Returns the
/// epoch MAE over all samples and steps. Throws NumericError on divergence.
double train_epoch(MetaModel& model, std::span<const TransformedSample> samples, const RunConfig& config,
                   ng::Rng& rng, ng::AdamState& adam);

/// MAE in transformed space over labelled samples.
double evaluate_mae(const MetaModel& model, std::span<const TransformedSample> samples);

struct EpochLog {
    int epoch = 0;
    double train_mae = 0.0;
    std::optional<double> val_mae;
};

struct TrainedInstance {
    MetaModel model;
    std::vector<EpochLog> log;
};

TrainedInstance train_instance(std::span<const TransformedSample> train, std::span<const TransformedSample> validation,
                               const RunConfig& config, std::uint64_t instance_seed);

/// n_instances fresh starts with seeds base_seed + i, in parallel when threads > 1.
std::vector<TrainedInstance> train_ensemble(std::span<const TransformedSample> train, const RunConfig& config);

/// Mean over instances of their inverse-transformed outputs (or the inverse of
/// the transformed mean). Diverged instances are dropped with a warning.
std::vector<double> ensemble_predict(std::span<const MetaModel> models, const TransformedSample& sample,
                                     EnsembleSpace space = EnsembleSpace::Original);

/// Training samples (chopped series, optionally stretched windows) for a set of series.
std::vector<TransformedSample> build_training_samples(std::span<const TimeSeries> series, const RunConfig& config,
                                                      const BaseForecastFn& base);

struct ExperimentData {
    std::vector<TimeSeries> train;
    /// Held-out actuals; empty for forecast-only runs.
    ForecastTable test;
    /// External base forecasts computed on the chopped series (training features).
    ExternalForecasts external_train;
    /// External base forecasts computed on the complete series (inference features).
    ExternalForecasts external_full;
};

struct ExperimentResult {
    ForecastTable predictions;
    std::vector<ForecastTable> instance_predictions;
    std::optional<Evaluation> evaluation;
    std::vector<TrainedInstance> instances;
    std::optional<TrainedInstance> tuning_run;
    std::size_t n_training_samples = 0;
};

/**
 * Full protocol: training samples from chopped series, an optional holdout
 * run for monitoring, retraining n_instances on every sample, inference on
 * complete series, ensembling in original units and, when test actuals are
 * present, evaluation against Naive2.
 */
ExperimentResult run_experiment(const ExperimentData& data, const RunConfig& config);

/// Ensemble forecasts for every series from trained models.
ForecastTable predict_series(std::span<const MetaModel> models, std::span<const TimeSeries> series, int horizon,
                             const BaseForecastFn& base, EnsembleSpace space, int threads);

}  // namespace for2for
