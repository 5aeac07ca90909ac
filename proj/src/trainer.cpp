#include "for2for/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "for2for/baselines.hpp"
#include "for2for/errors.hpp"
#include "for2for/log.hpp"

namespace for2for {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

BaseForecastFn make_base_forecaster(const ExternalForecasts* external, bool prefer_external,
                                    std::map<std::string, std::size_t> external_history_length) {
    return [external, prefer_external, lengths = std::move(external_history_length)](const TimeSeries& history,
                                                                                     int horizon) {
        const ForecastColumns* columns = nullptr;
        if (external) {
            auto it = external->find(history.id());
            if (it != external->end()) {
                auto len = lengths.find(history.id());
                if (len == lengths.end() || len->second == history.size()) columns = &it->second;
            }
        }
        return forecast_all(history, horizon, history.frequency().seasonal_period(), columns,
                            ForecastAllOptions{prefer_external});
    };
}

namespace {

using SeriesKey = std::pair<Frequency, std::string>;

SeriesKey key_of(const TransformedSample& s) { return {s.frequency.name(), s.scale.series_id}; }

}  // namespace

HoldoutSplit split_holdout(std::vector<TransformedSample> samples, double fraction, std::uint64_t seed) {
    if (samples.empty()) throw UsageError("cannot split an empty sample set");
    if (!(fraction >= 0.0 && fraction < 1.0)) throw UsageError("holdout fraction must lie in [0, 1)");

    std::vector<SeriesKey> keys;
    std::set<SeriesKey> seen;
    for (const auto& s : samples) {
        if (seen.insert(key_of(s)).second) keys.push_back(key_of(s));
    }
    ng::Rng rng(seed);
    ng::shuffle(keys, rng);
    const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(keys.size())));
    if (n_val >= keys.size()) throw UsageError("holdout fraction leaves no training series");
    const std::set<SeriesKey> validation(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_val));

    HoldoutSplit split;
    for (auto& s : samples) {
        if (validation.count(key_of(s))) split.validation.push_back(std::move(s));
        else split.train.push_back(std::move(s));
    }
    return split;
}

int default_state_size(const RunConfig& config, std::span<const FrequencyClass> frequencies) {
    if (config.state_size > 0) return config.state_size;
    if (config.all_frequencies || frequencies.size() > 1) return 9;
    if (frequencies.empty()) return 4;
    switch (frequencies.front().name()) {
        case Frequency::Yearly: return 3;
        case Frequency::Quarterly: return 4;
        default: return 6;
    }
}

namespace {

std::vector<FrequencyClass> distinct_frequencies(std::span<const TransformedSample> samples) {
    std::vector<FrequencyClass> out;
    for (const auto& s : samples) {
        if (std::none_of(out.begin(), out.end(), [&](const FrequencyClass& f) { return f == s.frequency; }))
            out.push_back(s.frequency);
    }
    std::sort(out.begin(), out.end(), [](const FrequencyClass& a, const FrequencyClass& b) {
        return static_cast<int>(a.name()) < static_cast<int>(b.name());
    });
    return out;
}

}  // namespace

MetaModel make_model(const RunConfig& config, std::span<const TransformedSample> samples, std::uint64_t seed) {
    if (samples.empty()) throw DataError("no training samples");
    MetaModel model;
    model.frequencies = distinct_frequencies(samples);
    model.mode = config.mode;
    model.clip = config.clip;
    const std::size_t m = samples.front().features.cols();
    if (config.model_kind == ModelKind::Cnn) {
        const std::size_t h = samples.front().horizon();
        for (const auto& s : samples) {
            if (s.horizon() != h)
                throw UsageError("a CNN needs one forecasting horizon; samples mix horizons " + std::to_string(h) +
                                 " and " + std::to_string(s.horizon()));
        }
        CnnConfig c;
        c.horizon = static_cast<int>(h);
        c.n_models = static_cast<int>(m);
        c.n_conv_layers = config.conv_layers;
        c.conv_channels = config.conv_channels;
        c.head = config.head;
        model.net = cnn_init(c, seed);
    } else {
        RnnConfig c;
        c.n_models = static_cast<int>(m);
        c.state_size = default_state_size(config, model.frequencies);
        c.readout = config.readout;
        model.net = rnn_init(c, seed);
    }
    return model;
}

std::vector<std::vector<std::size_t>> make_minibatches(std::span<const TransformedSample> samples, int n_minibatches,
                                                       ng::Rng& rng) {
    std::map<std::pair<Frequency, std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i)
        groups[{samples[i].frequency.name(), samples[i].horizon()}].push_back(i);

    std::vector<std::vector<std::size_t>> batches;
    for (auto& [key, idx] : groups) {
        ng::shuffle(idx, rng);
        const std::size_t k = static_cast<std::size_t>(n_minibatches);
        const std::size_t base = idx.size() / k, extra = idx.size() % k;
        std::size_t pos = 0;
        for (std::size_t b = 0; b < k; ++b) {
            const std::size_t len = base + (b < extra ? 1 : 0);
            if (len == 0) continue;
            batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                                 idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
    }
    ng::shuffle(batches, rng);

    for (const auto& batch : batches) {
        const auto& first = samples[batch.front()];
        for (std::size_t i : batch) {
            if (!(samples[i].frequency == first.frequency) || samples[i].horizon() != first.horizon())
                throw std::logic_error("mini-batch mixes frequencies");
        }
    }
    return batches;
}

namespace {

ng::Tensor stack_features(std::span<const TransformedSample> samples, std::span<const std::size_t> idx) {
    const auto& first = samples[idx.front()].features;
    const std::size_t h = first.rows(), m = first.cols();
    std::vector<double> data;
    data.reserve(idx.size() * h * m);
    for (std::size_t i : idx) {
        const auto f = samples[i].features.data();
        data.insert(data.end(), f.begin(), f.end());
    }
    return ng::Tensor::from({idx.size(), h, m}, std::move(data));
}

std::vector<double> stack_labels(std::span<const TransformedSample> samples, std::span<const std::size_t> idx) {
    std::vector<double> out;
    for (std::size_t i : idx) {
        if (!samples[i].label) throw DataError("training sample for '" + samples[i].scale.series_id + "' has no label");
        out.insert(out.end(), samples[i].label->begin(), samples[i].label->end());
    }
    return out;
}

}  // namespace

double train_epoch(MetaModel& model, std::span<const TransformedSample> samples, const RunConfig& config,
                   ng::Rng& rng, ng::AdamState& adam) {
    if (samples.empty()) throw DataError("no training samples");
    const auto batches = make_minibatches(samples, config.n_minibatches, rng);
    auto params = model.parameter_tensors();
    double weighted = 0.0;
    double count = 0.0;
    for (const auto& batch : batches) {
        for (auto* p : params) p->zero_grad();
        ng::Tape tape;
        const ng::Tensor features = stack_features(samples, batch);
        const ng::Var prediction = model.forward(tape, features, /*train=*/true);
        const ng::Var label = tape.constant(prediction.shape(), stack_labels(samples, batch));
        const ng::Var loss = ng::mean(ng::abs(ng::sub(prediction, label)));
        const double value = loss.item();
        if (!std::isfinite(value)) throw NumericError("training diverged: non-finite loss");
        tape.backward(loss);
        ng::adam_step(params, adam, config.adam);
        const double cells = static_cast<double>(prediction.value().size());
        weighted += value * cells;
        count += cells;
    }
    return weighted / count;
}

double evaluate_mae(const MetaModel& model, std::span<const TransformedSample> samples) {
    double total = 0.0;
    double count = 0.0;
    for (const auto& s : samples) {
        if (!s.label) continue;
        const auto out = model.predict(s.features);
        for (std::size_t i = 0; i < out.size(); ++i) total += std::abs(out[i] - (*s.label)[i]);
        count += static_cast<double>(out.size());
    }
    if (count == 0.0) throw DataError("no labelled samples to evaluate");
    return total / count;
}

TrainedInstance train_instance(std::span<const TransformedSample> train, std::span<const TransformedSample> validation,
                               const RunConfig& config, std::uint64_t instance_seed) {
    config.validate();
    TrainedInstance out{make_model(config, train, instance_seed), {}};
    // Separate stream for batching so initialisation and shuffling are independent.
    ng::Rng rng(instance_seed ^ 0x9e3779b97f4a7c15ULL);
    ng::AdamState adam;
    out.log.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        EpochLog entry;
        entry.epoch = epoch;
        entry.train_mae = train_epoch(out.model, train, config, rng, adam);
        if (!validation.empty() && (epoch % config.validation_every == 0 || epoch == config.epochs))
            entry.val_mae = evaluate_mae(out.model, validation);
        out.log.push_back(entry);
    }
    return out;
}

std::vector<TrainedInstance> train_ensemble(std::span<const TransformedSample> train, const RunConfig& config) {
    std::vector<std::optional<TrainedInstance>> slots(static_cast<std::size_t>(config.n_instances));
    parallel_for(slots.size(), config.threads, [&](std::size_t i) {
        slots[i] = train_instance(train, {}, config, config.seed + i);
    });
    std::vector<TrainedInstance> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<double> ensemble_predict(std::span<const MetaModel> models, const TransformedSample& sample,
                                     EnsembleSpace space) {
    if (models.empty()) throw UsageError("ensemble has no models");
    const std::size_t h = sample.horizon();
    std::vector<double> acc(h, 0.0);
    std::size_t used = 0;
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto y = models[k].predict(sample.features);
        try {
            if (space == EnsembleSpace::Original) {
                const auto x = inverse_transform(y, sample.scale);
                for (std::size_t i = 0; i < h; ++i) acc[i] += x[i];
            } else {
                for (double v : y) {
                    if (!std::isfinite(v)) throw NumericError("non-finite model output");
                }
                for (std::size_t i = 0; i < h; ++i) acc[i] += y[i];
            }
            ++used;
        } catch (const NumericError& e) {
            warn("ensemble member " + std::to_string(k) + " excluded for '" + sample.scale.series_id + "': " + e.what());
        }
    }
    if (used == 0)
        throw NumericError("every ensemble member diverged for series '" + sample.scale.series_id + "'");
    for (double& v : acc) v /= static_cast<double>(used);
    if (space == EnsembleSpace::Transformed) return inverse_transform(acc, sample.scale);
    return acc;
}

std::vector<TransformedSample> build_training_samples(std::span<const TimeSeries> series, const RunConfig& config,
                                                      const BaseForecastFn& base) {
    SampleOptions options{config.mode, config.clip};
    std::vector<std::vector<TransformedSample>> slots(series.size());
    parallel_for(series.size(), config.threads, [&](std::size_t i) {
        if (config.stretch_k_max > 0) {
            slots[i] = stretch_window_samples(series[i], config.stretch_k_max, base, options);
        } else if (auto s = make_training_sample(series[i], base, options)) {
            slots[i].push_back(std::move(*s));
        }
    });
    std::vector<TransformedSample> out;
    for (auto& slot : slots)
        for (auto& s : slot) out.push_back(std::move(s));
    return out;
}

ForecastTable predict_series(std::span<const MetaModel> models, std::span<const TimeSeries> series, int horizon,
                             const BaseForecastFn& base, EnsembleSpace space, int threads) {
    if (models.empty()) throw UsageError("no models to predict with");
    const SampleOptions options{models.front().mode, models.front().clip};
    std::vector<std::vector<double>> slots(series.size());
    parallel_for(series.size(), threads, [&](std::size_t i) {
        const int h = horizon > 0 ? horizon : series[i].frequency().horizon();
        std::optional<TransformedSample> sample;
        try {
            sample = make_inference_sample(series[i], h, base, options);
        } catch (const DataError& e) {
            warn("series '" + series[i].id() + "' cannot be preprocessed (" + e.what() + "); using naive forecast");
            slots[i] = forecast_naive(series[i].values(), h);
            return;
        }
        slots[i] = ensemble_predict(models, *sample, space);
    });
    ForecastTable out;
    for (std::size_t i = 0; i < series.size(); ++i) out.emplace(series[i].id(), std::move(slots[i]));
    return out;
}

ExperimentResult run_experiment(const ExperimentData& data, const RunConfig& config) {
    config.validate();
    if (data.train.empty()) throw DataError("experiment has no series");
    if (config.model_kind == ModelKind::Cnn) {
        for (const auto& s : data.train) {
            if (!(s.frequency().name() == data.train.front().frequency().name()))
                throw UsageError("a CNN is built per frequency; the dataset mixes frequencies");
        }
    }

    std::map<std::string, std::size_t> chopped_lengths;
    for (const auto& s : data.train)
        chopped_lengths[s.id()] = s.size() - std::min<std::size_t>(s.size(), static_cast<std::size_t>(s.frequency().horizon()));
    const auto train_base = make_base_forecaster(data.external_train.empty() ? nullptr : &data.external_train,
                                                 config.prefer_external, std::move(chopped_lengths));
    const auto full_base = make_base_forecaster(data.external_full.empty() ? nullptr : &data.external_full,
                                                config.prefer_external);

    ExperimentResult result;
    auto samples = build_training_samples(data.train, config, train_base);
    if (samples.empty()) throw DataError("no series is long enough to form a training sample");
    result.n_training_samples = samples.size();

    if (config.holdout_fraction > 0.0) {
        auto split = split_holdout(samples, config.holdout_fraction, config.seed);
        result.tuning_run = train_instance(split.train, split.validation, config, config.seed);
    }

    result.instances = train_ensemble(samples, config);
    std::vector<MetaModel> models;
    for (const auto& inst : result.instances) models.push_back(inst.model);

    result.predictions = predict_series(models, data.train, 0, full_base, config.ensemble_space, config.threads);
    for (const auto& m : models) {
        result.instance_predictions.push_back(
            predict_series(std::span<const MetaModel>(&m, 1), data.train, 0, full_base, config.ensemble_space,
                           config.threads));
    }

    if (!data.test.empty()) {
        ForecastTable scored;
        for (const auto& [id, _] : data.test) scored.emplace(id, result.predictions.at(id));
        result.evaluation = evaluate_forecasts(data.train, data.test, scored);
    }
    return result;
}

}  // namespace for2for
