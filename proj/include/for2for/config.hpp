#pragma once

#include <cstdint>
#include <string_view>

#include "for2for/core.hpp"

namespace for2for {

enum class ModelKind { Cnn, Rnn };

enum class ResidualHead { FullyConnected, LinearMx1, None };

/// What the LSTM readout consumes.
enum class ReadoutSource { Hidden, Cell };

/// Space in which the ensemble mean is taken.
enum class EnsembleSpace { Original, Transformed };

std::string_view to_string(ModelKind k) noexcept;
std::string_view to_string(ResidualHead h) noexcept;
std::string_view to_string(ReadoutSource r) noexcept;
ModelKind parse_model_kind(std::string_view text);
ResidualHead parse_residual_head(std::string_view text);
ReadoutSource parse_readout_source(std::string_view text);
std::string_view to_string(EnsembleSpace s) noexcept;
EnsembleSpace parse_ensemble_space(std::string_view text);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Lower bound applied to base forecasts before the log transform.
struct ClipPolicy {
    double floor = 10.0;
    /// Literal reading: only negative forecasts are raised to the floor.
    bool negatives_only = false;
};

struct RunConfig {
    int epochs = 2000;
    int n_minibatches = 10;
    int n_instances = 8;
    double holdout_fraction = 1.0 / 3.0;
    std::uint64_t seed = 1;
    ModelKind model_kind = ModelKind::Rnn;
    bool all_frequencies = false;
    ScaleMode mode = ScaleMode::LastObsLog;
    ClipPolicy clip;
    AdamConfig adam;
    int stretch_k_max = 0;
    /// 0 selects the per-frequency default (3/4/6, 9 for all-frequency runs).
    int state_size = 0;
    ReadoutSource readout = ReadoutSource::Hidden;
    int conv_layers = 4;
    int conv_channels = 8;
    ResidualHead head = ResidualHead::FullyConnected;
    EnsembleSpace ensemble_space = EnsembleSpace::Original;
    bool prefer_external = false;
    /// 0 keeps the frequency's default seasonal period.
    int seasonal_period = 0;
    int validation_every = 50;
    int threads = 1;

    /// Throws UsageError on violated invariants.
    void validate() const;
};

}  // namespace for2for
