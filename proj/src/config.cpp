#include "for2for/config.hpp"

#include <string>

#include "for2for/errors.hpp"

namespace for2for {

std::string_view to_string(ModelKind k) noexcept { return k == ModelKind::Cnn ? "cnn" : "rnn"; }

std::string_view to_string(ResidualHead h) noexcept {
    switch (h) {
        case ResidualHead::FullyConnected: return "fc";
        case ResidualHead::LinearMx1: return "linear_mx1";
        case ResidualHead::None: return "none";
    }
    return "?";
}

std::string_view to_string(ReadoutSource r) noexcept {
    return r == ReadoutSource::Hidden ? "hidden" : "cell";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "cnn" || text == "CNN") return ModelKind::Cnn;
    if (text == "rnn" || text == "RNN") return ModelKind::Rnn;
    throw UsageError("model kind must be 'cnn' or 'rnn', got '" + std::string(text) + "'");
}

ResidualHead parse_residual_head(std::string_view text) {
    if (text == "fc" || text == "fully_connected") return ResidualHead::FullyConnected;
    if (text == "linear_mx1" || text == "mx1") return ResidualHead::LinearMx1;
    if (text == "none") return ResidualHead::None;
    throw UsageError("residual head must be fc, linear_mx1 or none, got '" + std::string(text) + "'");
}

ReadoutSource parse_readout_source(std::string_view text) {
    if (text == "hidden") return ReadoutSource::Hidden;
    if (text == "cell") return ReadoutSource::Cell;
    throw UsageError("readout must be 'hidden' or 'cell', got '" + std::string(text) + "'");
}

std::string_view to_string(EnsembleSpace s) noexcept {
    return s == EnsembleSpace::Original ? "original" : "transformed";
}

EnsembleSpace parse_ensemble_space(std::string_view text) {
    if (text == "original") return EnsembleSpace::Original;
    if (text == "transformed") return EnsembleSpace::Transformed;
    throw UsageError("ensemble space must be 'original' or 'transformed', got '" + std::string(text) + "'");
}

void RunConfig::validate() const {
    if (epochs < 0) throw UsageError("epochs must be >= 0");
    if (n_minibatches < 1) throw UsageError("n_minibatches must be >= 1");
    if (n_instances < 1) throw UsageError("n_instances must be >= 1");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
        throw UsageError("holdout_fraction must lie in [0, 1)");
    if (stretch_k_max < 0) throw UsageError("stretch_k_max must be >= 0");
    if (state_size < 0) throw UsageError("state_size must be >= 0");
    if (conv_layers < 0) throw UsageError("conv_layers must be >= 0");
    if (conv_channels < 1) throw UsageError("conv_channels must be >= 1");
    if (head == ResidualHead::None && conv_layers != 0)
        throw UsageError("residual_head = none requires conv_layers = 0");
    if (!(adam.learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
        throw UsageError("Adam betas must lie in [0, 1)");
    if (!(adam.eps > 0.0)) throw UsageError("eps must be positive");
    if (!(clip.floor > 0.0)) throw UsageError("clip_floor must be positive");
    if (seasonal_period < 0) throw UsageError("seasonal_period must be >= 0");
    if (validation_every < 1) throw UsageError("validation_every must be >= 1");
    if (threads < 1) throw UsageError("threads must be >= 1");
    if (all_frequencies && model_kind == ModelKind::Cnn)
        throw UsageError("all-frequency training requires the RNN model: the CNN's fully "
                         "connected head fixes the horizon, so one CNN per frequency is needed");
}

}  // namespace for2for
