#pragma once

#include <cstdint>
#include <vector>

#include "for2for/config.hpp"
#include "for2for/core.hpp"
#include "for2for/numgrad.hpp"

namespace for2for {

struct RnnConfig {
    int n_models = 8;
    int state_size = 4;
    ReadoutSource readout = ReadoutSource::Hidden;

    void validate() const;
};

/// LSTM over forecast steps with a linear readout per step. Gate weights are
/// stored input-major, (M + S) x S, so a batch row vector [x, s] multiplies directly.
struct RnnModel {
    RnnConfig config;
    ng::Tensor w_input, w_forget, w_output, w_candidate;  // (M + S, S)
    ng::Tensor b_input, b_forget, b_output, b_candidate;  // (S)
    ng::Tensor readout_weight;                            // (S, 1)
    ng::Tensor readout_bias;                              // (1)

    std::vector<ng::NamedTensor> parameters();
};

/// Glorot-uniform weights; gate biases 0 except the forget gate at 1; readout bias 0.
RnnModel rnn_init(const RnnConfig& config, std::uint64_t seed);

/**
 * Batched unroll over features (batch, h, M) -> (batch, h), any h >= 1.
 * Hidden and cell state start at zero; output i depends on rows 1..i only.
 */
ng::Var rnn_forward(ng::Tape& tape, RnnModel& model, const ng::Tensor& features, bool train);

/// Single-sample inference; the unroll length is features.rows().
std::vector<double> rnn_forward(const RnnModel& model, const Matrix& features);

/// Same recurrence at a horizon different from the training horizon.
inline std::vector<double> rnn_forward_extended(const RnnModel& model, const Matrix& features) {
    return rnn_forward(model, features);
}

}  // namespace for2for
