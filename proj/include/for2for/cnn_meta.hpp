#pragma once

#include <cstdint>
#include <vector>

#include "for2for/config.hpp"
#include "for2for/core.hpp"
#include "for2for/numgrad.hpp"

namespace for2for {

struct CnnConfig {
    int horizon = 8;
    int n_models = 8;
    int n_conv_layers = 4;
    int conv_channels = 8;
    ResidualHead head = ResidualHead::FullyConnected;

    void validate() const;
};

/**
 * Two-branch CNN over the h x M forecast "image":
 *
 *   output = linear(features) + head(conv_stack(features))
 *
 * The linear branch is a 1 x M valid convolution with no bias, i.e. a
 * per-step weighted sum of the base forecasts. The residual branch stacks
 * 3 x 3 same-padded sigmoid convolutions and maps them to h outputs through
 * either a fully connected layer or a per-row M x 1 linear layer. With no
 * conv layers and no head the model is purely linear.
 */
struct CnnModel {
    CnnConfig config;
    ng::Tensor linear_kernel;              // (1, M, 1, 1)
    std::vector<ng::Tensor> conv_kernels;  // (3, 3, cin, channels)
    std::vector<ng::Tensor> conv_biases;   // (channels)
    ng::Tensor head_weight;                // FC: (h*M*c, h); Mx1: (1, M, c, 1)
    ng::Tensor head_bias;                  // FC: (h); Mx1: (1)

    std::vector<ng::NamedTensor> parameters();
};

/// Glorot-uniform kernels, zero biases.
CnnModel cnn_init(const CnnConfig& config, std::uint64_t seed);

/// Batched forward: features (batch, h, M) -> (batch, h). With `train` the
/// parameters are bound for gradient accumulation.
ng::Var cnn_forward(ng::Tape& tape, CnnModel& model, const ng::Tensor& features, bool train);

/// Single-sample inference in transformed space.
std::vector<double> cnn_forward(const CnnModel& model, const Matrix& features);

}  // namespace for2for
