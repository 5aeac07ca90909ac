#include "for2for/cnn_meta.hpp"

#include <stdexcept>
#include <string>

#include "for2for/errors.hpp"

namespace for2for {

void CnnConfig::validate() const {
    if (horizon < 1) throw UsageError("CNN horizon must be >= 1");
    if (n_models < 1) throw UsageError("CNN needs at least one base model");
    if (n_conv_layers < 0) throw UsageError("CNN conv layer count must be >= 0");
    if (conv_channels < 1) throw UsageError("CNN conv channel count must be >= 1");
    if (head == ResidualHead::None && n_conv_layers != 0)
        throw UsageError("a CNN without a residual head must have no conv layers");
}

std::vector<ng::NamedTensor> CnnModel::parameters() {
    std::vector<ng::NamedTensor> out;
    out.push_back({"linear_kernel", &linear_kernel});
    for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
        out.push_back({"conv" + std::to_string(i) + "_kernel", &conv_kernels[i]});
        out.push_back({"conv" + std::to_string(i) + "_bias", &conv_biases[i]});
    }
    if (config.head != ResidualHead::None) {
        out.push_back({"head_weight", &head_weight});
        out.push_back({"head_bias", &head_bias});
    }
    return out;
}

namespace {

std::size_t last_channels(const CnnConfig& c) {
    return c.n_conv_layers > 0 ? static_cast<std::size_t>(c.conv_channels) : 1;
}

template <typename Model, typename Bind>
ng::Var forward_impl(ng::Tape& tape, Model& model, const ng::Tensor& features, Bind bind) {
    const CnnConfig& c = model.config;
    const auto& fs = features.shape;
    const std::size_t h = static_cast<std::size_t>(c.horizon), m = static_cast<std::size_t>(c.n_models);
    if (fs.size() != 3 || fs[1] != h || fs[2] != m) {
        throw DataError("CNN built for horizon " + std::to_string(h) + " and " + std::to_string(m) +
                        " models cannot take features of shape " + ng::shape_string(fs) +
                        "; the fully connected head fixes the horizon");
    }
    const std::size_t batch = fs[0];
    const ng::Var image = tape.constant({batch, h, m, 1}, features.data);

    ng::Var linear = ng::conv2d(image, bind(model.linear_kernel), ng::Padding::Valid);
    linear = ng::reshape(linear, {batch, h});
    if (c.head == ResidualHead::None) return linear;

    ng::Var z = image;
    for (std::size_t i = 0; i < model.conv_kernels.size(); ++i) {
        z = ng::conv2d(z, bind(model.conv_kernels[i]), ng::Padding::Same);
        z = ng::sigmoid(ng::add_bias(z, bind(model.conv_biases[i])));
    }
    ng::Var residual;
    if (c.head == ResidualHead::FullyConnected) {
        z = ng::reshape(z, {batch, h * m * last_channels(c)});
        residual = ng::add_bias(ng::matmul(z, bind(model.head_weight)), bind(model.head_bias));
    } else {
        residual = ng::conv2d(z, bind(model.head_weight), ng::Padding::Valid);
        residual = ng::add_bias(residual, bind(model.head_bias));
        residual = ng::reshape(residual, {batch, h});
    }
    return ng::add(linear, residual);
}

}  // namespace

CnnModel cnn_init(const CnnConfig& config, std::uint64_t seed) {
    config.validate();
    ng::Rng rng(seed);
    const std::size_t h = static_cast<std::size_t>(config.horizon);
    const std::size_t m = static_cast<std::size_t>(config.n_models);
    const std::size_t ch = static_cast<std::size_t>(config.conv_channels);

    CnnModel model;
    model.config = config;
    model.linear_kernel = ng::glorot_uniform({1, m, 1, 1}, m, 1, rng);
    std::size_t cin = 1;
    for (int i = 0; i < config.n_conv_layers; ++i) {
        model.conv_kernels.push_back(ng::glorot_uniform({3, 3, cin, ch}, 9 * cin, 9 * ch, rng));
        model.conv_biases.push_back(ng::Tensor::zeros({ch}, true));
        cin = ch;
    }
    const std::size_t c = last_channels(config);
    if (config.head == ResidualHead::FullyConnected) {
        model.head_weight = ng::glorot_uniform({h * m * c, h}, h * m * c, h, rng);
        model.head_bias = ng::Tensor::zeros({h}, true);
    } else if (config.head == ResidualHead::LinearMx1) {
        model.head_weight = ng::glorot_uniform({1, m, c, 1}, m * c, 1, rng);
        model.head_bias = ng::Tensor::zeros({1}, true);
    }
    return model;
}

ng::Var cnn_forward(ng::Tape& tape, CnnModel& model, const ng::Tensor& features, bool train) {
    if (train) return forward_impl(tape, model, features, [&](ng::Tensor& t) { return tape.parameter(t); });
    return forward_impl(tape, model, features, [&](const ng::Tensor& t) { return tape.constant(t); });
}

std::vector<double> cnn_forward(const CnnModel& model, const Matrix& features) {
    ng::Tape tape;
    const ng::Tensor batch = ng::Tensor::from(
        {1, features.rows(), features.cols()}, std::vector<double>(features.data().begin(), features.data().end()));
    const ng::Var out =
        forward_impl(tape, model, batch, [&](const ng::Tensor& t) { return tape.constant(t); });
    return {out.value().begin(), out.value().end()};
}

}  // namespace for2for
