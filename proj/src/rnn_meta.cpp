#include "for2for/rnn_meta.hpp"

#include <string>

#include "for2for/errors.hpp"

namespace for2for {

void RnnConfig::validate() const {
    if (n_models < 1) throw UsageError("RNN needs at least one base model");
    if (state_size < 1) throw UsageError("RNN state size must be >= 1");
}

std::vector<ng::NamedTensor> RnnModel::parameters() {
    return {{"w_input", &w_input},          {"w_forget", &w_forget},   {"w_output", &w_output},
            {"w_candidate", &w_candidate},  {"b_input", &b_input},     {"b_forget", &b_forget},
            {"b_output", &b_output},        {"b_candidate", &b_candidate},
            {"readout_weight", &readout_weight}, {"readout_bias", &readout_bias}};
}

RnnModel rnn_init(const RnnConfig& config, std::uint64_t seed) {
    config.validate();
    ng::Rng rng(seed);
    const std::size_t m = static_cast<std::size_t>(config.n_models);
    const std::size_t s = static_cast<std::size_t>(config.state_size);
    RnnModel model;
    model.config = config;
    model.w_input = ng::glorot_uniform({m + s, s}, m + s, s, rng);
    model.w_forget = ng::glorot_uniform({m + s, s}, m + s, s, rng);
    model.w_output = ng::glorot_uniform({m + s, s}, m + s, s, rng);
    model.w_candidate = ng::glorot_uniform({m + s, s}, m + s, s, rng);
    model.b_input = ng::Tensor::zeros({s}, true);
    model.b_forget = ng::Tensor::from({s}, std::vector<double>(s, 1.0), true);
    model.b_output = ng::Tensor::zeros({s}, true);
    model.b_candidate = ng::Tensor::zeros({s}, true);
    model.readout_weight = ng::glorot_uniform({s, 1}, s, 1, rng);
    model.readout_bias = ng::Tensor::zeros({1}, true);
    return model;
}

namespace {

template <typename Model, typename Bind>
ng::Var forward_impl(ng::Tape& tape, Model& model, const ng::Tensor& features, Bind bind) {
    const RnnConfig& c = model.config;
    const auto& fs = features.shape;
    const std::size_t m = static_cast<std::size_t>(c.n_models);
    const std::size_t s = static_cast<std::size_t>(c.state_size);
    if (fs.size() != 3 || fs[2] != m || fs[1] == 0) {
        throw DataError("RNN built for " + std::to_string(m) + " base models cannot take features of shape " +
                        ng::shape_string(fs));
    }
    const std::size_t batch = fs[0], h = fs[1];

    const ng::Var wi = bind(model.w_input), wf = bind(model.w_forget), wo = bind(model.w_output),
                  wc = bind(model.w_candidate);
    const ng::Var bi = bind(model.b_input), bf = bind(model.b_forget), bo = bind(model.b_output),
                  bc = bind(model.b_candidate);
    const ng::Var wr = bind(model.readout_weight), br = bind(model.readout_bias);

    ng::Var hidden = tape.constant({batch, s}, std::vector<double>(batch * s, 0.0));
    ng::Var cell = tape.constant({batch, s}, std::vector<double>(batch * s, 0.0));
    std::vector<ng::Var> outputs;
    outputs.reserve(h);
    std::vector<double> step(batch * m);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t b = 0; b < batch; ++b)
            std::copy_n(features.data.data() + (b * h + i) * m, m, step.data() + b * m);
        const ng::Var x = tape.constant({batch, m}, step);
        const ng::Var xs[] = {x, hidden};
        const ng::Var joint = ng::concat(xs, 1);
        const ng::Var input_gate = ng::sigmoid(ng::add_bias(ng::matmul(joint, wi), bi));
        const ng::Var forget_gate = ng::sigmoid(ng::add_bias(ng::matmul(joint, wf), bf));
        const ng::Var output_gate = ng::sigmoid(ng::add_bias(ng::matmul(joint, wo), bo));
        const ng::Var candidate = ng::tanh(ng::add_bias(ng::matmul(joint, wc), bc));
        cell = ng::add(ng::mul(forget_gate, cell), ng::mul(input_gate, candidate));
        hidden = ng::mul(output_gate, ng::tanh(cell));
        const ng::Var source = c.readout == ReadoutSource::Hidden ? hidden : cell;
        outputs.push_back(ng::add_bias(ng::matmul(source, wr), br));
    }
    return ng::concat(outputs, 1);
}

}  // namespace

ng::Var rnn_forward(ng::Tape& tape, RnnModel& model, const ng::Tensor& features, bool train) {
    if (train) return forward_impl(tape, model, features, [&](ng::Tensor& t) { return tape.parameter(t); });
    return forward_impl(tape, model, features, [&](const ng::Tensor& t) { return tape.constant(t); });
}

std::vector<double> rnn_forward(const RnnModel& model, const Matrix& features) {
    ng::Tape tape;
    const ng::Tensor batch = ng::Tensor::from(
        {1, features.rows(), features.cols()}, std::vector<double>(features.data().begin(), features.data().end()));
    const ng::Var out =
        forward_impl(tape, model, batch, [&](const ng::Tensor& t) { return tape.constant(t); });
    return {out.value().begin(), out.value().end()};
}

}  // namespace for2for
