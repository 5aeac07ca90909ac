#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "for2for/config.hpp"

/// Dense tensors with tape-based reverse-mode differentiation.
namespace for2for::ng {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

struct Tensor {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);

    std::size_t size() const noexcept { return data.size(); }
    void zero_grad();
};

class Tape;

/// Handle to a node recorded on a Tape. Valid while the tape lives.
class Var {
public:
    Var() = default;

    const Shape& shape() const;
    std::span<const double> value() const;
    std::span<const double> grad() const;
    double item() const;
    Tape& tape() const { return *tape_; }
    std::size_t id() const noexcept { return id_; }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

class Tape {
public:
    using BackwardFn = std::function<void(Tape&, std::size_t self)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf that never receives gradient.
    Var constant(Shape shape, std::vector<double> data);
    Var constant(const Tensor& t) { return constant(t.shape, t.data); }

    /// Leaf bound to `param`; backward() accumulates into param.grad when
    /// param.requires_grad is set.
    Var parameter(Tensor& param);

    /// Records an op output. `backward` reads the output grad and adds into
    /// input grads; it is skipped when no input needs gradient.
    Var record(Shape shape, std::vector<double> value, std::initializer_list<Var> inputs, BackwardFn backward);
    Var record(Shape shape, std::vector<double> value, std::span<const Var> inputs, BackwardFn backward);

    /// Reverse sweep from a scalar loss. Throws std::invalid_argument for non-scalars.
    void backward(Var loss);

    std::size_t size() const noexcept { return nodes_.size(); }

    const Shape& shape(std::size_t id) const { return nodes_[id].shape; }
    std::span<const double> value(std::size_t id) const { return nodes_[id].value; }
    std::span<double> grad(std::size_t id) { return nodes_[id].grad; }
    std::span<const double> grad(std::size_t id) const { return nodes_[id].grad; }
    bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }

private:
    struct Node {
        Shape shape;
        std::vector<double> value;
        std::vector<double> grad;
        bool needs_grad = false;
        Tensor* param = nullptr;
        BackwardFn backward;
    };

    std::vector<Node> nodes_;
};

enum class Padding { Same, Valid };

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
/// x of shape (..., n) plus b of shape (n).
Var add_bias(Var x, Var b);
/// (m, k) x (k, n).
Var matmul(Var a, Var b);
/// input (rows, cols, cin) or (batch, rows, cols, cin); kernel (kh, kw, cin, cout).
Var conv2d(Var input, Var kernel, Padding padding);
Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
/// Subgradient 0 at 0.
Var abs(Var a);
Var sum(Var a);
Var mean(Var a);
Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);
Var reshape(Var a, Shape shape);

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::int64_t step = 0;
};

/// One Adam update of every parameter from its grad.
void adam_step(std::span<Tensor* const> params, AdamState& state, const AdamConfig& config);

struct NamedTensor {
    std::string name;
    Tensor* tensor;
};

/// One line per tensor: `name,d1xd2x...,v1,v2,...` with 17 significant digits.
void save_tensors(std::ostream& out, std::span<const NamedTensor> tensors);
/// Reads lines written by save_tensors until EOF.
std::map<std::string, Tensor> load_tensors(std::istream& in);

/// Deterministic generator: mt19937_64 bits mapped without std distributions,
/// whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace for2for::ng
