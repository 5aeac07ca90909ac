#include "for2for/numgrad.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace for2for::ng {

std::size_t numel(const Shape& shape) noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(shape[i]);
    }
    return out + ")";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    Tensor t;
    t.data.assign(numel(shape), 0.0);
    t.shape = std::move(shape);
    t.requires_grad = requires_grad;
    return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
    if (numel(shape) != data.size())
        throw std::invalid_argument("tensor data length " + std::to_string(data.size()) +
                                    " does not match shape " + shape_string(shape));
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(data);
    t.requires_grad = requires_grad;
    return t;
}

void Tensor::zero_grad() { grad.assign(data.size(), 0.0); }

const Shape& Var::shape() const { return tape_->shape(id_); }
std::span<const double> Var::value() const { return tape_->value(id_); }
std::span<const double> Var::grad() const { return std::as_const(*tape_).grad(id_); }

double Var::item() const {
    if (value().size() != 1) throw std::invalid_argument("item() on a tensor of shape " + shape_string(shape()));
    return value()[0];
}

Var Tape::constant(Shape shape, std::vector<double> data) {
    if (numel(shape) != data.size())
        throw std::invalid_argument("constant: data length does not match shape " + shape_string(shape));
    Node n;
    n.shape = std::move(shape);
    n.value = std::move(data);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor& param) {
    Node n;
    n.shape = param.shape;
    n.value = param.data;
    n.needs_grad = param.requires_grad;
    if (n.needs_grad) n.grad.assign(n.value.size(), 0.0);
    n.param = &param;
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(Shape shape, std::vector<double> value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(std::move(shape), std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
}

Var Tape::record(Shape shape, std::vector<double> value, std::span<const Var> inputs, BackwardFn backward) {
    Node n;
    n.shape = std::move(shape);
    n.value = std::move(value);
    for (const Var& v : inputs) {
        if (&v.tape() != this) throw std::invalid_argument("cannot combine values from different tapes");
        n.needs_grad = n.needs_grad || nodes_[v.id()].needs_grad;
    }
    if (n.needs_grad) {
        n.grad.assign(n.value.size(), 0.0);
        n.backward = std::move(backward);
    }
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
    if (&loss.tape() != this) throw std::invalid_argument("backward: loss belongs to another tape");
    if (nodes_[loss.id()].value.size() != 1)
        throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                    shape_string(nodes_[loss.id()].shape));
    if (!nodes_[loss.id()].needs_grad) return;
    nodes_[loss.id()].grad[0] = 1.0;
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.needs_grad && n.backward) n.backward(*this, i);
    }
    for (Node& n : nodes_) {
        if (!n.param || !n.needs_grad) continue;
        auto& g = n.param->grad;
        if (g.size() != n.grad.size()) g.assign(n.grad.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += n.grad[k];
    }
}

namespace {

void require_same_shape(const char* op, Var a, Var b) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                                    shape_string(b.shape()));
}

template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv) {
    auto x = a.value();
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
    const std::size_t in = a.id();
    return a.tape().record(a.shape(), std::move(y), {a}, [in, deriv](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        auto xv = t.value(in);
        auto yv = t.value(self);
        auto gi = t.grad(in);
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * deriv(xv[i], yv[i]);
    });
}

}  // namespace

Var add(Var a, Var b) {
    require_same_shape("add", a, b);
    auto x = a.value(), y = b.value();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(a.shape(), std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ia)) {
            auto ga = t.grad(ia);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (t.needs_grad(ib)) {
            auto gb = t.grad(ib);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
        }
    });
}

Var sub(Var a, Var b) {
    require_same_shape("sub", a, b);
    auto x = a.value(), y = b.value();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(a.shape(), std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ia)) {
            auto ga = t.grad(ia);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (t.needs_grad(ib)) {
            auto gb = t.grad(ib);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
        }
    });
}

Var mul(Var a, Var b) {
    require_same_shape("mul", a, b);
    auto x = a.value(), y = b.value();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(a.shape(), std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        auto xa = t.value(ia), xb = t.value(ib);
        if (t.needs_grad(ia)) {
            auto ga = t.grad(ia);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * xb[i];
        }
        if (t.needs_grad(ib)) {
            auto gb = t.grad(ib);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * xa[i];
        }
    });
}

Var scale(Var a, double factor) {
    return unary(
        a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Var add_bias(Var x, Var b) {
    const Shape& xs = x.shape();
    if (xs.empty() || b.shape().size() != 1 || b.shape()[0] != xs.back())
        throw std::invalid_argument("add_bias: shape mismatch " + shape_string(xs) + " vs " + shape_string(b.shape()));
    const std::size_t n = xs.back();
    auto xv = x.value(), bv = b.value();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] + bv[i % n];
    const std::size_t ix = x.id(), ib = b.id();
    return x.tape().record(xs, std::move(out), {x, b}, [ix, ib, n](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ix)) {
            auto gx = t.grad(ix);
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        }
        if (t.needs_grad(ib)) {
            auto gb = t.grad(ib);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i % n] += g[i];
        }
    });
}

Var matmul(Var a, Var b) {
    const Shape& as = a.shape();
    const Shape& bs = b.shape();
    if (as.size() != 2 || bs.size() != 2 || as[1] != bs[0])
        throw std::invalid_argument("matmul: shape mismatch " + shape_string(as) + " vs " + shape_string(bs));
    const std::size_t m = as[0], k = as[1], n = bs[1];
    auto av = a.value(), bv = b.value();
    std::vector<double> out(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            if (aip == 0.0) continue;
            const double* brow = bv.data() + p * n;
            double* orow = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
        }
    }
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record({m, n}, std::move(out), {a, b}, [ia, ib, m, k, n](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        auto av2 = t.value(ia), bv2 = t.value(ib);
        if (t.needs_grad(ia)) {
            auto ga = t.grad(ia);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv2[p * n + j];
                    ga[i * k + p] += acc;
                }
        }
        if (t.needs_grad(ib)) {
            auto gb = t.grad(ib);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double aip = av2[i * k + p];
                    if (aip == 0.0) continue;
                    for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
                }
        }
    });
}

Var conv2d(Var input, Var kernel, Padding padding) {
    const Shape& is = input.shape();
    const Shape& ks = kernel.shape();
    if ((is.size() != 3 && is.size() != 4) || ks.size() != 4 || ks[2] != is.back())
        throw std::invalid_argument("conv2d: shape mismatch input " + shape_string(is) + " vs kernel " +
                                    shape_string(ks));
    const bool batched = is.size() == 4;
    const std::size_t batch = batched ? is[0] : 1;
    const std::size_t rows = is[batched ? 1 : 0], cols = is[batched ? 2 : 1], cin = is.back();
    const std::size_t kh = ks[0], kw = ks[1], cout = ks[3];
    std::size_t out_rows, out_cols;
    long pad_top = 0, pad_left = 0;
    if (padding == Padding::Same) {
        out_rows = rows;
        out_cols = cols;
        pad_top = static_cast<long>((kh - 1) / 2);
        pad_left = static_cast<long>((kw - 1) / 2);
    } else {
        if (kh > rows || kw > cols)
            throw std::invalid_argument("conv2d: valid padding with kernel " + shape_string(ks) +
                                        " larger than input " + shape_string(is));
        out_rows = rows - kh + 1;
        out_cols = cols - kw + 1;
    }

    // Visits every (output element, kernel tap, input element) triple.
    auto for_each_tap = [=](auto&& fn) {
        for (std::size_t nb = 0; nb < batch; ++nb)
            for (std::size_t y = 0; y < out_rows; ++y)
                for (std::size_t x = 0; x < out_cols; ++x)
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const long iy = static_cast<long>(y + ky) - pad_top;
                        if (iy < 0 || iy >= static_cast<long>(rows)) continue;
                        for (std::size_t kx = 0; kx < kw; ++kx) {
                            const long ix = static_cast<long>(x + kx) - pad_left;
                            if (ix < 0 || ix >= static_cast<long>(cols)) continue;
                            const std::size_t in_base =
                                ((nb * rows + static_cast<std::size_t>(iy)) * cols + static_cast<std::size_t>(ix)) * cin;
                            const std::size_t k_base = (ky * kw + kx) * cin * cout;
                            const std::size_t out_base = ((nb * out_rows + y) * out_cols + x) * cout;
                            fn(in_base, k_base, out_base);
                        }
                    }
    };

    auto iv = input.value(), kv = kernel.value();
    std::vector<double> out(batch * out_rows * out_cols * cout, 0.0);
    for_each_tap([&](std::size_t in_base, std::size_t k_base, std::size_t out_base) {
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = iv[in_base + ci];
            const double* krow = kv.data() + k_base + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) out[out_base + co] += v * krow[co];
        }
    });

    Shape out_shape = batched ? Shape{batch, out_rows, out_cols, cout} : Shape{out_rows, out_cols, cout};
    const std::size_t ii = input.id(), ik = kernel.id();
    return input.tape().record(
        std::move(out_shape), std::move(out), {input, kernel},
        [ii, ik, cin, cout, for_each_tap](Tape& t, std::size_t self) {
            auto g = t.grad(self);
            auto ivv = t.value(ii), kvv = t.value(ik);
            const bool need_in = t.needs_grad(ii), need_k = t.needs_grad(ik);
            std::span<double> gi = need_in ? t.grad(ii) : std::span<double>();
            std::span<double> gk = need_k ? t.grad(ik) : std::span<double>();
            for_each_tap([&](std::size_t in_base, std::size_t k_base, std::size_t out_base) {
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const std::size_t krow = k_base + ci * cout;
                    double acc = 0.0;
                    for (std::size_t co = 0; co < cout; ++co) {
                        const double go = g[out_base + co];
                        acc += go * kvv[krow + co];
                        if (need_k) gk[krow + co] += go * ivv[in_base + ci];
                    }
                    if (need_in) gi[in_base + ci] += acc;
                }
            });
        });
}

Var sigmoid(Var a) {
    return unary(
        a,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
    return unary(
        a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
    return unary(
        a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
    return unary(
        a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var abs(Var a) {
    return unary(
        a, [](double x) { return std::abs(x); },
        [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var sum(Var a) {
    auto x = a.value();
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    const std::size_t in = a.id();
    return a.tape().record({}, {total}, {a}, [in](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0];
        for (double& gi : t.grad(in)) gi += g;
    });
}

Var mean(Var a) {
    auto x = a.value();
    if (x.empty()) throw std::invalid_argument("mean: empty tensor");
    const double n = static_cast<double>(x.size());
    const double total = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const std::size_t in = a.id();
    return a.tape().record({}, {total}, {a}, [in, n](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0] / n;
        for (double& gi : t.grad(in)) gi += g;
    });
}

namespace {

struct AxisSplit {
    std::size_t outer = 1;
    std::size_t inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
    AxisSplit out;
    for (std::size_t i = 0; i < axis; ++i) out.outer *= s[i];
    for (std::size_t i = axis + 1; i < s.size(); ++i) out.inner *= s[i];
    return out;
}

}  // namespace

Var concat(std::span<const Var> parts, std::size_t axis) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    const Shape& first = parts[0].shape();
    if (axis >= first.size()) throw std::invalid_argument("concat: axis out of range for " + shape_string(first));
    Shape out_shape = first;
    out_shape[axis] = 0;
    std::vector<std::size_t> dims, ids;
    for (const Var& p : parts) {
        const Shape& s = p.shape();
        bool ok = s.size() == first.size();
        for (std::size_t i = 0; ok && i < s.size(); ++i) ok = (i == axis) || s[i] == first[i];
        if (!ok) throw std::invalid_argument("concat: shape mismatch " + shape_string(first) + " vs " + shape_string(s));
        dims.push_back(s[axis]);
        ids.push_back(p.id());
        out_shape[axis] += s[axis];
    }
    const AxisSplit sp = split_at(first, axis);
    const std::size_t total = out_shape[axis];
    std::vector<double> out(sp.outer * total * sp.inner);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        auto v = parts[k].value();
        const std::size_t block = dims[k] * sp.inner;
        for (std::size_t o = 0; o < sp.outer; ++o)
            std::copy_n(v.data() + o * block, block, out.data() + (o * total + offset) * sp.inner);
        offset += dims[k];
    }
    return parts[0].tape().record(
        std::move(out_shape), std::move(out), parts, [ids, dims, sp, total](Tape& t, std::size_t self) {
            auto g = t.grad(self);
            std::size_t off = 0;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                const std::size_t block = dims[k] * sp.inner;
                if (t.needs_grad(ids[k])) {
                    auto gk = t.grad(ids[k]);
                    for (std::size_t o = 0; o < sp.outer; ++o) {
                        const double* src = g.data() + (o * total + off) * sp.inner;
                        double* dst = gk.data() + o * block;
                        for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
                    }
                }
                off += dims[k];
            }
        });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
    const Shape& s = a.shape();
    if (axis >= s.size() || begin >= end || end > s[axis])
        throw std::invalid_argument("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                    ") on axis " + std::to_string(axis) + " invalid for " + shape_string(s));
    const AxisSplit sp = split_at(s, axis);
    const std::size_t full = s[axis], len = end - begin;
    Shape out_shape = s;
    out_shape[axis] = len;
    auto v = a.value();
    std::vector<double> out(sp.outer * len * sp.inner);
    for (std::size_t o = 0; o < sp.outer; ++o)
        std::copy_n(v.data() + (o * full + begin) * sp.inner, len * sp.inner, out.data() + o * len * sp.inner);
    const std::size_t in = a.id();
    return a.tape().record(std::move(out_shape), std::move(out), {a},
                           [in, sp, full, begin, len](Tape& t, std::size_t self) {
                               auto g = t.grad(self);
                               auto gi = t.grad(in);
                               for (std::size_t o = 0; o < sp.outer; ++o) {
                                   const double* src = g.data() + o * len * sp.inner;
                                   double* dst = gi.data() + (o * full + begin) * sp.inner;
                                   for (std::size_t i = 0; i < len * sp.inner; ++i) dst[i] += src[i];
                               }
                           });
}

Var reshape(Var a, Shape shape) {
    if (numel(shape) != a.value().size())
        throw std::invalid_argument("reshape: cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
    auto v = a.value();
    const std::size_t in = a.id();
    return a.tape().record(std::move(shape), std::vector<double>(v.begin(), v.end()), {a},
                           [in](Tape& t, std::size_t self) {
                               auto g = t.grad(self);
                               auto gi = t.grad(in);
                               for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
                           });
}

void adam_step(std::span<Tensor* const> params, AdamState& state, const AdamConfig& config) {
    if (state.m.size() != params.size()) {
        state.m.clear();
        state.v.clear();
        for (const Tensor* p : params) {
            state.m.emplace_back(p->size(), 0.0);
            state.v.emplace_back(p->size(), 0.0);
        }
        state.step = 0;
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = *params[k];
        if (p.grad.size() != p.data.size()) p.zero_grad();
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double g = p.grad[i];
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            p.data[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.eps);
        }
    }
}

void save_tensors(std::ostream& out, std::span<const NamedTensor> tensors) {
    char buf[40];
    for (const auto& nt : tensors) {
        if (nt.name.find(',') != std::string::npos || nt.name.empty())
            throw std::invalid_argument("tensor name '" + nt.name + "' must be non-empty and comma-free");
        out << nt.name << ',';
        const Shape& s = nt.tensor->shape;
        if (s.empty()) out << "scalar";
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "x" : "") << s[i];
        for (double v : nt.tensor->data) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::map<std::string, Tensor> load_tensors(std::istream& in) {
    std::map<std::string, Tensor> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string name, dims, cell;
        if (!std::getline(ls, name, ',') || !std::getline(ls, dims, ','))
            throw std::runtime_error("malformed tensor line: '" + line.substr(0, 40) + "'");
        Shape shape;
        if (dims != "scalar") {
            std::istringstream ds(dims);
            std::string d;
            while (std::getline(ds, d, 'x')) shape.push_back(static_cast<std::size_t>(std::stoull(d)));
        }
        std::vector<double> data;
        while (std::getline(ls, cell, ',')) data.push_back(std::strtod(cell.c_str(), nullptr));
        if (data.size() != numel(shape))
            throw std::runtime_error("tensor '" + name + "' has " + std::to_string(data.size()) +
                                     " values for shape " + shape_string(shape));
        out.emplace(name, Tensor::from(std::move(shape), std::move(data), true));
    }
    return out;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
}

Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& v : t.data) v = rng.uniform(-a, a);
    return t;
}

}  // namespace for2for::ng
