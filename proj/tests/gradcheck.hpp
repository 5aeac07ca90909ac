#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "for2for/numgrad.hpp"

namespace for2for::testing {

struct GradCheckResult {
    std::size_t checked = 0;
    std::size_t failures = 0;
    double worst_rel = 0.0;
    std::string first_failure;
    bool ok() const { return failures == 0 && checked > 0; }
};

/// Builds the graph output from parameter vars bound on `tape`.
using GraphFn = std::function<ng::Var(ng::Tape&, const std::vector<ng::Var>&)>;

/**
 * Compares reverse-mode gradients of sum(out * R), R a fixed random
 * projection, against central differences with step `step`. An entry
 * passes when |analytic - numeric| <= max(rel * max(|a|, |n|), abs_floor).
 */
inline GradCheckResult check_gradients(std::vector<ng::Tensor*> params, const GraphFn& graph, std::uint64_t seed,
                                       double step = 1e-5, double rel = 1e-4, double abs_floor = 1e-6) {
    ng::Rng rng(seed ^ 0xabcdefULL);
    std::vector<double> projection;
    auto loss_of = [&](ng::Tape& tape) {
        std::vector<ng::Var> vars;
        for (auto* p : params) vars.push_back(tape.parameter(*p));
        const ng::Var out = graph(tape, vars);
        if (projection.empty()) {
            projection.resize(out.value().size());
            for (double& r : projection) r = rng.uniform(-1.0, 1.0);
        }
        return ng::sum(ng::mul(out, tape.constant(out.shape(), projection)));
    };

    for (auto* p : params) {
        p->requires_grad = true;
        p->zero_grad();
    }
    {
        ng::Tape tape;
        const ng::Var loss = loss_of(tape);
        tape.backward(loss);
    }

    GradCheckResult result;
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = *params[k];
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + step;
            ng::Tape plus_tape;
            const double plus = loss_of(plus_tape).item();
            p.data[i] = saved - step;
            ng::Tape minus_tape;
            const double minus = loss_of(minus_tape).item();
            p.data[i] = saved;
            const double numeric = (plus - minus) / (2.0 * step);
            const double analytic = p.grad[i];
            const double diff = std::abs(numeric - analytic);
            const double scale = std::max(std::abs(numeric), std::abs(analytic));
            ++result.checked;
            if (scale > 0) result.worst_rel = std::max(result.worst_rel, diff / scale);
            if (diff > std::max(rel * scale, abs_floor)) {
                if (result.failures++ == 0) {
                    std::ostringstream msg;
                    msg << "param " << k << " entry " << i << ": analytic " << analytic << " numeric " << numeric;
                    result.first_failure = msg.str();
                }
            }
        }
    }
    return result;
}

inline ng::Tensor random_tensor(ng::Shape shape, ng::Rng& rng, double lo = -1.0, double hi = 1.0) {
    auto t = ng::Tensor::zeros(std::move(shape));
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

}  // namespace for2for::testing
