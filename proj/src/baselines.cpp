#include "for2for/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "for2for/errors.hpp"
#include "for2for/log.hpp"

namespace for2for {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

void require_horizon(int h) {
    if (h < 1) throw DataError("forecast horizon must be >= 1");
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Centred moving average of order p (2 x p for even p); NaN where undefined.
std::vector<double> centred_moving_average(std::span<const double> x, int period) {
    const std::size_t n = x.size();
    const std::size_t p = static_cast<std::size_t>(period);
    const std::size_t half = p / 2;
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = half; t + half < n; ++t) {
        double acc = 0.0;
        if (p % 2 == 1) {
            for (std::size_t j = t - half; j <= t + half; ++j) acc += x[j];
        } else {
            acc = 0.5 * x[t - half] + 0.5 * x[t + half];
            for (std::size_t j = t - half + 1; j < t + half; ++j) acc += x[j];
        }
        out[t] = acc / static_cast<double>(p);
    }
    return out;
}

SeasonalDecomposition classical_decompose(std::span<const double> x, int period, bool multiplicative) {
    const std::size_t n = x.size();
    const std::size_t p = static_cast<std::size_t>(period);
    if (period < 2 || n < 2 * p)
        throw DataError("classical decomposition needs period >= 2 and at least two full periods");
    if (multiplicative && std::any_of(x.begin(), x.end(), [](double v) { return v <= 0.0; }))
        throw DataError("multiplicative decomposition requires positive observations");

    auto trend = centred_moving_average(x, period);
    std::vector<double> sums(p, 0.0);
    std::vector<int> counts(p, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (std::isnan(trend[t])) continue;
        sums[t % p] += multiplicative ? x[t] / trend[t] : x[t] - trend[t];
        counts[t % p] += 1;
    }
    SeasonalDecomposition d;
    d.is_seasonal = true;
    d.seasonal_indices.resize(p);
    for (std::size_t k = 0; k < p; ++k) d.seasonal_indices[k] = sums[k] / counts[k];
    const double centre = mean_of(d.seasonal_indices);
    for (auto& s : d.seasonal_indices) s = multiplicative ? s / centre : s - centre;

    d.deseasonalized.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        d.deseasonalized[t] = multiplicative ? x[t] / d.seasonal_indices[t % p]
                                             : x[t] - d.seasonal_indices[t % p];
    }
    return d;
}

SeasonalDecomposition unit_decomposition(std::span<const double> x, int period) {
    SeasonalDecomposition d;
    d.is_seasonal = false;
    d.seasonal_indices.assign(static_cast<std::size_t>(std::max(period, 1)), 1.0);
    d.deseasonalized.assign(x.begin(), x.end());
    return d;
}

/// Golden-section minimisation on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

double ses_sse(std::span<const double> x, double alpha) {
    double level = x[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double e = x[t] - level;
        sse += e * e;
        level += alpha * e;
    }
    return sse;
}

struct Ols {
    double intercept = 0.0;
    double slope = 0.0;
};

/// Least squares y = a + b t over t = 0..n-1.
Ols fit_line(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    const double tbar = (n - 1.0) / 2.0;
    const double ybar = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double dt = static_cast<double>(t) - tbar;
        sxy += dt * (y[t] - ybar);
        sxx += dt * dt;
    }
    Ols fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = ybar - fit.slope * tbar;
    return fit;
}

// ---------------------------------------------------------------------------
// ETS

struct EtsSpec {
    EtsTrend trend;
    bool seasonal;
};

struct EtsParams {
    double alpha = 0.5;
    double beta = 0.0;
    double gamma = 0.0;
    double phi = 1.0;
};

struct EtsInit {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;  // position k applies to t % p == k
};

constexpr double kParamLo = 1e-4;
constexpr double kParamHi = 0.9999;
constexpr double kPhiLo = 0.8;
constexpr double kPhiHi = 0.98;

int free_parameter_count(const EtsSpec& spec) {
    int n = 1;
    if (spec.trend != EtsTrend::None) ++n;
    if (spec.trend == EtsTrend::Damped) ++n;
    if (spec.seasonal) ++n;
    return n;
}

/// Box coordinates in [0,1]^k -> smoothing parameters satisfying
/// beta < alpha, gamma < 1 - alpha and phi in [0.8, 0.98].
EtsParams decode(const EtsSpec& spec, std::span<const double> u) {
    auto lerp = [](double lo, double hi, double v) { return lo + (hi - lo) * std::clamp(v, 0.0, 1.0); };
    EtsParams p;
    std::size_t i = 0;
    p.alpha = lerp(kParamLo, kParamHi, u[i++]);
    if (spec.trend != EtsTrend::None) p.beta = p.alpha * lerp(kParamLo, kParamHi, u[i++]);
    if (spec.trend == EtsTrend::Damped) p.phi = lerp(kPhiLo, kPhiHi, u[i++]);
    if (spec.seasonal) p.gamma = (1.0 - p.alpha) * lerp(kParamLo, kParamHi, u[i++]);
    return p;
}

EtsInit initial_states(std::span<const double> x, const EtsSpec& spec, int period) {
    EtsInit init;
    std::vector<double> y(x.begin(), x.end());
    if (spec.seasonal) {
        auto d = classical_decompose(x, period, /*multiplicative=*/false);
        init.seasonal = d.seasonal_indices;
        y = d.deseasonalized;
    }
    const std::size_t m = std::min<std::size_t>(y.size(), std::max<std::size_t>(10, 2 * static_cast<std::size_t>(std::max(period, 1))));
    std::span<const double> head(y.data(), m);
    if (spec.trend == EtsTrend::None) {
        init.level = mean_of(head);
    } else {
        const Ols line = fit_line(head);
        init.trend = line.slope;
        init.level = line.intercept - line.slope;
    }
    return init;
}

struct EtsRun {
    double sse = kInf;
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;
};

EtsRun run_ets(std::span<const double> x, const EtsSpec& spec, const EtsParams& par, const EtsInit& init,
               int period) {
    EtsRun r;
    double level = init.level;
    double trend = init.trend;
    std::vector<double> seasonal = init.seasonal;
    const std::size_t p = spec.seasonal ? static_cast<std::size_t>(period) : 1;
    const double phi = spec.trend == EtsTrend::Damped ? par.phi : 1.0;
    double sse = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double s = spec.seasonal ? seasonal[t % p] : 0.0;
        const double damped_trend = spec.trend == EtsTrend::None ? 0.0 : phi * trend;
        const double yhat = level + damped_trend + s;
        const double e = x[t] - yhat;
        sse += e * e;
        level = level + damped_trend + par.alpha * e;
        if (spec.trend != EtsTrend::None) trend = damped_trend + par.beta * e;
        if (spec.seasonal) seasonal[t % p] = s + par.gamma * e;
        if (!std::isfinite(level) || !std::isfinite(sse)) return r;
    }
    r.sse = sse;
    r.level = level;
    r.trend = trend;
    r.seasonal = std::move(seasonal);
    return r;
}

/// Nelder-Mead on the unit box with coordinates clamped on evaluation.
std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, double step, int max_iter, double tol) {
    const std::size_t k = start.size();
    std::vector<std::vector<double>> simplex(k + 1, start);
    for (std::size_t i = 0; i < k; ++i) {
        simplex[i + 1][i] += (start[i] + step <= 1.0) ? step : -step;
    }
    auto clamp_point = [](std::vector<double>& v) {
        for (auto& c : v) c = std::clamp(c, 0.0, 1.0);
    };
    std::vector<double> values(k + 1);
    for (std::size_t i = 0; i <= k; ++i) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(k + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[k - 1];
        if (std::abs(values[worst] - values[best]) <= tol * (std::abs(values[best]) + tol)) break;

        std::vector<double> centroid(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) centroid[j] += simplex[order[i]][j] / static_cast<double>(k);
        }
        auto along = [&](double coef) {
            std::vector<double> pnt(k);
            for (std::size_t j = 0; j < k; ++j) pnt[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
            clamp_point(pnt);
            return pnt;
        };
        auto reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
        } else {
            auto contracted = along(fr < values[worst] ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(contracted);
                values[worst] = fc;
            } else {
                for (std::size_t i = 1; i <= k; ++i) {
                    auto& pnt = simplex[order[i]];
                    for (std::size_t j = 0; j < k; ++j) pnt[j] = simplex[best][j] + 0.5 * (pnt[j] - simplex[best][j]);
                    values[order[i]] = f(pnt);
                }
            }
        }
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    return simplex[static_cast<std::size_t>(best_it - values.begin())];
}

std::vector<double> ets_forecast(const EtsSpec& spec, const EtsParams& par, const EtsRun& run,
                                 std::size_t n, int h, int period) {
    std::vector<double> out(static_cast<std::size_t>(h));
    const std::size_t p = spec.seasonal ? static_cast<std::size_t>(period) : 1;
    double trend_sum = 0.0;
    double phi_pow = 1.0;
    for (int i = 1; i <= h; ++i) {
        if (spec.trend == EtsTrend::Additive) {
            trend_sum += 1.0;
        } else if (spec.trend == EtsTrend::Damped) {
            phi_pow *= par.phi;
            trend_sum += phi_pow;
        }
        double value = run.level + trend_sum * run.trend;
        if (spec.seasonal) value += run.seasonal[(n + static_cast<std::size_t>(i) - 1) % p];
        out[static_cast<std::size_t>(i - 1)] = value;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> acf(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
    out[0] = 1.0;
    if (n == 0) return out;
    const double m = mean_of(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom <= 0.0) return out;
    for (int k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) num += (x[t] - m) * (x[t - k] - m);
        out[static_cast<std::size_t>(k)] = num / denom;
    }
    return out;
}

bool classify_seasonal(std::span<const double> x, int period) {
    if (period < 1) throw DataError("seasonal period must be >= 1");
    if (period == 1) return false;
    const std::size_t n = x.size();
    if (n < 3 * static_cast<std::size_t>(period)) return false;
    const auto r = acf(x, period);
    double tail = 0.0;
    for (int i = 1; i < period; ++i) tail += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    const double limit = 1.645 * std::sqrt((1.0 + 2.0 * tail) / static_cast<double>(n));
    return std::abs(r[static_cast<std::size_t>(period)]) > limit;
}

SeasonalDecomposition decompose_multiplicative(std::span<const double> x, int period) {
    return classical_decompose(x, period, /*multiplicative=*/true);
}

SeasonalDecomposition seasonal_adjust(std::span<const double> x, int period) {
    if (!classify_seasonal(x, period)) return unit_decomposition(x, period);
    if (std::any_of(x.begin(), x.end(), [](double v) { return v <= 0.0; }))
        return unit_decomposition(x, period);
    return decompose_multiplicative(x, period);
}

double future_index(const SeasonalDecomposition& d, std::size_t length, int step) {
    const std::size_t p = d.seasonal_indices.size();
    if (p == 0) return 1.0;
    return d.seasonal_indices[(length + static_cast<std::size_t>(step) - 1) % p];
}

std::vector<double> forecast_naive(std::span<const double> x, int h) {
    require_horizon(h);
    if (x.empty()) throw DataError("naive forecast needs at least one observation");
    return std::vector<double>(static_cast<std::size_t>(h), x.back());
}

std::vector<double> forecast_snaive(std::span<const double> x, int h, int period) {
    require_horizon(h);
    if (period < 1) throw DataError("seasonal period must be >= 1");
    const std::size_t p = static_cast<std::size_t>(period);
    if (x.size() < p)
        throw DataError("seasonal naive needs at least one full period (" + std::to_string(period) +
                        " observations), got " + std::to_string(x.size()));
    std::vector<double> out(static_cast<std::size_t>(h));
    const std::size_t base = x.size() - p;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[base + i % p];
    return out;
}

std::vector<double> forecast_rwdrift(std::span<const double> x, int h) {
    require_horizon(h);
    if (x.size() < 2) throw DataError("random walk with drift needs at least two observations");
    const double drift = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    std::vector<double> out(static_cast<std::size_t>(h));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.back() + static_cast<double>(i + 1) * drift;
    return out;
}

SesFit fit_ses(std::span<const double> x) {
    if (x.size() < 2) throw DataError("exponential smoothing needs at least two observations");
    auto sse = [&](double a) { return ses_sse(x, a); };
    double best_alpha = kParamLo;
    double best = sse(best_alpha);
    for (int i = 1; i <= 20; ++i) {
        const double a = std::min(kParamHi, 0.05 * i);
        const double v = sse(a);
        if (v < best) {
            best = v;
            best_alpha = a;
        }
    }
    const double lo = std::max(kParamLo, best_alpha - 0.05);
    const double hi = std::min(kParamHi, best_alpha + 0.05);
    double alpha = golden_section(sse, lo, hi, 1e-10);
    if (sse(alpha) > best) alpha = best_alpha;

    SesFit fit;
    fit.alpha = alpha;
    fit.level = x[0];
    for (std::size_t t = 1; t < x.size(); ++t) fit.level += alpha * (x[t] - fit.level);
    fit.sse = sse(alpha);
    return fit;
}

std::vector<double> forecast_theta(std::span<const double> x, int h, int period) {
    require_horizon(h);
    if (x.size() < 3) throw DataError("theta method needs at least three observations");
    const auto d = seasonal_adjust(x, period);
    const auto& y = d.deseasonalized;
    const Ols line = fit_line(y);
    std::vector<double> theta2(y.size());
    for (std::size_t t = 0; t < y.size(); ++t)
        theta2[t] = 2.0 * y[t] - (line.intercept + line.slope * static_cast<double>(t));
    const SesFit ses = fit_ses(theta2);

    std::vector<double> out(static_cast<std::size_t>(h));
    const double last_t = static_cast<double>(y.size() - 1);
    for (int i = 1; i <= h; ++i) {
        const double theta0 = line.intercept + line.slope * (last_t + i);
        out[static_cast<std::size_t>(i - 1)] = 0.5 * (theta0 + ses.level) * future_index(d, x.size(), i);
    }
    return out;
}

EtsFit fit_ets(std::span<const double> x, int h, int period) {
    require_horizon(h);
    const std::size_t n = x.size();
    if (n < 4) throw DataError("exponential smoothing needs at least four observations");

    double scale = 0.0;
    for (double v : x) scale += v * v;
    scale = std::sqrt(scale / static_cast<double>(n));
    const double sse_floor = static_cast<double>(n) * std::pow(1e-10 * std::max(scale, 1e-300), 2);

    std::vector<EtsSpec> candidates;
    for (bool seasonal : {false, true}) {
        if (seasonal && (period < 2 || n < 2 * static_cast<std::size_t>(period))) continue;
        for (auto trend : {EtsTrend::None, EtsTrend::Additive, EtsTrend::Damped})
            candidates.push_back({trend, seasonal});
    }

    EtsFit best;
    best.aicc = kInf;
    for (const auto& spec : candidates) {
        const int smoothing = free_parameter_count(spec);
        int states = 1 + (spec.trend != EtsTrend::None ? 1 : 0) + (spec.seasonal ? period - 1 : 0);
        const int k = smoothing + states + 1;
        if (static_cast<int>(n) - k - 1 <= 0) continue;

        EtsInit init;
        try {
            init = initial_states(x, spec, period);
        } catch (const DataError&) {
            continue;
        }
        auto objective = [&](std::span<const double> u) {
            return run_ets(x, spec, decode(spec, u), init, period).sse;
        };

        // Coarse grid, then local refinement from the best grid point.
        const std::array<double, 4> grid = {0.1, 0.35, 0.65, 0.9};
        const std::size_t dims = static_cast<std::size_t>(smoothing);
        std::vector<double> u(dims, 0.0), best_u(dims, 0.5);
        double best_sse = kInf;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < dims; ++i) combos *= grid.size();
        for (std::size_t c = 0; c < combos; ++c) {
            std::size_t code = c;
            for (std::size_t i = 0; i < dims; ++i) {
                u[i] = grid[code % grid.size()];
                code /= grid.size();
            }
            const double v = objective(u);
            if (v < best_sse) {
                best_sse = v;
                best_u = u;
            }
        }
        if (!std::isfinite(best_sse)) continue;
        const auto refined = nelder_mead(objective, best_u, 0.1, 400, 1e-12);
        const EtsParams par = decode(spec, refined);
        const EtsRun run = run_ets(x, spec, par, init, period);
        if (!std::isfinite(run.sse)) continue;

        const double sse = std::max(run.sse, sse_floor);
        const double nd = static_cast<double>(n);
        const double aicc = nd * std::log(sse / nd) + 2.0 * k + 2.0 * k * (k + 1) / (nd - k - 1);
        auto fc = ets_forecast(spec, par, run, n, h, period);
        if (!all_finite(fc)) continue;
        if (aicc < best.aicc) {
            best.trend = spec.trend;
            best.seasonal = spec.seasonal;
            best.alpha = par.alpha;
            best.beta = par.beta;
            best.gamma = par.gamma;
            best.phi = spec.trend == EtsTrend::Damped ? par.phi : 1.0;
            best.aicc = aicc;
            best.forecast = std::move(fc);
        }
    }
    if (!std::isfinite(best.aicc)) throw NumericError("no exponential smoothing candidate could be fitted");
    return best;
}

std::vector<double> forecast_ets(std::span<const double> x, int h, int period) {
    return fit_ets(x, h, period).forecast;
}

ArFit fit_ar_yule_walker(std::span<const double> x, int max_order) {
    const std::size_t n = x.size();
    if (n < 3) throw DataError("AR fit needs at least three observations");
    max_order = std::clamp(max_order, 1, static_cast<int>(n) - 2);

    ArFit fit;
    fit.mean = mean_of(x);
    std::vector<double> gamma(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        for (std::size_t t = k; t < n; ++t) gamma[k] += (x[t] - fit.mean) * (x[t - k] - fit.mean);
        gamma[k] /= static_cast<double>(n);
    }
    if (gamma[0] <= 0.0) {
        fit.coefficients.assign(1, 0.0);
        return fit;
    }

    // Levinson-Durbin; keep the AIC-best order.
    std::vector<double> phi, prev;
    double variance = gamma[0];
    double best_aic = kInf;
    for (int k = 1; k <= max_order; ++k) {
        double acc = gamma[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j) acc -= prev[static_cast<std::size_t>(j - 1)] * gamma[static_cast<std::size_t>(k - j)];
        const double reflection = acc / variance;
        phi.assign(static_cast<std::size_t>(k), 0.0);
        for (int j = 1; j < k; ++j)
            phi[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - reflection * prev[static_cast<std::size_t>(k - j - 1)];
        phi[static_cast<std::size_t>(k - 1)] = reflection;
        variance *= (1.0 - reflection * reflection);
        prev = phi;
        if (!(variance > 0.0)) {
            if (fit.coefficients.empty()) {
                fit.coefficients = phi;
                fit.innovation_variance = 0.0;
            }
            break;
        }
        const double aic = static_cast<double>(n) * std::log(variance) + 2.0 * k;
        if (aic < best_aic) {
            best_aic = aic;
            fit.coefficients = phi;
            fit.innovation_variance = variance;
        }
    }
    return fit;
}

StlmArFit fit_stlm_ar(std::span<const double> x, int h, int period) {
    require_horizon(h);
    if (period < 2) throw DataError("STLM-AR needs a seasonal period >= 2");
    if (x.size() < 2 * static_cast<std::size_t>(period))
        throw DataError("STLM-AR needs at least two full periods of data");

    StlmArFit fit;
    fit.multiplicative = std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
    fit.decomposition = classical_decompose(x, period, fit.multiplicative);
    const auto& y = fit.decomposition.deseasonalized;
    const int max_order = std::max(1, std::min(10, static_cast<int>(x.size()) / 5));
    fit.ar = fit_ar_yule_walker(y, max_order);

    std::vector<double> z(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) z[t] = y[t] - fit.ar.mean;
    fit.forecast.resize(static_cast<std::size_t>(h));
    for (int i = 1; i <= h; ++i) {
        double next = 0.0;
        for (std::size_t j = 0; j < fit.ar.coefficients.size(); ++j) {
            if (z.size() < j + 1) break;
            next += fit.ar.coefficients[j] * z[z.size() - 1 - j];
        }
        z.push_back(next);
        const double adjusted = fit.ar.mean + next;
        const double idx = future_index(fit.decomposition, x.size(), i);
        fit.forecast[static_cast<std::size_t>(i - 1)] = fit.multiplicative ? adjusted * idx : adjusted + idx;
    }
    return fit;
}

std::vector<double> forecast_stlm_ar(std::span<const double> x, int h, int period) {
    return fit_stlm_ar(x, h, period).forecast;
}

std::vector<double> forecast_naive2(std::span<const double> x, int h, int period) {
    require_horizon(h);
    if (x.size() < std::max<std::size_t>(2, static_cast<std::size_t>(period)))
        throw DataError("Naive2 needs at least max(2, period) observations");
    const auto d = seasonal_adjust(x, period);
    if (!d.is_seasonal) return forecast_naive(x, h);
    std::vector<double> out(static_cast<std::size_t>(h));
    const double last = d.deseasonalized.back();
    for (int i = 1; i <= h; ++i) out[static_cast<std::size_t>(i - 1)] = last * future_index(d, x.size(), i);
    return out;
}

ForecastMatrix forecast_all(const TimeSeries& series, int h, int period, const ForecastColumns* external,
                            ForecastAllOptions options) {
    require_horizon(h);
    const auto& x = series.values();

    auto fallback = [&]() -> std::vector<double> {
        try {
            return forecast_snaive(x, h, period);
        } catch (const Error&) {
            return forecast_naive(x, h);
        }
    };
    auto external_column = [&](std::string_view model) -> const std::vector<double>* {
        if (!external) return nullptr;
        auto it = external->find(std::string(model));
        if (it == external->end()) return nullptr;
        if (it->second.size() != static_cast<std::size_t>(h))
            throw DataError("external forecast " + series.id() + "/" + std::string(model) + " has length " +
                            std::to_string(it->second.size()) + ", expected " + std::to_string(h));
        return &it->second;
    };
    auto native = [&](std::string_view model, auto&& compute) -> std::vector<double> {
        if (options.prefer_external) {
            if (const auto* ext = external_column(model)) return *ext;
        }
        try {
            auto v = compute();
            if (all_finite(v)) return v;
            warn("series '" + series.id() + "': " + std::string(model) +
                 " produced non-finite forecasts; using seasonal naive");
        } catch (const DataError&) {
            // Unmet length/period precondition: the fallback is the expected outcome.
        } catch (const Error& e) {
            warn("series '" + series.id() + "': " + std::string(model) + " failed (" + e.what() +
                 "); using seasonal naive");
        }
        return fallback();
    };

    Matrix values(static_cast<std::size_t>(h), kNumBaseModels);
    for (std::size_t j = 0; j < kNumBaseModels; ++j) {
        const std::string_view model = kBaseModelLexicon[j];
        std::vector<double> column;
        if (model == "rwdrift") {
            column = native(model, [&] { return forecast_rwdrift(x, h); });
        } else if (model == "snaive") {
            column = native(model, [&] { return forecast_snaive(x, h, period); });
        } else if (model == "theta") {
            column = native(model, [&] { return forecast_theta(x, h, period); });
        } else if (model == "ets") {
            column = native(model, [&] { return forecast_ets(x, h, period); });
        } else if (model == "stlmar") {
            column = native(model, [&] { return forecast_stlm_ar(x, h, period); });
        } else if (const auto* ext = external_column(model)) {
            column = *ext;
        } else {
            column = fallback();
        }
        values.set_column(j, column);
    }
    return ForecastMatrix(series.id(), lexicon_ids(), std::move(values));
}

}  // namespace for2for
