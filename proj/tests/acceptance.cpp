// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every gating criterion passes. Criterion 12 runs only when real quarterly
// data is supplied through FOR2FOR_M4_QUARTERLY_DIR and never gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "for2for/baselines.hpp"
#include "for2for/errors.hpp"
#include "for2for/ingest.hpp"
#include "for2for/log.hpp"
#include "for2for/meta_model.hpp"
#include "for2for/metrics.hpp"
#include "for2for/preprocess.hpp"
#include "for2for/trainer.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace for2for;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kMetricTol = 1e-9;
constexpr double kOwaFixtureTol = 5e-5;  // the published OWA is rounded to 4 decimals
constexpr double kGradStep = 1e-5;
constexpr double kGradRel = 1e-4;
constexpr double kGradAbs = 1e-6;
constexpr double kRoundTripTol = 1e-12;
constexpr double kNaiveTol = 1e-9;
constexpr double kLinearTol = 1e-12;
constexpr int kCorpusSeeds = 5;
constexpr int kRequiredWins = 4;
constexpr std::size_t kCorpusSize = 400;
constexpr int kLearnEpochs = 300;
constexpr int kLearnInstances = 4;

struct Result {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

// ---- 1 ----------------------------------------------------------------------

Result metric_oracles() {
    std::ostringstream d;
    bool ok = true;
    auto expect = [&](const char* what, double got, double want, double tol) {
        const bool good = std::abs(got - want) <= tol;
        if (!good) d << what << " got " << got << " want " << want << "; ";
        ok &= good;
    };
    expect("smape2", smape(std::vector<double>{100, 200}, std::vector<double>{110, 180}),
           (10.0 / 210.0 + 20.0 / 380.0) * 100.0, kMetricTol);
    expect("smape1", smape(std::vector<double>{100}, std::vector<double>{50}), 2.0 * 50.0 / 150.0 * 100.0, kMetricTol);
    expect("mase", mase(std::vector<double>{18, 20}, std::vector<double>{17, 21}, std::vector<double>{10, 12, 14, 16}, 1),
           0.5, kMetricTol);
    expect("owa_half", owa({5.0, 0.5}, {10.0, 1.0}), 0.5, kMetricTol);
    const AccuracyPair n2{11.012, 1.371};
    ok &= owa(n2, n2) == 1.0;
    expect("owa_fixture", owa({9.6610, 1.1051}, n2), 0.8417, kOwaFixtureTol);
    if (ok) d << "hand fixtures within 1e-9; owa(naive2,naive2)=1 exactly; quarterly fixture "
              << fmt("%.5f", owa({9.6610, 1.1051}, n2));
    return {ok, d.str()};
}

// ---- 2 ----------------------------------------------------------------------

Result gradient_checks() {
    using namespace for2for::ng;
    using for2for::testing::check_gradients;
    using for2for::testing::random_tensor;
    std::size_t entries = 0, failures = 0;
    double worst = 0.0;
    std::string first;
    auto run = [&](std::vector<Tensor*> params, const for2for::testing::GraphFn& g, std::uint64_t seed, const char* name) {
        const auto r = check_gradients(std::move(params), g, seed, kGradStep, kGradRel, kGradAbs);
        entries += r.checked;
        failures += r.failures;
        worst = std::max(worst, r.worst_rel);
        if (!r.ok() && first.empty()) first = std::string(name) + ": " + r.first_failure;
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        auto a = random_tensor({3, 4}, rng), b = random_tensor({3, 4}, rng);
        auto pos = random_tensor({3, 4}, rng, 0.5, 3.0);
        auto nz = random_tensor({3, 4}, rng, 0.2, 1.5);
        for (double& v : nz.data)
            if (rng.uniform() < 0.5) v = -v;
        auto m1 = random_tensor({3, 5}, rng), m2 = random_tensor({5, 2}, rng);
        auto bias = random_tensor({4}, rng);
        auto t3 = random_tensor({2, 3, 4}, rng), t3b = random_tensor({2, 1, 4}, rng);
        auto img = random_tensor({2, 6, 8, 1}, rng), k33 = random_tensor({3, 3, 1, 2}, rng);
        auto k1m = random_tensor({1, 8, 1, 1}, rng);

        run({&a, &b}, [](Tape&, const std::vector<Var>& v) { return add(v[0], v[1]); }, seed, "add");
        run({&a, &b}, [](Tape&, const std::vector<Var>& v) { return sub(v[0], v[1]); }, seed, "sub");
        run({&a, &b}, [](Tape&, const std::vector<Var>& v) { return mul(v[0], v[1]); }, seed, "mul");
        run({&m1, &m2}, [](Tape&, const std::vector<Var>& v) { return matmul(v[0], v[1]); }, seed, "matmul");
        run({&img, &k33}, [](Tape&, const std::vector<Var>& v) { return conv2d(v[0], v[1], Padding::Same); }, seed,
            "conv2d same");
        run({&img, &k1m}, [](Tape&, const std::vector<Var>& v) { return conv2d(v[0], v[1], Padding::Valid); }, seed,
            "conv2d valid");
        run({&a}, [](Tape&, const std::vector<Var>& v) { return sigmoid(v[0]); }, seed, "sigmoid");
        run({&a}, [](Tape&, const std::vector<Var>& v) { return ng::tanh(v[0]); }, seed, "tanh");
        run({&a}, [](Tape&, const std::vector<Var>& v) { return ng::exp(v[0]); }, seed, "exp");
        run({&pos}, [](Tape&, const std::vector<Var>& v) { return ng::log(v[0]); }, seed, "log");
        run({&nz}, [](Tape&, const std::vector<Var>& v) { return ng::abs(v[0]); }, seed, "abs");
        run({&t3}, [](Tape&, const std::vector<Var>& v) { return sum(v[0]); }, seed, "sum");
        run({&t3}, [](Tape&, const std::vector<Var>& v) { return mean(v[0]); }, seed, "mean");
        run({&t3, &t3b}, [](Tape&, const std::vector<Var>& v) {
            const Var parts[] = {v[0], v[1]};
            return concat(parts, 1);
        }, seed, "concat");
        run({&t3}, [](Tape&, const std::vector<Var>& v) { return slice(v[0], 2, 1, 3); }, seed, "slice");
        run({&t3}, [](Tape&, const std::vector<Var>& v) { return reshape(v[0], {4, 6}); }, seed, "reshape");
        run({&t3, &bias}, [](Tape&, const std::vector<Var>& v) { return add_bias(v[0], v[1]); }, seed, "add_bias");
        run({&a}, [](Tape&, const std::vector<Var>& v) { return scale(v[0], 1.7); }, seed, "scale");

        auto cnn = cnn_init({8, 8, 4, 8, ResidualHead::FullyConnected}, seed);
        const auto cnn_x = random_tensor({2, 8, 8}, rng);
        std::vector<Tensor*> cnn_params;
        for (auto& p : cnn.parameters()) cnn_params.push_back(p.tensor);
        run(cnn_params, [&](Tape& t, const std::vector<Var>&) { return cnn_forward(t, cnn, cnn_x, true); }, seed, "cnn");

        auto rnn = rnn_init({8, 2, ReadoutSource::Hidden}, seed);
        for (auto& p : rnn.parameters())
            for (double& v : p.tensor->data) v = rng.uniform(-0.8, 0.8);
        const auto rnn_x = random_tensor({2, 3, 8}, rng);
        std::vector<Tensor*> rnn_params;
        for (auto& p : rnn.parameters()) rnn_params.push_back(p.tensor);
        run(rnn_params, [&](Tape& t, const std::vector<Var>&) { return rnn_forward(t, rnn, rnn_x, true); }, seed, "rnn");
    }
    std::ostringstream d;
    d << entries << " gradient entries over 5 seeds, " << failures << " outside tolerance, worst relative error "
      << fmt("%.2e", worst);
    if (!first.empty()) d << "; first: " << first;
    return {failures == 0, d.str()};
}

// ---- 3 ----------------------------------------------------------------------

Result transform_pipeline() {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> log_u(std::log(10.0), std::log(1e7));
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = std::exp(log_u(gen));
        const ScaleRecord s{"s", std::exp(log_u(gen)), ScaleMode::LastObsLog};
        worst = std::max(worst, std::abs(inverse_transform(transform(x, s), s) - x) / x);
    }
    std::vector<TimeSeries> series;
    for (std::uint64_t k = 0; k < 20; ++k) {
        std::mt19937_64 g(k);
        series.push_back(for2for::testing::quarterly("N" + std::to_string(k),
                                                     for2for::testing::seasonal_series(40, 4, 200, 1, 30, 5, g)));
    }
    bool naive_zero = true;
    auto with_naive = [](const TimeSeries& h, int steps) {
        auto m = forecast_all(h, steps, h.frequency().seasonal_period());
        Matrix v(static_cast<std::size_t>(steps), 1);
        v.set_column(0, forecast_naive(h.values(), steps));
        return ForecastMatrix(h.id(), {"naive"}, v);
    };
    for (const auto& s : series) {
        const auto inf = make_inference_sample(s, 8, with_naive);
        for (double v : inf.features.data()) naive_zero &= v == 0.0;
        const auto tr = make_training_sample(s, with_naive);
        for (double v : tr->features.data()) naive_zero &= v == 0.0;
    }
    const bool clip_ok = clip_floor(-5.0) == 10.0;
    std::ostringstream d;
    d << "worst round-trip relative error " << fmt("%.2e", worst) << " (tol 1e-12); naive column "
      << (naive_zero ? "exactly 0" : "NOT 0") << "; clip_floor(-5)=" << clip_floor(-5.0);
    return {worst <= kRoundTripTol && naive_zero && clip_ok, d.str()};
}

// ---- 4 ----------------------------------------------------------------------

void write_series_csv(const fs::path& path, const std::vector<TimeSeries>& series) {
    std::ofstream out(path);
    out << "id,values\n";
    for (const auto& s : series) {
        out << s.id();
        for (double v : s.values()) out << ',' << format_double(v);
        out << '\n';
    }
}

Result degenerate_end_to_end() {
    for2for::testing::TempDir dir;
    std::vector<TimeSeries> series;
    std::mt19937_64 gen(4);
    for (int i = 0; i < 50; ++i)
        series.push_back(for2for::testing::quarterly(
            "Q" + std::to_string(i), for2for::testing::seasonal_series(20 + i % 30, 4, 100 + 37 * i, 2, 25, 6, gen)));
    write_series_csv(dir / "train.csv", series);

    MetaModel zero;
    auto net = rnn_init({8, 4, ReadoutSource::Hidden}, 1);
    for (auto& p : net.parameters()) std::fill(p.tensor->data.begin(), p.tensor->data.end(), 0.0);
    zero.net = std::move(net);
    zero.frequencies = {FrequencyClass::of(Frequency::Quarterly)};
    fs::create_directories(dir / "models");
    save_model(dir / "models" / "model_0.txt", zero);
    save_model(dir / "models" / "model_1.txt", zero);

    std::ostringstream out, err;
    const int code = cli::run({"predict", "--train", (dir / "train.csv").string(), "--models",
                               (dir / "models").string(), "--out", (dir / "pred.csv").string()},
                              out, err);
    if (code != 0) return {false, "predict failed: " + err.str()};
    const auto pred = load_forecast_csv(dir / "pred.csv");
    double worst = 0.0;
    for (const auto& s : series)
        for (double v : pred.at(s.id())) worst = std::max(worst, std::abs(v - s.last()) / s.last());
    return {worst <= kNaiveTol && pred.size() == series.size(),
            std::to_string(series.size()) + " series through the predict command; worst relative gap to naive " +
                fmt("%.2e", worst)};
}

// ---- 5 ----------------------------------------------------------------------

Result collapse_to_linear() {
    auto model = cnn_init({8, 8, 0, 8, ResidualHead::None}, 5);
    ng::Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Matrix x(8, 8), y(8, 8), z(8, 8);
        for (double& v : x.data()) v = rng.uniform(-3, 3);
        for (double& v : y.data()) v = rng.uniform(-3, 3);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (std::size_t i = 0; i < 64; ++i) z.data()[i] = a * x.data()[i] + b * y.data()[i];
        const auto fx = cnn_forward(model, x), fy = cnn_forward(model, y), fz = cnn_forward(model, z);
        for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(fz[i] - (a * fx[i] + b * fy[i])));
    }
    return {worst <= kLinearTol, "200 superposition trials, worst deviation " + fmt("%.2e", worst)};
}

// ---- 6 ----------------------------------------------------------------------

Result rnn_causality() {
    auto model = rnn_init({8, 4, ReadoutSource::Hidden}, 6);
    ng::Rng rng(6);
    for (auto& p : model.parameters())
        for (double& v : p.tensor->data) v = rng.uniform(-0.8, 0.8);
    bool ok = true;
    std::size_t probes = 0;
    // h = 1: the only output is a function of the single row.
    Matrix one(1, 8);
    for (double& v : one.data()) v = rng.uniform(-1, 1);
    const double single = rnn_forward(model, one)[0];
    for (std::size_t tail = 1; tail <= 5; ++tail) {
        Matrix longer(1 + tail, 8);
        for (double& v : longer.data()) v = rng.uniform(-1, 1);
        std::copy(one.data().begin(), one.data().end(), longer.data().begin());
        ok &= rnn_forward(model, longer)[0] == single;
    }
    for (std::size_t h = 1; h <= 48; ++h) {
        Matrix x(h, 8);
        for (double& v : x.data()) v = rng.uniform(-1, 1);
        const auto base = rnn_forward(model, x);
        for (std::size_t j = 0; j < h; ++j) {
            auto p = x;
            for (double& v : p.row(j)) v += rng.uniform(0.1, 1.0);
            const auto out = rnn_forward(model, p);
            for (std::size_t i = 0; i < j; ++i) ok &= out[i] == base[i];
            ok &= out[j] != base[j];
            ++probes;
        }
    }
    return {ok, "h=1 output independent of appended rows; " + std::to_string(probes) +
                    " row perturbations for h=1..48 changed no earlier step"};
}

// ---- 7 and 8 ---------------------------------------------------------------

struct Corpus {
    ExperimentData data;
};

/// Quarterly-like series: trend, period-4 seasonality (mixed additive and
/// multiplicative shapes) and noise, all well above the clip floor.
Corpus make_corpus(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> eps(0.0, 1.0);
    const auto q = FrequencyClass::of(Frequency::Quarterly);
    Corpus c;
    for (std::size_t i = 0; i < kCorpusSize; ++i) {
        const std::size_t n = 24 + static_cast<std::size_t>(u(gen) * 48);  // in-sample length
        const double level = std::exp(std::log(200.0) + u(gen) * std::log(50.0));
        const double growth = (u(gen) * 0.03 - 0.005) * level;  // per-step trend
        const double amp = u(gen) * 0.25;
        double shape[4];
        for (double& s : shape) s = eps(gen);
        const double m = (shape[0] + shape[1] + shape[2] + shape[3]) / 4.0;
        for (double& s : shape) s -= m;
        const double noise = (0.01 + u(gen) * 0.06) * level;
        const double ar = u(gen) * 0.6;
        std::vector<double> x(n + 8);
        double e = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            e = ar * e + noise * eps(gen);
            const double trend = level + growth * static_cast<double>(t);
            x[t] = std::max(15.0, trend * (1.0 + amp * shape[t % 4] * 0.5) + e);
        }
        const std::string id = "Q" + std::to_string(i);
        c.data.train.emplace_back(id, q, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)));
        c.data.test[id] = std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    }
    return c;
}

struct SeedOutcome {
    double ensemble = 0, equal_weight = 0, best_single = 0, mean_instance = 0, worst_instance = 0;
    std::string best_name;
};

std::vector<SeedOutcome>& learning_runs() {
    static std::vector<SeedOutcome> runs = [] {
        std::vector<SeedOutcome> out;
        for (int k = 0; k < kCorpusSeeds; ++k) {
            auto corpus = make_corpus(1000 + static_cast<std::uint64_t>(k));
            RunConfig config;
            config.model_kind = ModelKind::Rnn;
            config.epochs = kLearnEpochs;
            config.n_instances = kLearnInstances;
            config.holdout_fraction = 0.0;
            config.seed = 1 + static_cast<std::uint64_t>(k);
            const auto result = run_experiment(corpus.data, config);

            SeedOutcome o;
            o.ensemble = result.evaluation->report.total.smape;
            std::vector<double> instance;
            for (const auto& p : result.instance_predictions)
                instance.push_back(evaluate_forecasts(corpus.data.train, corpus.data.test, p).report.total.smape);
            o.mean_instance = 0;
            o.worst_instance = 0;
            for (double v : instance) {
                o.mean_instance += v / static_cast<double>(instance.size());
                o.worst_instance = std::max(o.worst_instance, v);
            }

            std::vector<ForecastTable> per_model(kNumBaseModels);
            ForecastTable equal;
            for (const auto& s : corpus.data.train) {
                const auto m = forecast_all(s, 8, 4);
                std::vector<double> avg(8, 0.0);
                for (std::size_t j = 0; j < kNumBaseModels; ++j) {
                    const auto col = m.values().column(j);
                    per_model[j][s.id()] = col;
                    for (std::size_t i = 0; i < 8; ++i) avg[i] += col[i] / static_cast<double>(kNumBaseModels);
                }
                equal[s.id()] = avg;
            }
            o.equal_weight = evaluate_forecasts(corpus.data.train, corpus.data.test, equal).report.total.smape;
            o.best_single = 1e300;
            for (std::size_t j = 0; j < kNumBaseModels; ++j) {
                const double v = evaluate_forecasts(corpus.data.train, corpus.data.test, per_model[j]).report.total.smape;
                if (v < o.best_single) {
                    o.best_single = v;
                    o.best_name = std::string(kBaseModelLexicon[j]);
                }
            }
            std::printf("    corpus seed %d: ensemble %.4f  equal-weight %.4f  best single %.4f (%s)  "
                        "instances mean %.4f worst %.4f\n",
                        k, o.ensemble, o.equal_weight, o.best_single, o.best_name.c_str(), o.mean_instance,
                        o.worst_instance);
            std::fflush(stdout);
            out.push_back(o);
        }
        return out;
    }();
    return runs;
}

Result learning_benefit() {
    int wins = 0;
    for (const auto& o : learning_runs())
        if (o.ensemble < o.equal_weight && o.ensemble < o.best_single) ++wins;
    return {wins >= kRequiredWins, "ensemble sMAPE below both equal-weight and best single model in " +
                                       std::to_string(wins) + "/" + std::to_string(kCorpusSeeds) + " corpus seeds"};
}

Result ensemble_benefit() {
    int wins = 0;
    bool never_worse_than_worst = true;
    for (const auto& o : learning_runs()) {
        if (o.ensemble <= o.mean_instance) ++wins;
        never_worse_than_worst &= o.ensemble <= o.worst_instance;
    }
    return {wins >= kRequiredWins && never_worse_than_worst,
            "ensemble <= mean instance sMAPE in " + std::to_string(wins) + "/" + std::to_string(kCorpusSeeds) +
                " seeds; " + (never_worse_than_worst ? "never above" : "ABOVE") + " the worst instance"};
}

// ---- 9 ----------------------------------------------------------------------

Result variable_horizon() {
    auto corpus = make_corpus(77);
    RunConfig config;
    config.epochs = 30;
    config.n_instances = 1;
    config.holdout_fraction = 0;
    std::vector<TimeSeries> subset(corpus.data.train.begin(), corpus.data.train.begin() + 60);
    auto base = [](const TimeSeries& h, int steps) { return forecast_all(h, steps, h.frequency().seasonal_period()); };
    const auto samples = build_training_samples(subset, config, base);
    auto inst = train_instance(samples, {}, config, 3);
    bool ok = true;
    for (const auto& s : subset) {
        const auto s12 = make_inference_sample(s, 12, base);
        const auto y12 = inst.model.predict(s12.features);
        // The h=8 unroll on the first 8 rows of the h=12 features.
        Matrix first8(8, s12.features.cols());
        std::copy(s12.features.data().begin(), s12.features.data().begin() + 8 * 8, first8.data().begin());
        const auto y8 = inst.model.predict(first8);
        for (double v : y12) ok &= std::isfinite(v);
        for (std::size_t i = 0; i < 8; ++i) ok &= y8[i] == y12[i];
        for (double v : inverse_transform(y12, s12.scale)) ok &= std::isfinite(v);
    }
    return {ok, "RNN trained at h=8 on 60 series: h=12 forecasts finite, first 8 steps bit-identical to the h=8 unroll"};
}

// ---- 10 ---------------------------------------------------------------------

Result all_frequency() {
    ExperimentData data;
    std::mt19937_64 gen(10);
    const auto q = FrequencyClass::of(Frequency::Quarterly);
    const auto m = FrequencyClass::of(Frequency::Monthly);
    for (int i = 0; i < 40; ++i) {
        const auto xq = for2for::testing::seasonal_series(48, 4, 300 + 7 * i, 1.5, 40, 6, gen);
        data.train.emplace_back("Q" + std::to_string(i), q, std::vector<double>(xq.begin(), xq.begin() + 40));
        data.test["Q" + std::to_string(i)] = std::vector<double>(xq.begin() + 40, xq.end());
        const auto xm = for2for::testing::seasonal_series(90, 12, 500 + 9 * i, 1.0, 60, 8, gen);
        data.train.emplace_back("M" + std::to_string(i), m, std::vector<double>(xm.begin(), xm.begin() + 72));
        data.test["M" + std::to_string(i)] = std::vector<double>(xm.begin() + 72, xm.end());
    }
    RunConfig config;
    config.all_frequencies = true;
    config.epochs = 40;
    config.n_instances = 2;
    config.holdout_fraction = 0;
    try {
        const auto result = run_experiment(data, config);
        const auto& per = result.evaluation->report.per_frequency;
        const bool both = per.count(Frequency::Quarterly) && per.count(Frequency::Monthly);
        const bool state9 = std::get<RnnModel>(result.instances[0].model.net).config.state_size == 9;
        const bool finite = std::isfinite(result.evaluation->report.total.smape);
        return {both && state9 && finite,
                "one RNN (state 9) on 40 quarterly + 40 monthly series; quarterly sMAPE " +
                    fmt("%.3f", per.at(Frequency::Quarterly).smape) + ", monthly sMAPE " +
                    fmt("%.3f", per.at(Frequency::Monthly).smape) + "; homogeneity check never fired"};
    } catch (const std::logic_error& e) {
        return {false, std::string("homogeneity assertion fired: ") + e.what()};
    }
}

// ---- 11 ---------------------------------------------------------------------

Result determinism() {
    for2for::testing::TempDir dir;
    auto corpus = make_corpus(11);
    std::vector<TimeSeries> subset(corpus.data.train.begin(), corpus.data.train.begin() + 40);
    write_series_csv(dir / "train.csv", subset);
    std::ofstream(dir / "run.cfg") << "epochs = 20\nn_instances = 2\nholdout_fraction = 0.25\n";
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
        const std::string run = "run" + std::to_string(k);
        std::ostringstream out, err;
        if (cli::run({"train", "--train", (dir / "train.csv").string(), "--freq", "quarterly", "--model", "rnn",
                      "--config", (dir / "run.cfg").string(), "--seed", "42", "--threads", "1", "--out-dir",
                      (dir / run).string()},
                     out, err) != 0)
            return {false, "train failed: " + err.str()};
        if (cli::run({"predict", "--train", (dir / "train.csv").string(), "--models", (dir / run).string(), "--out",
                      (dir / (run + ".csv")).string(), "--threads", "1"},
                     out, err) != 0)
            return {false, "predict failed: " + err.str()};
        std::ifstream in(dir / (run + ".csv"), std::ios::binary);
        outputs[k].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    return {same, "two train+predict runs with seed 42: prediction CSVs " +
                      std::string(same ? "byte-identical" : "DIFFER") + " (" + std::to_string(outputs[0].size()) +
                      " bytes)"};
}

// ---- 12 (optional) ----------------------------------------------------------

/// Expects train.csv, test.csv, external_train.csv (base forecasts of the
/// chopped series) and external_full.csv (complete series) in the directory.
Result real_quarterly(const fs::path& dir) {
    const auto q = FrequencyClass::of(Frequency::Quarterly);
    const auto ds = load_dataset({dir / "train.csv", dir / "test.csv", q, std::nullopt});
    ExperimentData data;
    data.train = ds.train;
    data.test = ds.test;
    if (fs::exists(dir / "external_train.csv")) data.external_train = load_external_forecasts(dir / "external_train.csv", 8);
    if (fs::exists(dir / "external_full.csv")) data.external_full = load_external_forecasts(dir / "external_full.csv", 8);
    RunConfig config;
    config.holdout_fraction = 0;
    const auto result = run_experiment(data, config);
    ForecastTable equal;
    for (const auto& s : data.train) {
        auto it = data.external_full.find(s.id());
        const auto m = forecast_all(s, 8, 4, it == data.external_full.end() ? nullptr : &it->second);
        std::vector<double> avg(8, 0.0);
        for (std::size_t j = 0; j < kNumBaseModels; ++j)
            for (std::size_t i = 0; i < 8; ++i) avg[i] += m.values()(i, j) / static_cast<double>(kNumBaseModels);
        equal[s.id()] = avg;
    }
    const auto eq = evaluate_forecasts(data.train, data.test, equal).report.total;
    const auto& rnn = result.evaluation->report.total;
    return {*rnn.owa < *eq.owa, "RNN ensemble OWA " + fmt("%.4f", *rnn.owa) + " vs equal-weight " + fmt("%.4f", *eq.owa) +
                                    "; sMAPE " + fmt("%.4f", rnn.smape) + " (published reference 9.6610)"};
}

}  // namespace

int main() {
    set_warning_handler({});  // fallback notices are expected on synthetic data
    struct Criterion {
        int id;
        const char* name;
        std::function<Result()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "metric oracles", metric_oracles},
        {2, "gradient correctness", gradient_checks},
        {3, "transform pipeline", transform_pipeline},
        {4, "degenerate end-to-end", degenerate_end_to_end},
        {5, "collapse to linear", collapse_to_linear},
        {6, "single-step reduction and causality", rnn_causality},
        {7, "learning benefit over base combinations", learning_benefit},
        {8, "ensemble benefit", ensemble_benefit},
        {9, "variable horizon", variable_horizon},
        {10, "all-frequency training", all_frequency},
        {11, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s  %s (%.1fs): %s\n", c.id, r.pass ? "PASS" : "FAIL", c.name, secs,
                    r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }

    if (const char* dir = std::getenv("FOR2FOR_M4_QUARTERLY_DIR")) {
        try {
            const auto r = real_quarterly(dir);
            std::printf("criterion 12: %s  real quarterly data (optional, non-gating): %s\n", r.pass ? "PASS" : "FAIL",
                        r.detail.c_str());
        } catch (const std::exception& e) {
            std::printf("criterion 12: FAIL  real quarterly data (optional, non-gating): %s\n", e.what());
        }
    } else {
        std::printf("criterion 12: SKIP  real quarterly data (optional, non-gating): set FOR2FOR_M4_QUARTERLY_DIR\n");
    }
    std::printf("%d of %zu gating criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
