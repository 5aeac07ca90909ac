#include <doctest.h>

#include <cmath>
#include <random>

#include "for2for/baselines.hpp"
#include "for2for/errors.hpp"
#include "for2for/metrics.hpp"
#include "for2for/preprocess.hpp"
#include "test_util.hpp"

using namespace for2for;
using for2for::testing::close;

namespace {

const ScaleRecord kScale200{"s", 200.0, ScaleMode::LastObsLog};

ForecastMatrix native(const TimeSeries& s, int h) { return forecast_all(s, h, s.frequency().seasonal_period()); }

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("clip floor") {
    CHECK(clip_floor(-5) == 10);
    CHECK(clip_floor(10) == 10);
    CHECK(clip_floor(220) == 220);
    CHECK(clip_floor(3) == 10);
    const ClipPolicy literal{10.0, true};
    CHECK(clip_floor(3, literal) == 3);
    CHECK(clip_floor(-5, literal) == 10);
}

TEST_CASE("forward transform values") {
    CHECK(transform(220, kScale200) == doctest::Approx(0.0953102).epsilon(1e-6));
    CHECK(transform(200, kScale200) == 0.0);
    CHECK(transform(-5, kScale200) == doctest::Approx(std::log(0.05)).epsilon(1e-12));
    CHECK(transform(-5, kScale200) == doctest::Approx(-2.9957).epsilon(1e-4));
    const ScaleRecord mase{"s", 4.0, ScaleMode::MaseScale};
    CHECK(transform(-8, mase) == -2.0);
    CHECK_THROWS_AS(transform(std::nan(""), kScale200), DataError);
}

TEST_CASE("inverse transform values and overflow") {
    CHECK(inverse_transform(0.0, kScale200) == 200.0);
    CHECK(inverse_transform(0.0953102, kScale200) == doctest::Approx(220.0).epsilon(1e-6));
    CHECK(inverse_transform(-2.0, ScaleRecord{"s", 4.0, ScaleMode::MaseScale}) == -8.0);
    CHECK_THROWS_AS(inverse_transform(701.0, kScale200), NumericError);
    CHECK_THROWS_AS(inverse_transform(-701.0, kScale200), NumericError);
}

TEST_CASE("round trip and monotonicity") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(10.0, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen);
        const double n = u(gen);
        const ScaleRecord s{"s", n, ScaleMode::LastObsLog};
        CHECK(close(inverse_transform(transform(x, s), s), x, 1e-12));
        const ScaleRecord m{"s", n, ScaleMode::MaseScale};
        CHECK(close(inverse_transform(transform(x, m), m), x, 1e-12));
    }
    double prev = -1e300;
    for (double x = -50; x < 500; x += 0.5) {
        const double y = transform(x, kScale200);
        CHECK(y >= prev);
        if (x > 10) CHECK(y > prev);
        prev = y;
    }
}

TEST_CASE("actuals are not clipped") {
    const ScaleRecord s{"s", 100.0, ScaleMode::LastObsLog};
    const std::vector<double> a{5.0, 110.0};
    const auto y = transform_actuals(a, s);
    CHECK(y[0] == doctest::Approx(std::log(0.05)));
    CHECK(y[1] == doctest::Approx(std::log(1.1)));
    CHECK_THROWS_AS(transform_actuals(std::vector<double>{-1.0}, s), DataError);
}

TEST_CASE("scale records") {
    const auto s = for2for::testing::quarterly("A", {10, 12, 14, 16, 13, 15, 19, 16});
    CHECK(make_scale(s, ScaleMode::LastObsLog).normalizer == 16);
    CHECK(make_scale(s, ScaleMode::MaseScale).normalizer == doctest::Approx(mase_denominator(s.values(), 4)));
}

TEST_CASE("constant series maps to zeros") {
    const auto s = for2for::testing::quarterly("C", std::vector<double>(20, 50.0));
    const auto sample = make_training_sample(s, native);
    REQUIRE(sample);
    for (double v : sample->features.data()) CHECK(std::abs(v) < 1e-9);
    for (double v : *sample->label) CHECK(v == 0.0);
    const auto inf = make_inference_sample(s, 8, native);
    for (double v : inf.features.data()) CHECK(std::abs(v) < 1e-9);
    CHECK_FALSE(inf.label);
}

TEST_CASE("training sample label and features") {
    std::vector<double> x{80, 90, 95, 100, 110, 120, 130, 140, 150, 160, 170, 180};
    const auto s = for2for::testing::quarterly("L", x);
    const auto sample = make_training_sample(s, native);
    REQUIRE(sample);
    CHECK(sample->scale.normalizer == 100.0);
    CHECK((*sample->label)[0] == doctest::Approx(std::log(1.1)).epsilon(1e-12));
    CHECK(sample->horizon() == 8);
    CHECK(sample->features.cols() == 8);
    const auto raw = native(s.head(4), 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(sample->features(i, j) == transform(raw.values()(i, j), sample->scale));
}

TEST_CASE("naive column maps to zero and snaive composes") {
    std::mt19937_64 gen(2);
    const auto s = for2for::testing::quarterly("N", for2for::testing::seasonal_series(40, 4, 300, 1, 30, 3, gen));
    auto with_naive = [](const TimeSeries& h, int steps) {
        const auto m = native(h, steps);
        Matrix v(static_cast<std::size_t>(steps), 9);
        for (std::size_t i = 0; i < v.rows(); ++i) {
            for (std::size_t j = 0; j < 8; ++j) v(i, j) = m.values()(i, j);
            v(i, 8) = forecast_naive(h.values(), steps)[i];
        }
        auto ids = lexicon_ids();
        ids.push_back("naive");
        return ForecastMatrix(h.id(), ids, v);
    };
    const auto inf = make_inference_sample(s, 8, with_naive);
    for (std::size_t i = 0; i < 8; ++i) CHECK(inf.features(i, 8) == 0.0);
    const auto sn = forecast_snaive(s.values(), 8, 4);
    for (std::size_t i = 0; i < 8; ++i) CHECK(inf.features(i, 1) == std::log(sn[i] / s.last()));
}

TEST_CASE("short series are skipped with a warning") {
    for2for::testing::WarningCapture w;
    CHECK_FALSE(make_training_sample(for2for::testing::quarterly("S", std::vector<double>(8, 20.0)), native));
    CHECK_FALSE(make_training_sample(for2for::testing::quarterly("S", std::vector<double>(9, 20.0)), native));
    CHECK(w.messages.size() == 2);
    CHECK(make_training_sample(for2for::testing::quarterly("S", std::vector<double>(10, 20.0)), native));
}

TEST_CASE("stretching windows") {
    std::mt19937_64 gen(3);
    const auto s = for2for::testing::quarterly("W", for2for::testing::seasonal_series(30, 4, 300, 1, 30, 3, gen));
    const auto k0 = stretch_window_samples(s, 0, native);
    REQUIRE(k0.size() == 1);
    const auto single = make_training_sample(s, native);
    CHECK(k0[0].features == single->features);
    CHECK(*k0[0].label == *single->label);
    CHECK(stretch_window_samples(s, 25, native).size() == 21);
    const auto w3 = stretch_window_samples(s, 3, native);
    REQUIRE(w3.size() == 4);
    CHECK(w3[3].scale.normalizer == s.values()[30 - 8 - 3 - 1]);
    CHECK((*w3[3].label)[0] == doctest::Approx(std::log(s.values()[30 - 8 - 3] / w3[3].scale.normalizer)));

    const auto s10 = for2for::testing::quarterly("T", for2for::testing::seasonal_series(10, 4, 300, 1, 30, 3, gen));
    CHECK(stretch_window_samples(s10, 5, native).size() == 1);
}

}
