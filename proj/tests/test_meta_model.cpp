#include <doctest.h>

#include <sstream>

#include "for2for/errors.hpp"
#include "for2for/meta_model.hpp"

using namespace for2for;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    ng::Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    return m;
}

MetaModel cnn_model() {
    MetaModel m;
    m.net = cnn_init({8, 8, 2, 4, ResidualHead::LinearMx1}, 3);
    m.frequencies = {FrequencyClass::of(Frequency::Quarterly)};
    m.mode = ScaleMode::MaseScale;
    m.clip = ClipPolicy{5.0, true};
    return m;
}

MetaModel rnn_model() {
    MetaModel m;
    m.net = rnn_init({8, 3, ReadoutSource::Cell}, 4);
    m.frequencies = {FrequencyClass::of(Frequency::Yearly), FrequencyClass::of(Frequency::Monthly).with_seasonal_period(6)};
    return m;
}

std::string saved(MetaModel& m) {
    std::ostringstream out;
    save_model(out, m);
    return out.str();
}

}  // namespace

TEST_SUITE("meta_model") {

TEST_CASE("cnn round trip is bit exact") {
    auto m = cnn_model();
    const std::string text = saved(m);
    CHECK(text.rfind("# for2for meta-model v1\n", 0) == 0);
    std::istringstream in(text);
    auto back = load_model(in);
    CHECK(back.kind() == ModelKind::Cnn);
    CHECK(back.mode == ScaleMode::MaseScale);
    CHECK(back.clip.floor == 5.0);
    CHECK(back.clip.negatives_only);
    CHECK(back.frequencies == m.frequencies);
    const auto x = random_matrix(8, 8, 1);
    CHECK(back.predict(x) == m.predict(x));
    CHECK(saved(back) == text);
}

TEST_CASE("rnn round trip keeps frequencies and readout") {
    auto m = rnn_model();
    const std::string text = saved(m);
    std::istringstream in(text);
    auto back = load_model(in);
    CHECK(back.kind() == ModelKind::Rnn);
    CHECK(std::get<RnnModel>(back.net).config.readout == ReadoutSource::Cell);
    REQUIRE(back.frequencies.size() == 2);
    CHECK(back.frequencies[1].seasonal_period() == 6);
    const auto x = random_matrix(13, 8, 2);
    CHECK(back.predict(x) == m.predict(x));
}

TEST_CASE("malformed files are data errors") {
    std::istringstream empty("");
    CHECK_THROWS_AS(load_model(empty), DataError);
    std::istringstream magic("hello\n{}\n");
    CHECK_THROWS_AS(load_model(magic), DataError);
    std::istringstream header("# for2for meta-model v1\n{\"kind\":\"rnn\"}\n");
    CHECK_THROWS_AS(load_model(header), DataError);

    auto m = rnn_model();
    std::string text = saved(m);
    const auto pos = text.find("readout_bias");
    std::istringstream missing(text.substr(0, pos));
    CHECK_THROWS_AS(load_model(missing), DataError);

    std::string reshaped = text;
    reshaped.replace(reshaped.find("readout_bias,1"), 14, "readout_bias,2");
    std::istringstream wrong(reshaped);
    CHECK_THROWS_AS(load_model(wrong), DataError);

    CHECK_THROWS_AS(load_model(std::filesystem::path("/nonexistent/model_0.txt")), DataError);
}

}
