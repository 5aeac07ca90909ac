#include <doctest.h>

#include <cmath>
#include <limits>

#include "for2for/core.hpp"
#include "for2for/errors.hpp"

using namespace for2for;

TEST_SUITE("core") {

TEST_CASE("frequency table is closed and exact") {
    const std::pair<Frequency, std::pair<int, int>> expected[] = {
        {Frequency::Yearly, {6, 1}},  {Frequency::Quarterly, {8, 4}}, {Frequency::Monthly, {18, 12}},
        {Frequency::Weekly, {13, 1}}, {Frequency::Daily, {14, 1}},    {Frequency::Hourly, {48, 24}},
    };
    for (const auto& [f, hp] : expected) {
        const auto c = FrequencyClass::of(f);
        CHECK(c.horizon() == hp.first);
        CHECK(c.seasonal_period() == hp.second);
        CHECK(FrequencyClass::parse(c.label()) == c);
    }
    CHECK(FrequencyClass::parse("q") == FrequencyClass::of(Frequency::Quarterly));
    CHECK(FrequencyClass::parse("MONTHLY") == FrequencyClass::of(Frequency::Monthly));
    CHECK_THROWS_AS(FrequencyClass::parse("fortnightly"), UsageError);
}

TEST_CASE("seasonal period override keeps horizon") {
    const auto c = FrequencyClass::of(Frequency::Weekly).with_seasonal_period(52);
    CHECK(c.horizon() == 13);
    CHECK(c.seasonal_period() == 52);
    CHECK_THROWS(FrequencyClass::of(Frequency::Weekly).with_seasonal_period(0));
}

TEST_CASE("time series invariants") {
    const auto q = FrequencyClass::of(Frequency::Quarterly);
    TimeSeries s("Q1", q, {100, 110, 120});
    CHECK(s.size() == 3);
    CHECK(s.last() == 120);
    CHECK(s.head(2).values() == std::vector<double>{100, 110});
    CHECK(s.head(2).id() == "Q1");
    CHECK_THROWS_AS(TimeSeries("e", q, {}), DataError);
    CHECK_THROWS_AS(TimeSeries("one", q, {5}), DataError);
    CHECK_THROWS_AS(TimeSeries("nan", q, {1, std::nan("")}), DataError);
    CHECK_THROWS_AS(TimeSeries("inf", q, {1, std::numeric_limits<double>::infinity()}), DataError);
}

TEST_CASE("forecast matrix column lookup is total over its ids") {
    Matrix m(2, 3);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = 10.0 * static_cast<double>(r) + static_cast<double>(c);
    ForecastMatrix f("Q1", {"a", "b", "c"}, m);
    CHECK(f.horizon() == 2);
    CHECK(f.column_index("b") == 1);
    CHECK(f.column("c") == std::vector<double>{2, 12});
    CHECK_THROWS_AS(f.column_index("zzz"), DataError);
}

TEST_CASE("forecast matrix validation") {
    CHECK_THROWS_AS(ForecastMatrix("x", {"a", "a"}, Matrix(1, 2)), DataError);
    CHECK_THROWS_AS(ForecastMatrix("x", {"a"}, Matrix(1, 2)), DataError);
    CHECK_THROWS_AS(ForecastMatrix("x", {}, Matrix(0, 0)), DataError);
    Matrix bad(1, 1, std::nan(""));
    CHECK_THROWS_AS(ForecastMatrix("x", {"a"}, bad), DataError);
}

TEST_CASE("scale record validation and mode names") {
    CHECK_NOTHROW(ScaleRecord{"a", 200.0, ScaleMode::LastObsLog}.validate());
    CHECK_THROWS_AS((ScaleRecord{"a", 0.0, ScaleMode::LastObsLog}.validate()), DataError);
    CHECK_THROWS_AS((ScaleRecord{"a", -1.0, ScaleMode::MaseScale}.validate()), DataError);
    CHECK_THROWS_AS((ScaleRecord{"a", std::nan(""), ScaleMode::MaseScale}.validate()), DataError);
    CHECK(parse_scale_mode(to_string(ScaleMode::MaseScale)) == ScaleMode::MaseScale);
    CHECK(parse_scale_mode("last_obs_log") == ScaleMode::LastObsLog);
}

TEST_CASE("error kinds map to exit codes") {
    CHECK(UsageError("u").exit_code() == 1);
    CHECK(DataError("d").exit_code() == 2);
    CHECK(NumericError("n").exit_code() == 3);
    CHECK(std::string(DataError("d").code()) == "data");
}

}
