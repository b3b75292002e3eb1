#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "mktsym/error.hpp"
#include "mktsym/random.hpp"
#include "mktsym/timeseries.hpp"

using namespace mktsym;
using Catch::Approx;

namespace {

PriceSeries random_walk(std::size_t n, std::uint64_t seed) {
    Engine rng(seed);
    std::vector<double> v(n);
    double lp = std::log(100.0);
    for (auto& x : v) {
        x = std::exp(lp);
        lp += 0.02 * standard_normal(rng);
    }
    return PriceSeries::from_values(std::move(v));
}

std::filesystem::path tmp_dir() {
    std::filesystem::path dir = MKTSYM_TEST_TMP_DIR;
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("PriceSeries rejects invalid input") {
    CHECK_THROWS_AS(PriceSeries::from_values({}), LengthError);
    CHECK_THROWS_AS(PriceSeries::from_values({1.0, 0.0}), ParameterError);
    CHECK_THROWS_AS(PriceSeries::from_values({1.0, -2.0}), ParameterError);
    CHECK_THROWS_AS(PriceSeries::from_values({1.0, NAN}), ParameterError);
    CHECK_THROWS_AS(PriceSeries({0, 0}, {1.0, 2.0}), ParameterError);
    CHECK_THROWS_AS(PriceSeries({0, 1}, {1.0}), LengthError);
    CHECK_THROWS_AS(PriceSeries({0, 1}, {1.0, 2.0}, {"a"}), LengthError);
}

TEST_CASE("label falls back to the index") {
    const PriceSeries p({3, 7}, {1.0, 2.0});
    CHECK(p.label(1) == "7");
    const PriceSeries q({0, 1}, {1.0, 2.0}, {"2020-01-02", "2020-01-03"});
    CHECK(q.label(0) == "2020-01-02");
}

TEST_CASE("slice keeps index and labels") {
    const PriceSeries p({0, 1, 2, 3}, {1, 2, 3, 4}, {"a", "b", "c", "d"});
    const auto s = p.slice(1, 2);
    CHECK(s.values() == std::vector<double>{2, 3});
    CHECK(s.index() == std::vector<std::int64_t>{1, 2});
    CHECK(s.labels() == std::vector<std::string>{"b", "c"});
}

TEST_CASE("log_returns on hand cases") {
    const auto flat = log_returns(PriceSeries::from_values({100, 100, 100}));
    CHECK(flat.values() == std::vector<double>{0.0, 0.0});
    const auto e = log_returns(PriceSeries::from_values({1.0, std::exp(1.0), std::exp(2.0)}));
    CHECK(e[0] == Approx(1.0).epsilon(1e-15));
    CHECK(e[1] == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(log_returns(PriceSeries::from_values({1.0})), LengthError);
}

TEST_CASE("log_returns matches a scalar loop and telescopes") {
    const auto p = random_walk(1000, 17);
    const auto r = log_returns(p);
    REQUIRE(r.size() == p.size() - 1);
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < p.size(); ++t) {
        CHECK(r[t] == std::log(p[t + 1] / p[t]));
        CHECK(r.index()[t] == p.index()[t]);
        total += r[t];
    }
    const double expect = std::log(p.back() / p.front());
    CHECK(std::abs(total - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
}

TEST_CASE("moving_average hand cases") {
    const auto p = PriceSeries::from_values({1, 2, 3, 4});
    const auto ma = moving_average(p, 2);
    REQUIRE(ma.size() == 3);
    CHECK(ma[0] == 1.5);
    CHECK(ma[1] == 2.5);
    CHECK(ma[2] == 3.5);
    CHECK(ma.index() == std::vector<std::int64_t>{1, 2, 3});
    CHECK(moving_average(p, 1) == p);
    CHECK_THROWS_AS(moving_average(p, 0), ParameterError);
    CHECK_THROWS_AS(moving_average(p, 5), LengthError);
    CHECK(moving_average(p, 4).size() == 1);
}

TEST_CASE("moving_average of a constant series is that constant") {
    const auto p = PriceSeries::from_values(std::vector<double>(50, 0.1 + 0.2));
    for (std::size_t m : {1u, 3u, 7u, 50u}) {
        const auto ma = moving_average(p, m);
        for (double v : ma.values()) CHECK(v == 0.1 + 0.2);
    }
}

TEST_CASE("moving_average stays within the series range and matches a direct mean") {
    const auto p = random_walk(500, 99);
    const auto [lo, hi] = std::minmax_element(p.values().begin(), p.values().end());
    for (std::size_t m : {2u, 5u, 10u, 15u, 100u}) {
        const auto ma = moving_average(p, m);
        REQUIRE(ma.size() == p.size() - m + 1);
        for (std::size_t k = 0; k < ma.size(); ++k) {
            CHECK(ma[k] >= *lo);
            CHECK(ma[k] <= *hi);
            double direct = 0.0;
            for (std::size_t j = k; j < k + m; ++j) direct += p[j];
            CHECK(ma[k] == Approx(direct / static_cast<double>(m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("read_csv parses by column name") {
    std::istringstream in("close,volume,date\n10.5,3,2020-01-01\n\n11,4,2020-01-02\r\n12.25,5,2020-01-03\n");
    const auto p = read_csv(in);
    REQUIRE(p.size() == 3);
    CHECK(p.values() == std::vector<double>{10.5, 11, 12.25});
    CHECK(p.labels() == std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03"});
    CHECK(p.index() == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("read_csv reports the offending row") {
    SECTION("zero price is a validation error") {
        std::istringstream in("date,close\na,1\nb,0\n");
        try {
            read_csv(in);
            FAIL("no exception");
        } catch (const ValidationError& e) {
            CHECK(e.row() == 3);
        }
    }
    SECTION("unparsable price is a parse error") {
        std::istringstream in("date,close\na,1\nb,1\nc,abc\n");
        try {
            read_csv(in);
            FAIL("no exception");
        } catch (const ParseError& e) {
            CHECK(e.row() == 4);
        }
    }
    SECTION("wrong field count is a parse error") {
        std::istringstream in("date,close\na,1,2\n");
        CHECK_THROWS_AS(read_csv(in), ParseError);
    }
    SECTION("missing column") {
        std::istringstream in("day,price\na,1\n");
        CHECK_THROWS_AS(read_csv(in), ParseError);
    }
    SECTION("custom column names") {
        std::istringstream in("day,price\na,1\n");
        CHECK(read_csv(in, CsvColumns{"day", "price"}).size() == 1);
    }
}

TEST_CASE("save_csv and load_csv round-trip bit-identically") {
    const auto walk = random_walk(252, 5);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < walk.size(); ++i) labels.push_back("d" + std::to_string(i));
    const PriceSeries p(walk.index(), walk.values(), labels);
    const auto path = tmp_dir() / "roundtrip.csv";
    save_csv(path, p);
    CHECK(load_csv(path) == p);
}

TEST_CASE("load_csv on a missing file throws") {
    CHECK_THROWS(load_csv(tmp_dir() / "does-not-exist.csv"));
}
