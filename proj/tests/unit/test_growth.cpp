#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "../support/growth_oracle.hpp"
#include "mktsym/error.hpp"
#include "mktsym/growth.hpp"

using namespace mktsym;
using namespace mktsym::growth;
using Catch::Approx;

TEST_CASE("price path") {
    CHECK(price_path(0.2, 0.0) == 1.0);
    CHECK(price_path(0.0, 50.0) == 1.0);
    CHECK(price_path(0.2, 10.0) == Approx(std::exp(2.0)).epsilon(1e-15));
    CHECK(price_path(-0.2, 10.0) * price_path(0.2, 10.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(FundParams{}.validate());
    FundParams p;
    p.a_demand = 100.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = FundParams{};
    p.lambda = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = FundParams{};
    p.direction = Direction::short_accumulation;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    CHECK(make_params(-0.1, 500.0, 0.05, 0.0, 1.0).direction == Direction::short_accumulation);
    CHECK(make_params(0.1, 500.0, 0.05, 0.0, 1.0).a_demand == 50.0);
}

TEST_CASE("cash equation right-hand side") {
    const auto p = make_params(0.2, 1000.0, 0.1, 0.08, 10.0);
    const double e2 = std::exp(2.0);
    CHECK(cash_rhs(p, 10.0, 5.0) == Approx(-0.2 * e2 + 0.5 + 0.16 * e2).epsilon(1e-14));
    const auto q = make_params(0.2, 1000.0, 0.1, 0.08, 10.0, DividendMode::constant);
    CHECK(cash_rhs(q, 10.0, 5.0) == Approx(-0.2 * e2 + 0.5 + 0.16).epsilon(1e-14));
}

TEST_CASE("without buying cash earns plain interest") {
    const auto p = make_params(0.0, 1000.0, 0.05, 0.08, 3.0);
    const auto path = integrate_cash(p, 10.0, 0.01);
    REQUIRE(path.size() == 1001);
    for (const auto& s : path) {
        CHECK(s.cash == Approx(3.0 * std::exp(0.05 * s.t)).epsilon(1e-10));
        CHECK(s.n == 0.0);
        CHECK(s.price == 1.0);
    }
}

TEST_CASE("integration grid") {
    const FundParams p;
    const auto path = integrate_cash(p, 1.05, 0.1);
    REQUIRE(path.size() == 12);
    CHECK(path.back().t == 1.05);
    CHECK(path[3].t == Approx(0.3));
    CHECK(integrate_cash(p, 0.0, 0.1).size() == 1);
    CHECK_THROWS_AS(integrate_cash(p, 1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(integrate_cash(p, -1.0, 0.1), ParameterError);
}

TEST_CASE("closed form matches integration") {
    const FundParams p;
    CHECK(closed_form_cash(p, 0.0) == Approx(p.c0).margin(1e-12));
    for (const auto& s : integrate_cash(p, 50.0, 1e-3)) {
        const double exact = closed_form_cash(p, s.t);
        CHECK(std::abs(s.cash - exact) <= 1e-8 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("closed form agrees with the independent oracle") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> alpha(-0.5, 0.5), r(0.0, 0.3), d0(0.0, 0.2), c0(0.0, 50.0);
    int checked = 0;
    while (checked < 50) {
        const double a = alpha(rng), rate = r(rng);
        if (std::abs(a - rate) <= 0.01) continue;
        const auto p = make_params(a, 1000.0, rate, d0(rng), c0(rng));
        const oracle::WealthEffectSolution sol(p);
        for (double t : {0.0, 0.5, 3.0, 10.0, 25.0}) {
            const long double v = sol.value(t);
            const long double dv = sol.derivative(t);
            const long double scale = std::max(1.0L, std::abs(v));
            CHECK(std::abs(closed_form_cash(p, t) - v) <= 1e-10 * scale);
            CHECK(std::abs(closed_form_cash_derivative(p, t) - dv) <= 1e-10 * std::max(1.0L, std::abs(dv)));
            // the oracle itself satisfies the ODE
            CHECK(std::abs(dv - oracle::wealth_effect_rhs(p, t, v)) <= 1e-12L * std::max(1.0L, std::abs(dv)));
            // and so does the library solution, to within rounding
            const double residual = closed_form_cash_derivative(p, t) - cash_rhs(p, t, closed_form_cash(p, t));
            CHECK(std::abs(residual) <= 1e-8 * std::max(1.0L, std::abs(dv)));
        }
        ++checked;
    }
}

TEST_CASE("closed form preconditions") {
    auto p = make_params(0.1, 1000.0, 0.1 + 1e-10, 0.08, 10.0);
    CHECK_THROWS_AS(closed_form_cash(p, 1.0), SingularParameterError);
    CHECK_THROWS_AS(closed_form_cash_derivative(p, 1.0), SingularParameterError);
    p = make_params(0.2, 1000.0, 0.1, 0.08, 10.0, DividendMode::constant);
    CHECK_THROWS_AS(closed_form_cash(p, 1.0), ParameterError);
}

TEST_CASE("wealth is shares at market plus cash") {
    const FundParams p;
    for (const auto& s : integrate_cash(p, 20.0, 0.05)) {
        CHECK(s.n == Approx(p.alpha * p.lambda * s.t));
        CHECK(s.wealth == Approx(p.alpha * s.t * s.price + s.cash).epsilon(1e-14));
    }
}

TEST_CASE("constant dividends run out of cash") {
    const auto p = make_params(0.2, 1000.0, 0.1, 0.08, 10.0, DividendMode::constant);
    const auto rep = sustainability(p, 200.0, 0.01);
    CHECK_FALSE(rep.sustainable);
    REQUIRE(rep.failure_time);
    CHECK(*rep.failure_time > 0.0);
    CHECK(sustainability(FundParams{}, 100.0, 0.01).sustainable);
}

TEST_CASE("more initial cash never hurts") {
    bool seen_sustainable = false;
    for (double c0 = 0.0; c0 <= 20.0; c0 += 0.5) {
        const auto p = make_params(0.2, 1000.0, 0.1, 0.08, c0);
        const bool ok = sustainability(p, 100.0, 0.01).sustainable;
        if (seen_sustainable) CHECK(ok);
        seen_sustainable = seen_sustainable || ok;
    }
    CHECK(seen_sustainable);
    CHECK_FALSE(sustainability(make_params(0.2, 1000.0, 0.1, 0.08, 0.5), 100.0, 0.01).sustainable);
}

TEST_CASE("mirroring a fund") {
    const FundParams p;
    const auto s = mirror_short(p);
    CHECK(s.alpha == -p.alpha);
    CHECK(s.a_demand == -p.a_demand);
    CHECK(s.direction == Direction::short_accumulation);
    CHECK_NOTHROW(s.validate());
    const auto back = mirror_short(s);
    CHECK(back.alpha == p.alpha);
    CHECK(back.a_demand == p.a_demand);
    CHECK(back.direction == p.direction);
    CHECK(price_path(s.alpha, 7.0) == Approx(1.0 / price_path(p.alpha, 7.0)).epsilon(1e-15));
    CHECK(to_string(s.direction) == "short_accumulation");
}
