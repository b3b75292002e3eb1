#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mktsym/error.hpp"
#include "mktsym/sgame.hpp"
#include "mktsym/timeseries.hpp"

using namespace mktsym;
using namespace mktsym::sgame;
using Catch::Approx;

namespace {

GameConfig small_config() {
    GameConfig c;
    c.N = 11;
    c.s = 2;
    c.m = 2;
    c.lambda = 1100.0;
    c.steps = 200;
    c.seed = 1;
    c.runs = 20;
    return c;
}

// One agent, m = 1, technical table {+1 after a down move, -1 after an up
// move}, plus the fundamental strategy; the technical one starts ahead.
GameState one_agent_state(bool allowed_short) {
    GameState st;
    st.history = 0;
    st.v_f = 100.0;
    st.rng.seed(3);
    Agent a;
    a.strategies = {Strategy::technical({1, -1}), Strategy::fundamental()};
    a.scores = {0.1, 0.0};
    a.previous_actions = {0, 0};
    a.allowed_short = allowed_short;
    st.agents = {a};
    return st;
}

}  // namespace

TEST_CASE("temperature") {
    CHECK(temperature(2, 5, 2) == 0.8);
    CHECK(temperature(3, 16, 1) == 1.0);
    CHECK(temperature(2, 10, 4) == temperature(2, 20, 2));
    CHECK(temperature(4, 14, 6) == temperature(4, 7, 3) / 4.0);
    CHECK_THROWS_AS(temperature(2, 0, 1), ParameterError);
}

TEST_CASE("GameConfig validation names the field") {
    GameConfig c;
    c.m = 0;
    CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("m must"));
    c = GameConfig{};
    c.rho = 1.5;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = GameConfig{};
    c.lambda = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = GameConfig{};
    c.N = 0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("strategies") {
    const auto f = Strategy::fundamental();
    CHECK(f.action(0, 99.0, 100.0) == 1);
    CHECK(f.action(0, 101.0, 100.0) == -1);
    CHECK(f.action(0, 100.0, 100.0) == -1);
    const auto t = Strategy::technical({1, -1, -1, 1});
    CHECK(t.action(0, 1.0, 1.0) == 1);
    CHECK(t.action(3, 1.0, 1.0) == 1);
    CHECK(t.action(2, 1.0, 1.0) == -1);
    CHECK_THROWS_AS(Strategy::technical({1, 0}), ParameterError);
    CHECK_THROWS_AS(Strategy::technical({1, -1, 1}), ParameterError);
}

TEST_CASE("single agent buying multiplies the price by e") {
    GameConfig c;
    c.N = 1;
    c.s = 1;
    c.m = 1;
    c.lambda = 1.0;
    GameState st = one_agent_state(true);
    st = step(std::move(st), c);
    CHECK(st.last_excess_demand == 1);
    CHECK(st.price() == Approx(100.0 * std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("hand-traced three steps") {
    GameConfig c;
    c.N = 1;
    c.s = 1;
    c.m = 1;
    c.lambda = 2.0;
    c.v_f = 100.0;
    GameState st = one_agent_state(true);

    // t=0: history 0 -> technical +1, fundamental -1 (price == v_f); plays +1
    st = step(std::move(st), c);
    CHECK(st.last_excess_demand == 1);
    CHECK(st.log_price == 0.5);
    CHECK(st.agents[0].scores == std::vector<double>{0.1, 0.0});
    CHECK(st.history == 1u);
    CHECK(st.agents[0].position == 1);

    // t=1: both say -1; return -0.5 credits last step's (+1, -1)
    st = step(std::move(st), c);
    CHECK(st.last_excess_demand == -1);
    CHECK(st.log_price == 0.0);
    CHECK(st.agents[0].scores[0] == Approx(0.1 - 0.5));
    CHECK(st.agents[0].scores[1] == Approx(0.5));
    CHECK(st.history == 0u);
    CHECK(st.agents[0].position == 0);

    // t=2: fundamental leads and sells short (technical would buy)
    st = step(std::move(st), c);
    CHECK(st.last_excess_demand == -1);
    CHECK(st.last_usage.fundamental == 1);
    CHECK(st.agents[0].scores[0] == Approx(0.1));
    CHECK(st.agents[0].scores[1] == Approx(1.0));
    CHECK(st.agents[0].position == -1);
    CHECK(st.price() == Approx(100.0 * std::exp(-0.5)));
}

TEST_CASE("long-only agent with no shares abstains instead of selling") {
    GameConfig c;
    c.N = 1;
    c.s = 1;
    c.m = 1;
    c.lambda = 2.0;
    GameState st = one_agent_state(false);
    st = step(std::move(st), c);
    st = step(std::move(st), c);
    REQUIRE(st.agents[0].position == 0);
    const double before = st.log_price;
    st = step(std::move(st), c);
    CHECK(st.last_excess_demand == 0);
    CHECK(st.last_usage.abstained == 1);
    CHECK(st.log_price == before);
    CHECK(st.agents[0].position == 0);
}

TEST_CASE("risk aversion abstains on undiscriminating scores") {
    GameConfig c;
    c.N = 1;
    c.s = 1;
    c.m = 1;
    c.gamma = 0.2;
    GameState st = one_agent_state(true);
    st.agents[0].risk_aversion = 0.2;
    st = step(std::move(st), c);
    CHECK(st.last_usage.abstained == 1);
    CHECK(st.last_excess_demand == 0);
}

TEST_CASE("initial_state follows the config") {
    auto c = small_config();
    c.rho = 0.4;
    const auto st = initial_state(c, 9);
    REQUIRE(st.agents.size() == 11);
    std::size_t shorts = 0;
    for (const auto& a : st.agents) {
        REQUIRE(a.strategies.size() == 3);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(a.strategies[k].kind == StrategyKind::technical);
            CHECK(a.strategies[k].table.size() == 4);
        }
        CHECK(a.strategies[2].kind == StrategyKind::fundamental);
        CHECK(a.position == 0);
        shorts += a.allowed_short ? 1 : 0;
    }
    CHECK(shorts == 4);
    CHECK(st.price() == c.v_f);
    CHECK(st.history < 4u);
}

TEST_CASE("positions change by the excess demand and histories stay in range") {
    auto c = small_config();
    c.rho = 0.5;
    GameState st = initial_state(c, 5);
    for (int t = 0; t < 300; ++t) {
        std::int64_t before = 0;
        for (const auto& a : st.agents) before += a.position;
        st = step(std::move(st), c);
        std::int64_t after = 0;
        for (const auto& a : st.agents) after += a.position;
        CHECK(after - before == st.last_excess_demand);
        CHECK(st.history < 4u);
        CHECK(st.price() > 0.0);
        const auto& u = st.last_usage;
        CHECK(u.technical + u.fundamental + u.abstained == c.N);
    }
}

TEST_CASE("run_game is deterministic and sized") {
    const auto c = small_config();
    const auto a = run_game(c);
    const auto b = run_game(c);
    CHECK(a.prices == b.prices);
    CHECK(a.diagnostics.excess_demand == b.diagnostics.excess_demand);
    CHECK(a.diagnostics.usage == b.diagnostics.usage);
    CHECK(a.prices.size() == c.steps + 1);
    CHECK(a.prices[0] == c.v_f);
    CHECK_FALSE(run_game(c, 2).prices == a.prices);

    auto zero = c;
    zero.steps = 0;
    const auto z = run_game(zero);
    CHECK(z.prices.size() == 1);
    CHECK(z.prices[0] == c.v_f);
}

TEST_CASE("run_game matches the committed golden path") {
    const auto golden = load_csv(std::string(MKTSYM_TEST_DATA_DIR) + "/sgame_golden.csv");
    auto c = small_config();
    c.lambda = 1100.0;
    c.rho = 1.0;
    const auto run = run_game(c);
    REQUIRE(run.prices.size() == golden.size());
    for (std::size_t t = 0; t < golden.size(); ++t) CHECK(run.prices[t] == golden[t]);
}

TEST_CASE("order_imbalance recount") {
    const auto run = run_game(small_config());
    const auto o = order_imbalance(run.diagnostics);
    REQUIRE(o.size() == run.diagnostics.excess_demand.size());
    for (std::size_t t = 0; t < o.size(); ++t) {
        CHECK(o[t] >= -1.0);
        CHECK(o[t] <= 1.0);
        // the price moved by exactly A / lambda
        const double dlog = std::log(run.prices[t + 1] / run.prices[t]);
        CHECK(dlog == Approx(o[t] * 11.0 / 1100.0).margin(1e-12));
    }
    Diagnostics d;
    d.agent_count = 4;
    d.excess_demand = {4, 0, -2};
    CHECK(order_imbalance(d) == std::vector<double>{1.0, 0.0, -0.5});
}

TEST_CASE("long-only populations never go short") {
    auto c = small_config();
    c.rho = 0.0;
    c.runs = 20;
    const auto q = quantile_ensemble(c);
    CHECK(q.min_long_only_position >= 0);
    for (std::size_t t = 0; t < q.q50.size(); ++t) {
        CHECK(q.q05[t] <= q.q50[t]);
        CHECK(q.q50[t] <= q.q95[t]);
        // net long holdings mean the price never falls below its start
        CHECK(q.q05[t] >= c.v_f * (1.0 - 1e-12));
    }
}

TEST_CASE("quantile_ensemble needs 20 runs") {
    auto c = small_config();
    c.runs = 19;
    CHECK_THROWS_AS(quantile_ensemble(c), ParameterError);
}

TEST_CASE("ensembles are reproducible") {
    auto c = small_config();
    c.runs = 30;
    const auto a = speculative_probability(c);
    const auto b = speculative_probability(c);
    CHECK(a.probability == b.probability);
    CHECK(a.mean_order == b.mean_order);
    const auto qa = quantile_ensemble(c);
    const auto qb = quantile_ensemble(c);
    CHECK(qa.q05 == qb.q05);
    CHECK(qa.q95 == qb.q95);
}

TEST_CASE("frozen price is never speculative") {
    auto c = small_config();
    c.lambda = std::numeric_limits<double>::infinity();
    const auto est = speculative_probability(c);
    CHECK(est.probability == 0.0);
    CHECK(est.standard_error == 0.0);
}

TEST_CASE("temperature_sweep rows") {
    auto c = small_config();
    c.runs = 10;
    c.steps = 50;
    const std::vector<SweepPoint> one{{5, 1}};
    const auto single = temperature_sweep(c, one);
    REQUIRE(single.size() == 1);
    CHECK(single[0].T == temperature(2, 5, 1));

    const std::vector<SweepPoint> pts{{5, 1}, {20, 2}, {10, 2}};
    const auto rows = temperature_sweep(c, pts);
    REQUIRE(rows.size() == 3);
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.T < b.T; }));
    CHECK(rows[0].N == 20);
    for (const auto& r : rows) {
        CHECK(r.estimate.probability >= 0.0);
        CHECK(r.estimate.probability <= 1.0);
        CHECK(r.estimate.runs == 10);
    }
}

TEST_CASE("slaved agents on a flat price keep their initial split") {
    auto c = small_config();
    const auto flat = PriceSeries::from_values(std::vector<double>(60, c.v_f));
    const auto d = run_slaved(flat, c);
    REQUIRE(d.index.size() == 60 - c.m);
    CHECK(d.index.front() == static_cast<std::int64_t>(c.m));
    for (double share : d.technical_share) CHECK(share == Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("slaved agents follow a strong trend") {
    auto c = small_config();
    std::vector<double> up;
    double p = c.v_f;
    for (int t = 0; t < 100; ++t) {
        up.push_back(p);
        p *= 1.01;
    }
    const auto trend = PriceSeries::from_values(up);
    double first = 0.0, last = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        c.seed = seed;
        const auto d = run_slaved(trend, c);
        first += d.technical_share.front();
        last += d.technical_share.back();
    }
    first /= 100.0;
    last /= 100.0;
    CHECK(last > first);
    CHECK(last > 0.85);
}

TEST_CASE("run_slaved is deterministic and checks length") {
    auto c = small_config();
    const auto p = PriceSeries::from_values({100, 101, 99, 102, 103, 101, 100});
    CHECK(run_slaved(p, c).technical_share == run_slaved(p, c).technical_share);
    CHECK_THROWS_AS(run_slaved(PriceSeries::from_values({100, 101, 99}), c), LengthError);
}
