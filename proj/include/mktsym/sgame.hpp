#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mktsym/random.hpp"
#include "mktsym/timeseries.hpp"

namespace mktsym::sgame {

/// Population and market parameters of one $-game.
struct GameConfig {
    std::size_t N = 25;      // agents
    std::size_t s = 2;       // technical strategies per agent
    std::size_t m = 2;       // memory: number of past price moves seen
    double lambda = 2500.0;  // liquidity: excess demand per unit log return
    double rho = 1.0;        // fraction of agents allowed to go short
    double v_f = 100.0;      // fundamental value, also the initial price
    std::size_t steps = 400;
    std::uint64_t seed = 1;
    double gamma = 0.0;      // abstain when best - worst strategy score < gamma
    std::size_t runs = 100;  // ensemble size

    // Throws ParameterError naming the offending field.
    void validate() const;
};

// Market temperature 2^(m+1) / (N s).
double temperature(std::size_t m, std::size_t N, std::size_t s);

enum class StrategyKind : std::uint8_t { technical, fundamental };

struct Strategy {
    StrategyKind kind = StrategyKind::technical;
    // For technical strategies: one action in {-1, +1} per history word,
    // 2^m entries; empty for the fundamental strategy.
    std::vector<std::int8_t> table;

    // Fundamental: +1 below v_f, -1 at or above it.
    int action(std::uint32_t history, double price, double v_f) const;

    static Strategy technical(std::vector<std::int8_t> table);
    static Strategy fundamental();
};

struct Agent {
    // s technical strategies followed by the fundamental one.
    std::vector<Strategy> strategies;
    std::vector<double> scores;
    // Every strategy's recommendation at the previous step; the $-game payoff
    // credits these with the next log return.
    std::vector<std::int8_t> previous_actions;
    bool has_previous = false;
    std::int64_t position = 0;
    bool allowed_short = false;
    double risk_aversion = 0.0;
};

struct Usage {
    std::size_t technical = 0;
    std::size_t fundamental = 0;
    std::size_t abstained = 0;

    friend bool operator==(const Usage&, const Usage&) = default;
};

struct GameState {
    // Last m moves, most recent in bit 0 (1 = up).
    std::uint32_t history = 0;
    // ln(P / v_f); the price starts at exactly v_f.
    double log_price = 0.0;
    double v_f = 1.0;
    std::size_t t = 0;
    std::vector<Agent> agents;
    Engine rng;
    // Outcome of the latest step.
    std::int64_t last_excess_demand = 0;
    Usage last_usage;

    double price() const;
};

// Seeded initial population. Random draws, in order: every technical table
// entry (agents, then strategies, then history words, each a coin flip); the
// m initial history bits; a Fisher-Yates shuffle of agent indices whose first
// floor(rho N) entries become short-enabled. Scores start at 0, positions at
// 0, and the price at v_f.
GameState initial_state(const GameConfig& config, std::uint64_t seed);

// One trading round:
//  1. every agent evaluates all its strategies on the current history/price;
//  2. it abstains if best - worst score < gamma, otherwise plays its best
//     strategy (ties drawn uniformly from the run's stream, agents in index
//     order); a long-only agent told to sell with no shares abstains;
//  3. A(t) = sum of actions; ln P(t+1) = ln P(t) + A(t) / lambda;
//  4. every strategy's score += its action at t-1 * (ln P(t+1) - ln P(t));
//  5. history shifts in 1 if A > 0, 0 if A < 0, a coin flip if A == 0;
//  6. positions move by the played actions.
GameState step(GameState state, const GameConfig& config);

struct Diagnostics {
    std::size_t agent_count = 0;
    std::vector<std::int64_t> excess_demand;  // A(t) per step
    std::vector<Usage> usage;
    // Smallest position among long-only agents after each step (0 if none).
    std::vector<std::int64_t> min_long_only_position;
};

struct GameRun {
    PriceSeries prices;  // steps + 1 points, index = step
    Diagnostics diagnostics;
};

// A single game seeded with config.seed.
GameRun run_game(const GameConfig& config);
GameRun run_game(const GameConfig& config, std::uint64_t seed);

// A(t) / N for every step, in [-1, 1].
std::vector<double> order_imbalance(const Diagnostics& diagnostics);

// Mean |A(t) / N| over the second half of the run.
double mean_abs_order(const Diagnostics& diagnostics);

// Ensemble member r runs with derive_seed(config.seed, r); members are
// simulated in parallel and reduced in index order.
struct SpeculativeEstimate {
    double probability = 0.0;  // fraction of runs ending above 2 v_f
    double standard_error = 0.0;  // binomial
    double mean_order = 0.0;   // ensemble mean of mean_abs_order
    std::size_t runs = 0;
};

SpeculativeEstimate speculative_probability(const GameConfig& config);

struct SweepPoint {
    std::size_t N;
    std::size_t s;
};

struct SweepRow {
    double T;
    std::size_t N;
    std::size_t s;
    SpeculativeEstimate estimate;
};

// One estimate per (N, s), sorted by temperature (stable). Liquidity scales
// with the population, lambda_point = base.lambda * N / base.N, so the
// price impact of a unit fraction of net demand is the same at every point.
std::vector<SweepRow> temperature_sweep(const GameConfig& base, std::span<const SweepPoint> points);

struct QuantilePaths {
    PriceSeries q05;
    PriceSeries q50;
    PriceSeries q95;
    PriceSeries sample;  // ensemble member 0
    // Over every step of every run (0 when no agent is long-only).
    std::int64_t min_long_only_position = 0;
};

// Per-step 5/50/95% quantiles over config.runs games (runs >= 20).
QuantilePaths quantile_ensemble(const GameConfig& config);

struct DecouplingSeries {
    std::vector<std::int64_t> index;   // time step in the external series
    std::vector<double> technical_share;
};

// Agents watch an imposed price path and only keep score; their actions do
// not move the price. The value at t is the share of agents whose best
// strategy is technical; an agent tied between kinds counts fractionally.
// The first m moves of `external` seed the history. Throws LengthError if
// external has fewer than m + 2 points.
DecouplingSeries run_slaved(const PriceSeries& external, const GameConfig& config);

}  // namespace mktsym::sgame
