#include "mktsym/sgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "mktsym/error.hpp"
#include "mktsym/stats.hpp"

namespace mktsym::sgame {

namespace {
constexpr std::size_t kMaxMemory = 24;
}

void GameConfig::validate() const {
    if (N < 1) throw ParameterError("N must be at least 1");
    if (s < 1) throw ParameterError("s must be at least 1");
    if (m < 1) throw ParameterError("m must be at least 1");
    if (m > kMaxMemory) throw ParameterError("m must be at most " + std::to_string(kMaxMemory));
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0, 1]");
    if (!(v_f > 0.0) || !std::isfinite(v_f)) throw ParameterError("v_f must be positive and finite");
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be non-negative");
    if (runs < 1) throw ParameterError("runs must be at least 1");
}

double temperature(std::size_t m, std::size_t N, std::size_t s) {
    if (N * s == 0) throw ParameterError("temperature needs N * s > 0");
    return std::ldexp(1.0, static_cast<int>(m) + 1) / static_cast<double>(N * s);
}

int Strategy::action(std::uint32_t history, double price, double v_f) const {
    if (kind == StrategyKind::fundamental) return price < v_f ? 1 : -1;
    return table[history];
}

Strategy Strategy::technical(std::vector<std::int8_t> table) {
    if (table.empty() || (table.size() & (table.size() - 1)) != 0)
        throw ParameterError("technical strategy table size must be a power of two");
    for (auto a : table)
        if (a != 1 && a != -1) throw ParameterError("technical strategy actions must be -1 or +1");
    return Strategy{StrategyKind::technical, std::move(table)};
}

Strategy Strategy::fundamental() { return Strategy{StrategyKind::fundamental, {}}; }

double GameState::price() const { return v_f * std::exp(log_price); }

GameState initial_state(const GameConfig& config, std::uint64_t seed) {
    config.validate();
    GameState state;
    state.rng.seed(seed);
    state.log_price = 0.0;
    state.v_f = config.v_f;
    const std::size_t words = std::size_t{1} << config.m;

    state.agents.resize(config.N);
    for (Agent& agent : state.agents) {
        agent.strategies.reserve(config.s + 1);
        for (std::size_t k = 0; k < config.s; ++k) {
            std::vector<std::int8_t> table(words);
            for (auto& a : table) a = coin_flip(state.rng) ? 1 : -1;
            agent.strategies.push_back(Strategy{StrategyKind::technical, std::move(table)});
        }
        agent.strategies.push_back(Strategy::fundamental());
        agent.scores.assign(config.s + 1, 0.0);
        agent.previous_actions.assign(config.s + 1, 0);
        agent.risk_aversion = config.gamma;
    }
    for (std::size_t b = 0; b < config.m; ++b)
        state.history = (state.history << 1) | (coin_flip(state.rng) ? 1u : 0u);

    std::vector<std::size_t> order(config.N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(state.rng, i)]);
    const auto shorts = static_cast<std::size_t>(std::floor(config.rho * static_cast<double>(config.N)));
    for (std::size_t k = 0; k < shorts; ++k) state.agents[order[k]].allowed_short = true;
    return state;
}

namespace {

// Index of the agent's best strategy, or none (abstain by risk aversion).
// Draws from rng only to break a tie.
std::optional<std::size_t> best_strategy(const Agent& agent, Engine& rng, std::vector<std::size_t>& scratch) {
    const auto [lo, hi] = std::minmax_element(agent.scores.begin(), agent.scores.end());
    if (*hi - *lo < agent.risk_aversion) return std::nullopt;
    scratch.clear();
    for (std::size_t k = 0; k < agent.scores.size(); ++k)
        if (agent.scores[k] == *hi) scratch.push_back(k);
    if (scratch.size() == 1) return scratch.front();
    return scratch[uniform_index(rng, scratch.size())];
}

void update_scores(std::vector<Agent>& agents, double log_return, const std::vector<std::vector<std::int8_t>>& now) {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        Agent& agent = agents[i];
        if (agent.has_previous)
            for (std::size_t k = 0; k < agent.scores.size(); ++k) agent.scores[k] += agent.previous_actions[k] * log_return;
        agent.previous_actions = now[i];
        agent.has_previous = true;
    }
}

std::uint32_t push_move(std::uint32_t history, bool up, std::size_t m) {
    const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
    return ((history << 1) | (up ? 1u : 0u)) & mask;
}

}  // namespace

GameState step(GameState state, const GameConfig& config) {
    const double price = state.price();
    std::vector<std::vector<std::int8_t>> recommended(state.agents.size());
    std::vector<int> played(state.agents.size(), 0);
    std::vector<std::size_t> scratch;
    Usage usage;

    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        const Agent& agent = state.agents[i];
        auto& rec = recommended[i];
        rec.resize(agent.strategies.size());
        for (std::size_t k = 0; k < agent.strategies.size(); ++k)
            rec[k] = static_cast<std::int8_t>(agent.strategies[k].action(state.history, price, config.v_f));

        const auto best = best_strategy(agent, state.rng, scratch);
        if (!best) {
            ++usage.abstained;
            continue;
        }
        const int action = rec[*best];
        if (action < 0 && !agent.allowed_short && agent.position <= 0) {
            ++usage.abstained;
            continue;
        }
        played[i] = action;
        if (agent.strategies[*best].kind == StrategyKind::fundamental)
            ++usage.fundamental;
        else
            ++usage.technical;
    }

    std::int64_t excess = 0;
    for (int a : played) excess += a;
    const double old_log = state.log_price;
    state.log_price += static_cast<double>(excess) / config.lambda;
    update_scores(state.agents, state.log_price - old_log, recommended);

    const bool up = excess > 0 || (excess == 0 && coin_flip(state.rng));
    state.history = push_move(state.history, up, config.m);
    for (std::size_t i = 0; i < state.agents.size(); ++i) state.agents[i].position += played[i];

    state.last_excess_demand = excess;
    state.last_usage = usage;
    ++state.t;
    return state;
}

GameRun run_game(const GameConfig& config) { return run_game(config, config.seed); }

GameRun run_game(const GameConfig& config, std::uint64_t seed) {
    GameState state = initial_state(config, seed);
    std::vector<double> prices;
    prices.reserve(config.steps + 1);
    prices.push_back(state.price());

    Diagnostics diag;
    diag.agent_count = config.N;
    diag.excess_demand.reserve(config.steps);
    diag.usage.reserve(config.steps);
    diag.min_long_only_position.reserve(config.steps);
    for (std::size_t t = 0; t < config.steps; ++t) {
        state = step(std::move(state), config);
        prices.push_back(state.price());
        diag.excess_demand.push_back(state.last_excess_demand);
        diag.usage.push_back(state.last_usage);
        std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
        for (const Agent& a : state.agents)
            if (!a.allowed_short) lowest = std::min(lowest, a.position);
        diag.min_long_only_position.push_back(lowest == std::numeric_limits<std::int64_t>::max() ? 0 : lowest);
    }
    return GameRun{PriceSeries::from_values(std::move(prices)), std::move(diag)};
}

std::vector<double> order_imbalance(const Diagnostics& diagnostics) {
    if (diagnostics.agent_count == 0) throw ParameterError("diagnostics carry no agent count");
    std::vector<double> out;
    out.reserve(diagnostics.excess_demand.size());
    for (auto a : diagnostics.excess_demand)
        out.push_back(static_cast<double>(a) / static_cast<double>(diagnostics.agent_count));
    return out;
}

double mean_abs_order(const Diagnostics& diagnostics) {
    const auto o = order_imbalance(diagnostics);
    if (o.empty()) return 0.0;
    const std::size_t first = o.size() / 2;
    double sum = 0.0;
    for (std::size_t t = first; t < o.size(); ++t) sum += std::abs(o[t]);
    return sum / static_cast<double>(o.size() - first);
}

SpeculativeEstimate speculative_probability(const GameConfig& config) {
    config.validate();
    std::vector<char> speculative(config.runs, 0);
    std::vector<double> order(config.runs, 0.0);
    parallel_for(config.runs, [&](std::size_t r) {
        const GameRun run = run_game(config, derive_seed(config.seed, r));
        speculative[r] = run.prices.back() > 2.0 * config.v_f ? 1 : 0;
        order[r] = mean_abs_order(run.diagnostics);
    });
    SpeculativeEstimate est;
    est.runs = config.runs;
    const double n = static_cast<double>(config.runs);
    std::size_t hits = 0;
    for (char c : speculative) hits += static_cast<std::size_t>(c);
    est.probability = static_cast<double>(hits) / n;
    est.standard_error = std::sqrt(est.probability * (1.0 - est.probability) / n);
    double total = 0.0;
    for (double o : order) total += o;
    est.mean_order = total / n;
    return est;
}

std::vector<SweepRow> temperature_sweep(const GameConfig& base, std::span<const SweepPoint> points) {
    base.validate();
    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (const SweepPoint& p : points) {
        GameConfig cfg = base;
        cfg.N = p.N;
        cfg.s = p.s;
        cfg.lambda = base.lambda * static_cast<double>(p.N) / static_cast<double>(base.N);
        rows.push_back(SweepRow{temperature(cfg.m, cfg.N, cfg.s), p.N, p.s, speculative_probability(cfg)});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.T < b.T; });
    return rows;
}

QuantilePaths quantile_ensemble(const GameConfig& config) {
    config.validate();
    if (config.runs < 20) throw ParameterError("quantile ensembles need at least 20 runs");
    std::vector<std::vector<double>> paths(config.runs);
    std::vector<std::int64_t> floors(config.runs, 0);
    parallel_for(config.runs, [&](std::size_t r) {
        GameRun run = run_game(config, derive_seed(config.seed, r));
        paths[r] = run.prices.values();
        const auto& mins = run.diagnostics.min_long_only_position;
        floors[r] = mins.empty() ? 0 : *std::min_element(mins.begin(), mins.end());
    });

    const std::size_t len = config.steps + 1;
    std::vector<double> q05(len), q50(len), q95(len), column(config.runs);
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t r = 0; r < config.runs; ++r) column[r] = paths[r][t];
        std::sort(column.begin(), column.end());
        q05[t] = sorted_quantile(column, 0.05);
        q50[t] = sorted_quantile(column, 0.50);
        q95[t] = sorted_quantile(column, 0.95);
    }
    return QuantilePaths{PriceSeries::from_values(std::move(q05)), PriceSeries::from_values(std::move(q50)),
                         PriceSeries::from_values(std::move(q95)), PriceSeries::from_values(std::move(paths[0])),
                         *std::min_element(floors.begin(), floors.end())};
}

DecouplingSeries run_slaved(const PriceSeries& external, const GameConfig& config) {
    config.validate();
    if (external.size() < config.m + 2) throw LengthError("external series needs at least m + 2 points");
    GameState state = initial_state(config, config.seed);

    auto move_up = [&](std::size_t t) {
        if (external[t + 1] != external[t]) return external[t + 1] > external[t];
        return coin_flip(state.rng);
    };
    state.history = 0;
    for (std::size_t t = 0; t < config.m; ++t) state.history = push_move(state.history, move_up(t), config.m);

    auto technical_share = [&] {
        double share = 0.0;
        for (const Agent& agent : state.agents) {
            const double best = *std::max_element(agent.scores.begin(), agent.scores.end());
            std::size_t tied = 0, tied_technical = 0;
            for (std::size_t k = 0; k < agent.scores.size(); ++k) {
                if (agent.scores[k] != best) continue;
                ++tied;
                if (agent.strategies[k].kind == StrategyKind::technical) ++tied_technical;
            }
            share += static_cast<double>(tied_technical) / static_cast<double>(tied);
        }
        return share / static_cast<double>(state.agents.size());
    };

    DecouplingSeries out;
    out.index.push_back(external.index()[config.m]);
    out.technical_share.push_back(technical_share());
    std::vector<std::vector<std::int8_t>> recommended(state.agents.size());
    for (std::size_t t = config.m; t + 1 < external.size(); ++t) {
        for (std::size_t i = 0; i < state.agents.size(); ++i) {
            const Agent& agent = state.agents[i];
            recommended[i].resize(agent.strategies.size());
            for (std::size_t k = 0; k < agent.strategies.size(); ++k)
                recommended[i][k] =
                    static_cast<std::int8_t>(agent.strategies[k].action(state.history, external[t], config.v_f));
        }
        update_scores(state.agents, std::log(external[t + 1] / external[t]), recommended);
        state.history = push_move(state.history, move_up(t), config.m);
        out.index.push_back(external.index()[t + 1]);
        out.technical_share.push_back(technical_share());
    }
    return out;
}

}  // namespace mktsym::sgame
