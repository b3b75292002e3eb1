#include "mktsym/ratchet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "mktsym/error.hpp"
#include "mktsym/random.hpp"
#include "mktsym/stats.hpp"

namespace mktsym::ratchet {

namespace {

constexpr double kSumTolerance = 1e-12;

bool sums_to_one(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) {
        if (!(x >= 0.0) || x > 1.0 + kSumTolerance) return false;
        s += x;
    }
    return std::abs(s - 1.0) <= kSumTolerance;
}

struct LogMoments {
    double first = 0.0;
    double second = 0.0;
};

LogMoments log_moments(const PriceDistribution& dist) {
    LogMoments m;
    for (const auto& atom : dist) {
        const double l = std::log(atom.price);
        m.first += atom.probability * l;
        m.second += atom.probability * l * l;
    }
    return m;
}

struct ReturnMoments {
    double mean = 0.0;         // E[net return]
    double second = 0.0;       // E[net return^2]
};

ReturnMoments round_trip_moments(const ConfigurationStats& stats, const RatchetPolicy& policy, double cost) {
    if (!(cost >= 0.0)) throw ParameterError("transaction cost must be non-negative");
    std::array<std::array<LogMoments, kConfigurations>, 2> lm;
    for (Asset s : {Asset::first, Asset::second})
        for (Configuration x : kAllConfigurations) lm[index_of(s)][index_of(x)] = log_moments(stats.distribution(s, x));

    const double legs = 2.0 * cost;
    ReturnMoments out;
    for (std::size_t i = 0; i < kConfigurations; ++i) {
        for (std::size_t j = 0; j < kConfigurations; ++j) {
            const double pij = stats.occupancy()[i] * stats.transition()[i][j];
            if (pij == 0.0) continue;
            for (Asset s : {Asset::first, Asset::second}) {
                const double w = pij * policy.probability(s, kAllConfigurations[i]);
                if (w == 0.0) continue;
                const LogMoments& buy = lm[index_of(s)][i];
                const LogMoments& sell = lm[index_of(s)][j];
                // buy and sell prices are drawn independently
                const double d1 = sell.first - buy.first;
                const double d2 = sell.second - 2.0 * sell.first * buy.first + buy.second;
                out.mean += w * d1;
                out.second += w * (d2 - 2.0 * legs * d1 + legs * legs);
            }
        }
    }
    out.mean -= legs;
    return out;
}

}  // namespace

std::string_view to_string(Configuration x) {
    static constexpr std::array<std::string_view, kConfigurations> names{"X1", "X2", "X3", "X4"};
    return names[index_of(x)];
}

std::string_view to_string(Side s) { return s == Side::buy ? "buy" : "sell"; }

Configuration classify_configuration(double a1, double abar1, double a2, double abar2) {
    const bool above1 = a1 > abar1;
    const bool above2 = a2 > abar2;
    if (above1) return above2 ? Configuration::X2 : Configuration::X1;
    return above2 ? Configuration::X4 : Configuration::X3;
}

RatchetPolicy::RatchetPolicy(const Table& table) : table_(table) {
    for (std::size_t i = 0; i < kConfigurations; ++i) {
        if (!sums_to_one(table_[i]))
            throw ParameterError("policy row " + std::string(to_string(kAllConfigurations[i])) +
                                 " is not a probability distribution");
    }
}

RatchetPolicy default_policy() {
    return RatchetPolicy(RatchetPolicy::Table{{
        {0.0, 1.0},  // X1: asset 2 is below its support
        {0.5, 0.5},
        {0.5, 0.5},
        {1.0, 0.0},  // X4: asset 1 is below its support
    }});
}

ConfigurationStats::ConfigurationStats(const Vector& occupancy, const Matrix& transition, Distributions dists)
    : occupancy_(occupancy), transition_(transition), dists_(std::move(dists)) {
    if (!sums_to_one(occupancy_)) throw ParameterError("configuration occupancy is not a probability vector");
    for (std::size_t i = 0; i < kConfigurations; ++i) {
        if (!sums_to_one(transition_[i]))
            throw ParameterError("transition row " + std::string(to_string(kAllConfigurations[i])) +
                                 " is not stochastic");
    }
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t i = 0; i < kConfigurations; ++i) {
            const auto& dist = dists_[s][i];
            std::vector<double> probs;
            probs.reserve(dist.size());
            for (const auto& atom : dist) {
                if (!(atom.price > 0.0) || !std::isfinite(atom.price))
                    throw ParameterError("price distribution atoms must be strictly positive");
                probs.push_back(atom.probability);
            }
            if (!sums_to_one(probs))
                throw ParameterError("price distribution of asset " + std::to_string(s + 1) + " in " +
                                     std::string(to_string(kAllConfigurations[i])) + " does not sum to 1");
        }
    }
}

double expected_return(const ConfigurationStats& stats, const RatchetPolicy& policy, double cost) {
    return round_trip_moments(stats, policy, cost).mean;
}

double risk(const ConfigurationStats& stats, const RatchetPolicy& policy, double cost) {
    const ReturnMoments m = round_trip_moments(stats, policy, cost);
    double variance = m.second - m.mean * m.mean;
    if (variance < -1e-12) throw NumericError("negative return variance " + std::to_string(variance));
    if (variance < 0.0) variance = 0.0;
    return std::sqrt(variance);
}

namespace {

PriceDistribution to_distribution(const std::map<double, std::size_t>& counts) {
    std::size_t total = 0;
    for (const auto& [price, n] : counts) total += n;
    PriceDistribution dist;
    dist.reserve(counts.size());
    for (const auto& [price, n] : counts)
        dist.push_back({price, static_cast<double>(n) / static_cast<double>(total)});
    return dist;
}

std::vector<Configuration> classify_path(const PriceSeries& p1, const PriceSeries& p2, std::size_t window) {
    const PriceSeries ma1 = moving_average(p1, window);
    const PriceSeries ma2 = moving_average(p2, window);
    std::vector<Configuration> path;
    path.reserve(ma1.size());
    for (std::size_t k = 0; k < ma1.size(); ++k) {
        const std::size_t t = k + window - 1;
        path.push_back(classify_configuration(p1[t], ma1[k], p2[t], ma2[k]));
    }
    return path;
}

}  // namespace

ConfigurationStats estimate_stats(const PriceSeries& p1, const PriceSeries& p2, std::size_t window) {
    if (p1.size() != p2.size()) throw LengthError("asset series differ in length");
    if (window == 0) throw ParameterError("support window must be at least 1");
    if (p1.size() < window + 2) throw LengthError("series too short for the support window");

    const auto path = classify_path(p1, p2, window);
    const std::size_t t0 = window - 1;

    std::array<std::size_t, kConfigurations> visits{};
    std::array<std::array<std::size_t, kConfigurations>, kConfigurations> moves{};
    std::array<std::array<std::map<double, std::size_t>, kConfigurations>, 2> atoms;
    std::array<std::map<double, std::size_t>, 2> pooled;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const std::size_t i = index_of(path[k]);
        ++visits[i];
        if (k + 1 < path.size()) ++moves[i][index_of(path[k + 1])];
        const double prices[2] = {p1[t0 + k], p2[t0 + k]};
        for (std::size_t s = 0; s < 2; ++s) {
            ++atoms[s][i][prices[s]];
            ++pooled[s][prices[s]];
        }
    }

    ConfigurationStats::Vector occupancy{};
    ConfigurationStats::Matrix transition{};
    for (std::size_t i = 0; i < kConfigurations; ++i) {
        occupancy[i] = static_cast<double>(visits[i]) / static_cast<double>(path.size());
        std::size_t row_total = 0;
        for (std::size_t j = 0; j < kConfigurations; ++j) row_total += moves[i][j];
        for (std::size_t j = 0; j < kConfigurations; ++j) {
            // add-one smoothing on an empty row is the uniform row
            transition[i][j] = row_total == 0 ? 1.0 / kConfigurations
                                              : static_cast<double>(moves[i][j]) / static_cast<double>(row_total);
        }
    }
    ConfigurationStats::Distributions dists;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t i = 0; i < kConfigurations; ++i)
            dists[s][i] = to_distribution(visits[i] == 0 ? pooled[s] : atoms[s][i]);
    return ConfigurationStats(occupancy, transition, std::move(dists));
}

double BacktestReport::sharpe() const {
    const double sd = sample_stdev(daily_returns);
    if (daily_returns.size() < 2 || sd == 0.0)
        throw SharpeUndefinedError("Sharpe ratio undefined: daily returns have zero variance");
    return mean(daily_returns) / sd * std::sqrt(252.0);
}

BacktestReport backtest(const PriceSeries& p1, const PriceSeries& p2, const RatchetPolicy& policy,
                        const BacktestSettings& settings) {
    if (p1.size() != p2.size()) throw LengthError("asset series differ in length");
    if (settings.window == 0) throw ParameterError("support window must be at least 1");
    if (p1.size() <= settings.window) throw LengthError("series must be longer than the support window");
    if (!(settings.cost >= 0.0) || settings.cost >= 0.5)
        throw ParameterError("per-leg cost must lie in [0, 0.5)");

    const std::size_t n = p1.size();
    const std::size_t t0 = settings.window - 1;
    const auto path = classify_path(p1, p2, settings.window);
    const PriceSeries* prices[2] = {&p1, &p2};
    Engine rng(settings.seed);

    BacktestReport report{PriceSeries::from_values({1.0}), {}, {}, 0, 0.0};
    std::vector<double> equity(n);
    equity[0] = 1.0;
    double value = 1.0;
    bool holding = false;
    Asset held = Asset::first;  // long leg while holding
    const auto trade_pair = [&](std::size_t t, Asset bought) {
        const double leg_cost = value * settings.cost;
        report.trades.push_back({t, bought, Side::buy, (*prices[index_of(bought)])[t], leg_cost});
        report.trades.push_back({t, other(bought), Side::sell, (*prices[index_of(other(bought))])[t], leg_cost});
        value *= 1.0 - 2.0 * settings.cost;
        ++report.rebalances;
    };
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if (t >= t0) {
            const Configuration x = path[t - t0];
            const bool changed = t == t0 || x != path[t - t0 - 1];
            const double p_first = policy.probability(Asset::first, x);
            const bool flat_here = settings.stay_flat && p_first > 0.0 && p_first < 1.0;
            if (changed && flat_here && holding) {
                // closing buys back the short leg and sells the long one
                trade_pair(t, other(held));
                holding = false;
            } else if (changed && !flat_here) {
                const Asset choice = uniform01(rng) < p_first ? Asset::first : Asset::second;
                if (!holding || choice != held) {
                    trade_pair(t, choice);
                    held = choice;
                    holding = true;
                }
            }
        }
        if (holding) {
            const PriceSeries& lng = *prices[index_of(held)];
            const PriceSeries& sht = *prices[index_of(other(held))];
            value *= std::exp(std::log(lng[t + 1] / lng[t]) - std::log(sht[t + 1] / sht[t]));
        }
        equity[t + 1] = value;
    }

    report.daily_returns.resize(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) report.daily_returns[t] = equity[t + 1] / equity[t] - 1.0;
    report.total_return = equity.back() - 1.0;
    report.equity = PriceSeries(p1.index(), std::move(equity), p1.labels());
    return report;
}

std::size_t select_window(const PriceSeries& p1, const PriceSeries& p2, std::span<const std::size_t> candidates,
                          double cost, const RatchetPolicy& policy, std::uint64_t seed) {
    if (candidates.empty()) throw ParameterError("no candidate windows given");
    if (p1.size() != p2.size()) throw LengthError("asset series differ in length");
    std::vector<std::size_t> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() == 1) return sorted.front();

    const std::size_t half = p1.size() / 2;
    const PriceSeries in1 = p1.slice(0, half);
    const PriceSeries in2 = p2.slice(0, half);
    std::size_t best = sorted.front();
    double best_sharpe = -std::numeric_limits<double>::infinity();
    for (std::size_t m : sorted) {
        BacktestSettings settings;
        settings.window = m;
        settings.cost = cost;
        settings.seed = seed;
        const double s = backtest(in1, in2, policy, settings).sharpe();
        if (s > best_sharpe) {
            best_sharpe = s;
            best = m;
        }
    }
    return best;
}

std::pair<PriceSeries, PriceSeries> oscillating_pair(std::size_t steps, double amplitude, double level) {
    if (steps < 2) throw LengthError("oscillating pair needs at least 2 steps");
    if (!(amplitude > 0.0 && amplitude < 1.0)) throw ParameterError("amplitude must lie in (0, 1)");
    if (!(level > 0.0) || !std::isfinite(level)) throw ParameterError("level must be positive");
    std::vector<double> first(steps), second(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double sign = t % 2 == 0 ? 1.0 : -1.0;
        first[t] = level + sign * level * amplitude;
        second[t] = level - sign * level * amplitude;
    }
    return {PriceSeries::from_values(std::move(first)), PriceSeries::from_values(std::move(second))};
}

}  // namespace mktsym::ratchet
