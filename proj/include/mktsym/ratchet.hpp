#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mktsym/timeseries.hpp"

namespace mktsym::ratchet {

/// Joint placement of two prices relative to their support levels.
///   X1: asset 1 above, asset 2 below     X2: both above
///   X3: both below                       X4: asset 1 below, asset 2 above
/// A price equal to its support level counts as below.
enum class Configuration : std::uint8_t { X1 = 0, X2 = 1, X3 = 2, X4 = 3 };

inline constexpr std::size_t kConfigurations = 4;
inline constexpr std::array<Configuration, kConfigurations> kAllConfigurations{
    Configuration::X1, Configuration::X2, Configuration::X3, Configuration::X4};

constexpr std::size_t index_of(Configuration x) noexcept { return static_cast<std::size_t>(x); }
std::string_view to_string(Configuration x);

Configuration classify_configuration(double a1, double abar1, double a2, double abar2);

enum class Asset : std::uint8_t { first = 0, second = 1 };

constexpr std::size_t index_of(Asset s) noexcept { return static_cast<std::size_t>(s); }
constexpr Asset other(Asset s) noexcept { return s == Asset::first ? Asset::second : Asset::first; }

/// P(hold asset s | configuration), one row per configuration.
class RatchetPolicy {
public:
    // table[i] = {P(first | X_{i+1}), P(second | X_{i+1})}
    using Table = std::array<std::array<double, 2>, kConfigurations>;

    // Throws ParameterError unless every entry is in [0, 1] and every row sums
    // to 1 within 1e-12.
    explicit RatchetPolicy(const Table& table);

    double probability(Asset s, Configuration x) const noexcept {
        return table_[index_of(x)][index_of(s)];
    }
    const Table& table() const noexcept { return table_; }

private:
    Table table_;
};

// Long asset 2 in X1, long asset 1 in X4, indifferent in X2 and X3.
RatchetPolicy default_policy();

struct PriceAtom {
    double price;
    double probability;
};
using PriceDistribution = std::vector<PriceAtom>;

/// Empirical description of a two-asset market in configuration space.
class ConfigurationStats {
public:
    using Vector = std::array<double, kConfigurations>;
    using Matrix = std::array<Vector, kConfigurations>;
    // dists[s][i]: price distribution of asset s while in configuration i.
    using Distributions = std::array<std::array<PriceDistribution, kConfigurations>, 2>;

    // Throws ParameterError unless occupancy, every transition row and every
    // distribution sum to 1 within 1e-12, with non-negative probabilities and
    // strictly positive prices.
    ConfigurationStats(const Vector& occupancy, const Matrix& transition, Distributions dists);

    const Vector& occupancy() const noexcept { return occupancy_; }
    const Matrix& transition() const noexcept { return transition_; }
    const PriceDistribution& distribution(Asset s, Configuration x) const noexcept {
        return dists_[index_of(s)][index_of(x)];
    }

private:
    Vector occupancy_;
    Matrix transition_;
    Distributions dists_;
};

// Average log return of the policy: the held asset s is bought in the
// configuration X_i where the position opens and sold in the configuration
// X_j reached next, less `cost` per leg (two legs per round trip).
double expected_return(const ConfigurationStats& stats, const RatchetPolicy& policy, double cost);

// Standard deviation of the round-trip net return under the same weighting.
// The flat cost shifts every outcome equally, so it does not change sigma.
// Throws NumericError if the variance is below -1e-12.
double risk(const ConfigurationStats& stats, const RatchetPolicy& policy, double cost);

// Supports are trailing moving averages over `window`. Occupancy and
// transitions are raw frequencies; a configuration never left gets a uniform
// transition row. Distributions are the raw observed prices; a configuration
// never visited borrows the pooled distribution of that asset (it carries
// zero weight in the return formulas).
ConfigurationStats estimate_stats(const PriceSeries& p1, const PriceSeries& p2, std::size_t window);

enum class Side : std::uint8_t { buy, sell };
std::string_view to_string(Side s);

struct Trade {
    std::size_t step;  // position in the input series
    Asset asset;
    Side side;
    double price;
    double cost;  // equity deducted for this leg
};

struct BacktestSettings {
    std::size_t window = 10;
    double cost = 0.0;  // fraction of equity per transaction leg
    std::uint64_t seed = 0;
    // In configurations whose policy row is mixed (X2, X3 by default) close
    // the pair and wait instead of drawing a side.
    bool stay_flat = false;
};

struct BacktestReport {
    // Marked at each close before that close's rebalancing; starts at 1.
    PriceSeries equity;
    std::vector<Trade> trades;
    std::vector<double> daily_returns;
    std::size_t rebalances = 0;
    double total_return = 0.0;

    // mean / stdev of daily returns * sqrt(252). Throws SharpeUndefinedError
    // when the daily returns have zero variance.
    double sharpe() const;
};

// Market-neutral pair trading: long the policy-chosen asset and short the
// other at equal notional. A new choice is drawn whenever the configuration
// changes and the book is rebalanced only when that choice differs from the
// held asset; each rebalance trades both assets (two legs). Equity compounds
// the pair log return ln(r_long) - ln(r_short).
BacktestReport backtest(const PriceSeries& p1, const PriceSeries& p2, const RatchetPolicy& policy,
                        const BacktestSettings& settings);

// Backtests every candidate window on the first half of the data and returns
// the one with the highest Sharpe ratio, smallest window on ties. Backtest
// errors (including an undefined Sharpe ratio) propagate.
std::size_t select_window(const PriceSeries& p1, const PriceSeries& p2, std::span<const std::size_t> candidates,
                          double cost, const RatchetPolicy& policy = default_policy(), std::uint64_t seed = 0);

// Two assets alternating level*(1 +/- amplitude) in antiphase: the first
// starts high, the second low. With an even moving-average window the
// supports sit exactly at `level`, so the pair flips between X1 and X4 daily.
std::pair<PriceSeries, PriceSeries> oscillating_pair(std::size_t steps, double amplitude, double level = 100.0);

}  // namespace mktsym::ratchet
