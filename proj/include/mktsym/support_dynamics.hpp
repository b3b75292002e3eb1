#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "mktsym/timeseries.hpp"

namespace mktsym {

/// Price velocity dP/dt = alpha (P - a)(P - b) between two support levels.
///
/// For alpha > 0 and a > b the upper level a repels and the lower level b
/// attracts; prices above a run away in finite time.
class SupportLevelModel {
public:
    // Throws ParameterError when a == b or any parameter is not finite.
    SupportLevelModel(double alpha, double upper, double lower);

    double alpha() const noexcept { return alpha_; }
    double upper() const noexcept { return upper_; }
    double lower() const noexcept { return lower_; }

private:
    double alpha_;
    double upper_;
    double lower_;
};

double price_velocity(const SupportLevelModel& model, double price);

enum class Termination {
    completed,
    blow_up,       // |p| exceeded the cap
    non_positive,  // the path left the positive price domain
};

std::string_view to_string(Termination t);

struct SimulationSettings {
    double dt = 0.01;
    std::size_t steps = 1000;
    // Defaults to 1e6 * max(|a|, |b|).
    std::optional<double> cap;
    // Additive Gaussian kick sigma * sqrt(dt) * N(0,1) after every step. This
    // is an external forcing, not part of the velocity law; 0 disables it.
    double noise_amplitude = 0.0;
    std::uint64_t seed = 0;
};

struct Trajectory {
    // index k is time k * dt; holds every point reached before termination.
    PriceSeries path;
    double dt;
    Termination termination;

    bool blew_up() const noexcept { return termination == Termination::blow_up; }
};

// Fixed-step RK4 integration from p0 > 0. Halts early (flagged) on blow-up
// or when the price stops being positive.
Trajectory simulate(const SupportLevelModel& model, double p0, const SimulationSettings& settings);

enum class Equilibrium { upper, lower };
enum class Stability { stable, unstable };

std::string_view to_string(Stability s);

struct EquilibriumReport {
    double equilibrium;
    // Exponential rate of a small perturbation: alpha(a-b) at a, alpha(b-a) at b.
    double mu;
    Stability stability;
};

EquilibriumReport linearize(const SupportLevelModel& model, Equilibrium which);

struct GrowthRateSettings {
    double epsilon0 = 1e-4;
    double dt = 1e-3;
    std::size_t steps = 1000;
    // The fit is rejected once |p - equilibrium| exceeds this fraction of |a - b|.
    double linear_regime_fraction = 1e-2;
};

// Integrates from equilibrium + epsilon0 and returns the least-squares slope
// of ln|p(t) - equilibrium| against t. Throws ParameterError for
// epsilon0 == 0 and RegimeError when the perturbation leaves the linear
// regime (or sinks into round-off) before the window completes.
double perturbation_growth_rate(const SupportLevelModel& model, Equilibrium which,
                                const GrowthRateSettings& settings);

}  // namespace mktsym
