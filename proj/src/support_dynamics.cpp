#include "mktsym/support_dynamics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mktsym/error.hpp"
#include "mktsym/ode.hpp"
#include "mktsym/random.hpp"
#include "mktsym/stats.hpp"

namespace mktsym {

SupportLevelModel::SupportLevelModel(double alpha, double upper, double lower)
    : alpha_(alpha), upper_(upper), lower_(lower) {
    if (!std::isfinite(alpha) || !std::isfinite(upper) || !std::isfinite(lower))
        throw ParameterError("support-level model parameters must be finite");
    if (upper == lower) throw ParameterError("support levels a and b must differ");
}

double price_velocity(const SupportLevelModel& model, double price) {
    return model.alpha() * (price - model.upper()) * (price - model.lower());
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blow_up: return "blow_up";
        case Termination::non_positive: return "non_positive";
    }
    return "unknown";
}

std::string_view to_string(Stability s) { return s == Stability::stable ? "stable" : "unstable"; }

Trajectory simulate(const SupportLevelModel& model, double p0, const SimulationSettings& settings) {
    if (!(settings.dt > 0.0)) throw ParameterError("dt must be positive");
    if (settings.steps < 1) throw ParameterError("steps must be at least 1");
    if (!(p0 > 0.0)) throw ParameterError("initial price must be positive");
    if (settings.noise_amplitude < 0.0) throw ParameterError("noise amplitude must be non-negative");
    const double cap = settings.cap.value_or(1e6 * std::max(std::abs(model.upper()), std::abs(model.lower())));
    if (!(cap > 0.0)) throw ParameterError("blow-up cap must be positive");
    if (std::abs(p0) > cap) throw ParameterError("initial price already exceeds the blow-up cap");

    auto rhs = [&model](double, double p) { return price_velocity(model, p); };
    Engine rng(settings.seed);
    const double kick = settings.noise_amplitude * std::sqrt(settings.dt);

    std::vector<double> prices{p0};
    prices.reserve(settings.steps + 1);
    Termination termination = Termination::completed;
    double p = p0;
    for (std::size_t k = 0; k < settings.steps; ++k) {
        p = rk4_step(rhs, static_cast<double>(k) * settings.dt, p, settings.dt);
        if (kick > 0.0) p += kick * standard_normal(rng);
        if (!std::isfinite(p) || std::abs(p) > cap) {
            termination = Termination::blow_up;
            break;
        }
        if (!(p > 0.0)) {
            termination = Termination::non_positive;
            break;
        }
        prices.push_back(p);
    }
    return Trajectory{PriceSeries::from_values(std::move(prices)), settings.dt, termination};
}

EquilibriumReport linearize(const SupportLevelModel& model, Equilibrium which) {
    const double gap = model.upper() - model.lower();
    EquilibriumReport r{};
    if (which == Equilibrium::upper) {
        r.equilibrium = model.upper();
        r.mu = model.alpha() * gap;
    } else {
        r.equilibrium = model.lower();
        r.mu = model.alpha() * -gap;
    }
    r.stability = r.mu > 0.0 ? Stability::unstable : Stability::stable;
    return r;
}

double perturbation_growth_rate(const SupportLevelModel& model, Equilibrium which,
                                const GrowthRateSettings& settings) {
    if (settings.epsilon0 == 0.0 || !std::isfinite(settings.epsilon0))
        throw ParameterError("perturbation epsilon0 must be non-zero");
    if (!(settings.dt > 0.0)) throw ParameterError("dt must be positive");
    if (settings.steps < 2) throw ParameterError("need at least 2 steps to fit a rate");

    const double eq = which == Equilibrium::upper ? model.upper() : model.lower();
    const double regime_limit = settings.linear_regime_fraction * std::abs(model.upper() - model.lower());
    const double roundoff_floor = 1e4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(eq));
    if (std::abs(settings.epsilon0) > regime_limit)
        throw RegimeError("epsilon0 already outside the linear regime");

    auto rhs = [&model](double, double p) { return price_velocity(model, p); };
    std::vector<double> times, log_dev;
    times.reserve(settings.steps + 1);
    log_dev.reserve(settings.steps + 1);
    double p = eq + settings.epsilon0;
    for (std::size_t k = 0; k <= settings.steps; ++k) {
        const double dev = std::abs(p - eq);
        if (!(dev <= regime_limit))
            throw RegimeError("perturbation left the linear regime at step " + std::to_string(k));
        if (dev < roundoff_floor)
            throw RegimeError("perturbation decayed into round-off at step " + std::to_string(k));
        times.push_back(static_cast<double>(k) * settings.dt);
        log_dev.push_back(std::log(dev));
        p = rk4_step(rhs, times.back(), p, settings.dt);
    }
    return fit_line(times, log_dev).slope;
}

}  // namespace mktsym
