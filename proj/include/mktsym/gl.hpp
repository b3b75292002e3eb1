#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mktsym::gl {

/// Quartic Landau expansion F(T, o) = C + a (T - Tc) o^2 + b/2 o^4.
///
/// a_coef and b_coef are the Landau coefficients (unrelated to the support
/// levels of the price-velocity model).
struct GLParams {
    double a_coef = 1.0;
    double b_coef = 1.0;
    double t_c = 1.0;
    double c_offset = 0.0;

    // Throws ParameterError unless a_coef > 0 and b_coef > 0.
    void validate() const;
};

double free_energy(const GLParams& p, double T, double o);

// dF/do = 2 a (T - Tc) o + 2 b o^3
double free_energy_slope(const GLParams& p, double T, double o);

enum class Branch { disordered, ordered_plus, ordered_minus };
enum class Extremum { minimum, maximum };

std::string_view to_string(Branch b);

struct OrderParameterSolution {
    Branch branch;
    double value;
    Extremum kind;
};

// T >= Tc: {0 (minimum)}. T < Tc: {0 (maximum), +o*, -o*} with
// o* = sqrt((a/b)(Tc - T)).
std::vector<OrderParameterSolution> stationary_points(const GLParams& p, double T);

// Closed-form non-negative equilibrium order parameter.
double equilibrium_order(const GLParams& p, double T);

struct MinimizeSettings {
    std::size_t grid_points = 2001;
    double tolerance = 1e-12;
    // Defaults to 2 sqrt((a/b) Tc), widened when needed so the minimizer
    // always lies inside.
    std::optional<double> o_max;
};

// Grid scan of F over [-o_max, o_max], then bisection on dF/do around the best
// grid point. Returns |o*|. Throws NumericError if the slope does not change
// sign across the bracket.
double minimize_numerically(const GLParams& p, double T, const MinimizeSettings& settings = {});

struct OrderSample {
    double T;
    double order;  // |o| estimate
};

struct TcFit {
    double t_c;
    double a_over_b;
    std::size_t samples_used;
};

// Least squares of o^2 = (a/b)(Tc - T) over samples with |o| > noise_floor.
// Throws FitError with fewer than 3 usable samples at distinct T, or when the
// fitted slope does not describe an ordered phase below Tc.
TcFit fit_tc(std::span<const OrderSample> samples, double noise_floor = 1e-9);

}  // namespace mktsym::gl
