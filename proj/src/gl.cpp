#include "mktsym/gl.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mktsym/error.hpp"
#include "mktsym/stats.hpp"

namespace mktsym::gl {

void GLParams::validate() const {
    if (!(a_coef > 0.0) || !std::isfinite(a_coef)) throw ParameterError("a_coef must be positive");
    if (!(b_coef > 0.0) || !std::isfinite(b_coef)) throw ParameterError("b_coef must be positive");
    if (!std::isfinite(t_c) || !std::isfinite(c_offset)) throw ParameterError("t_c and c_offset must be finite");
}

double free_energy(const GLParams& p, double T, double o) {
    const double o2 = o * o;
    return p.c_offset + p.a_coef * (T - p.t_c) * o2 + 0.5 * p.b_coef * o2 * o2;
}

double free_energy_slope(const GLParams& p, double T, double o) {
    return 2.0 * p.a_coef * (T - p.t_c) * o + 2.0 * p.b_coef * o * o * o;
}

std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::disordered: return "disordered";
        case Branch::ordered_plus: return "ordered_plus";
        case Branch::ordered_minus: return "ordered_minus";
    }
    return "unknown";
}

double equilibrium_order(const GLParams& p, double T) {
    p.validate();
    if (T >= p.t_c) return 0.0;
    return std::sqrt(p.a_coef / p.b_coef * (p.t_c - T));
}

std::vector<OrderParameterSolution> stationary_points(const GLParams& p, double T) {
    p.validate();
    if (T >= p.t_c) return {{Branch::disordered, 0.0, Extremum::minimum}};
    const double o = equilibrium_order(p, T);
    return {{Branch::disordered, 0.0, Extremum::maximum},
            {Branch::ordered_plus, o, Extremum::minimum},
            {Branch::ordered_minus, -o, Extremum::minimum}};
}

double minimize_numerically(const GLParams& p, double T, const MinimizeSettings& settings) {
    p.validate();
    if (!(settings.tolerance > 0.0)) throw ParameterError("tolerance must be positive");
    if (settings.grid_points < 3) throw ParameterError("grid needs at least 3 points");

    double o_max = settings.o_max.value_or(2.0 * std::sqrt(p.a_coef / p.b_coef * std::max(p.t_c, 0.0)));
    if (!settings.o_max) o_max = std::max({o_max, 2.0 * std::sqrt(p.a_coef / p.b_coef * std::max(p.t_c - T, 0.0)), 1.0});
    if (!(o_max > 0.0)) throw ParameterError("o_max must be positive");

    // Scan the non-negative half only: F is even, and the grid then always
    // contains 0 exactly.
    const std::size_t n = settings.grid_points;
    const double h = o_max / static_cast<double>(n - 1);
    std::size_t best = 0;
    double best_f = free_energy(p, T, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double f = free_energy(p, T, static_cast<double>(k) * h);
        if (f < best_f) {
            best_f = f;
            best = k;
        }
    }
    double lo = best == 0 ? 0.0 : static_cast<double>(best - 1) * h;
    double hi = best + 1 < n ? static_cast<double>(best + 1) * h : o_max;
    if (best == 0) {
        // minimum at the origin: the slope is >= 0 on (0, h]
        if (free_energy_slope(p, T, hi) < 0.0) throw NumericError("failed to bracket the minimizer");
        if (free_energy_slope(p, T, h * 1e-3) >= 0.0) return 0.0;
    }
    double f_lo = free_energy_slope(p, T, lo);
    const double f_hi = free_energy_slope(p, T, hi);
    if (f_lo > 0.0 || f_hi < 0.0) throw NumericError("failed to bracket the minimizer");
    while (hi - lo > settings.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = free_energy_slope(p, T, mid);
        if (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

TcFit fit_tc(std::span<const OrderSample> samples, double noise_floor) {
    std::vector<double> temps, squares;
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (!std::isfinite(s.T) || !std::isfinite(s.order)) continue;
        if (std::abs(s.order) <= noise_floor) continue;
        temps.push_back(s.T);
        squares.push_back(s.order * s.order);
        distinct.insert(s.T);
    }
    if (temps.size() < 3 || distinct.size() < 3)
        throw FitError("need at least 3 samples with order above the noise floor at distinct T");
    const LineFit line = fit_line(temps, squares);
    if (!(line.slope < 0.0)) throw FitError("order parameter does not decrease with T; no transition to fit");
    const double a_over_b = -line.slope;
    return TcFit{line.intercept / a_over_b, a_over_b, temps.size()};
}

}  // namespace mktsym::gl
