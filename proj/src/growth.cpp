#include "mktsym/growth.hpp"

#include <algorithm>
#include <cmath>

#include "mktsym/error.hpp"
#include "mktsym/ode.hpp"

namespace mktsym::growth {

std::string_view to_string(DividendMode m) {
    return m == DividendMode::constant ? "constant" : "wealth_effect";
}

std::string_view to_string(Direction d) {
    return d == Direction::long_accumulation ? "long_accumulation" : "short_accumulation";
}

void FundParams::validate() const {
    for (double v : {a_demand, lambda, alpha, r, d0, c0})
        if (!std::isfinite(v)) throw ParameterError("fund parameters must be finite");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (std::abs(a_demand / lambda - alpha) > 1e-12 * std::max(1.0, std::abs(alpha)))
        throw ParameterError("alpha must equal a_demand / lambda");
    if (direction == Direction::long_accumulation && alpha < 0.0)
        throw ParameterError("long accumulation needs alpha >= 0");
    if (direction == Direction::short_accumulation && alpha > 0.0)
        throw ParameterError("short accumulation needs alpha <= 0");
}

FundParams make_params(double alpha, double lambda, double r, double d0, double c0, DividendMode mode) {
    FundParams p;
    p.a_demand = alpha * lambda;
    p.lambda = lambda;
    p.alpha = alpha;
    p.r = r;
    p.d0 = d0;
    p.c0 = c0;
    p.dividend_mode = mode;
    p.direction = alpha < 0.0 ? Direction::short_accumulation : Direction::long_accumulation;
    p.validate();
    return p;
}

double price_path(double alpha, double t) { return std::exp(alpha * t); }

double cash_rhs(const FundParams& p, double t, double cash) {
    const double growth = std::exp(p.alpha * t);
    const double dividend = p.dividend_mode == DividendMode::constant ? p.d0 : p.d0 * growth;
    return -p.alpha * growth + cash * p.r + p.alpha * t * dividend;
}

namespace {

FundState make_state(const FundParams& p, double t, double cash) {
    const double price = price_path(p.alpha, t);
    const double n = p.alpha * p.lambda * t;
    return FundState{t, n, price, cash, n * price / p.lambda + cash};
}

}  // namespace

std::vector<FundState> integrate_cash(const FundParams& p, double t_max, double dt) {
    p.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ParameterError("t_max must be non-negative");

    const auto rhs = [&p](double t, double c) { return cash_rhs(p, t, c); };
    const auto full_steps = static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12)));
    std::vector<FundState> out;
    out.reserve(full_steps + 2);
    double cash = p.c0;
    out.push_back(make_state(p, 0.0, cash));
    for (std::size_t k = 0; k < full_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        cash = rk4_step(rhs, t, cash, dt);
        out.push_back(make_state(p, static_cast<double>(k + 1) * dt, cash));
    }
    const double t_last = static_cast<double>(full_steps) * dt;
    if (t_max - t_last > 1e-12 * std::max(1.0, t_max)) {
        cash = rk4_step(rhs, t_last, cash, t_max - t_last);
        out.push_back(make_state(p, t_max, cash));
    }
    return out;
}

namespace {

void check_closed_form(const FundParams& p) {
    p.validate();
    if (p.dividend_mode != DividendMode::wealth_effect)
        throw ParameterError("closed form exists only for wealth-effect dividends");
    if (std::abs(p.alpha - p.r) <= 1e-9) throw SingularParameterError("alpha too close to r (resonant case)");
}

}  // namespace

// C(t) = alpha e^{alpha t} [(t d0 - 1)/k - d0/k^2] + e^{r t} [(alpha^2 - r alpha + alpha d0)/k^2 + c0],
// k = alpha - r.
double closed_form_cash(const FundParams& p, double t) {
    check_closed_form(p);
    const double a = p.alpha;
    const double k = a - p.r;
    const double particular = a * std::exp(a * t) * ((t * p.d0 - 1.0) / k - p.d0 / (k * k));
    const double homogeneous = std::exp(p.r * t) * ((a * a - p.r * a + a * p.d0) / (k * k) + p.c0);
    return particular + homogeneous;
}

double closed_form_cash_derivative(const FundParams& p, double t) {
    check_closed_form(p);
    const double a = p.alpha;
    const double k = a - p.r;
    const double e = std::exp(a * t);
    const double bracket = (t * p.d0 - 1.0) / k - p.d0 / (k * k);
    const double particular = a * e * (a * bracket + p.d0 / k);
    const double homogeneous = p.r * std::exp(p.r * t) * ((a * a - p.r * a + a * p.d0) / (k * k) + p.c0);
    return particular + homogeneous;
}

SustainabilityReport sustainability(const FundParams& p, double t_max, double dt) {
    for (const auto& s : integrate_cash(p, t_max, dt)) {
        if (s.cash < s.price) return SustainabilityReport{false, s.t};
    }
    return SustainabilityReport{};
}

FundParams mirror_short(const FundParams& p) {
    FundParams out = p;
    out.alpha = -p.alpha;
    out.a_demand = -p.a_demand;
    out.direction = p.direction == Direction::long_accumulation ? Direction::short_accumulation
                                                                : Direction::long_accumulation;
    return out;
}

}  // namespace mktsym::growth
