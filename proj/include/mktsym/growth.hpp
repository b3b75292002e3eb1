#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace mktsym::growth {

enum class DividendMode { constant, wealth_effect };
enum class Direction { long_accumulation, short_accumulation };

std::string_view to_string(DividendMode m);
std::string_view to_string(Direction d);

/// One fund buying (or short selling) a steady A shares per unit time into a
/// market of liquidity lambda. Cash is measured in units of lambda and the
/// price starts at 1.
struct FundParams {
    double a_demand = 200.0;  // shares per unit time, signed like alpha
    double lambda = 1000.0;
    double alpha = 0.2;       // a_demand / lambda
    double r = 0.1;
    double d0 = 0.08;
    double c0 = 10.0;
    DividendMode dividend_mode = DividendMode::wealth_effect;
    Direction direction = Direction::long_accumulation;

    // lambda > 0, alpha == a_demand / lambda to 1e-12, alpha >= 0 for long
    // and <= 0 for short accumulation, everything finite.
    void validate() const;
};

// Builds params with a_demand = alpha * lambda and the direction implied by
// the sign of alpha.
FundParams make_params(double alpha, double lambda, double r, double d0, double c0,
                       DividendMode mode = DividendMode::wealth_effect);

struct FundState {
    double t;
    double n;       // shares held, alpha * lambda * t
    double price;
    double cash;    // C / lambda
    double wealth;  // n * price / lambda + cash
};

double price_path(double alpha, double t);

double cash_rhs(const FundParams& p, double t, double cash);

// RK4 from cash(0) = c0 on the grid t_k = k dt up to t_max (the last step is
// shortened to land on t_max).
std::vector<FundState> integrate_cash(const FundParams& p, double t_max, double dt);

// Exact solution in wealth-effect mode. Throws ParameterError for constant
// dividends and SingularParameterError when |alpha - r| <= 1e-9.
double closed_form_cash(const FundParams& p, double t);

// d/dt of closed_form_cash.
double closed_form_cash_derivative(const FundParams& p, double t);

struct SustainabilityReport {
    bool sustainable = true;
    std::optional<double> failure_time;  // first grid time with cash < price
};

SustainabilityReport sustainability(const FundParams& p, double t_max, double dt);

// alpha and a_demand change sign, direction flips.
FundParams mirror_short(const FundParams& p);

}  // namespace mktsym::growth
