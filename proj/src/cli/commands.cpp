#include "mktsym/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "mktsym/cli/emit.hpp"
#include "mktsym/csv.hpp"
#include "mktsym/error.hpp"
#include "mktsym/gl.hpp"
#include "mktsym/growth.hpp"
#include "mktsym/random.hpp"
#include "mktsym/ratchet.hpp"
#include "mktsym/sgame.hpp"
#include "mktsym/support_dynamics.hpp"

namespace mktsym::cli {

namespace {

namespace fs = std::filesystem;

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(sep, start), text.size());
        std::string item = text.substr(start, end - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
        start = end + 1;
    }
    return out;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
    double x = 0.0;
    if (!csv::parse_number(text, x) || x < 0.0 || x != std::floor(x))
        throw UsageError(what + ": expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(x);
}

sgame::GameConfig game_config(const ExperimentConfig& c) {
    sgame::GameConfig g;
    g.N = c.count("N");
    g.s = c.count("s");
    g.m = c.count("m");
    g.lambda = c.real("lambda");
    g.rho = c.real("rho");
    g.v_f = c.real("v_f");
    g.steps = c.count("steps");
    g.gamma = c.real("gamma");
    g.runs = c.count("runs");
    g.seed = c.seed;
    g.validate();
    return g;
}

CsvColumns columns(const ExperimentConfig& c) { return CsvColumns{c.text("date_column"), c.text("value_column")}; }

void support_sim(const ExperimentConfig& c, std::ostream& log) {
    const SupportLevelModel model(c.real("alpha"), c.real("a"), c.real("b"));
    SimulationSettings settings;
    settings.dt = c.real("dt");
    settings.steps = c.count("steps");
    settings.cap = c.optional_real("cap");
    settings.noise_amplitude = c.real("noise");
    settings.seed = c.seed;
    const Trajectory traj = simulate(model, c.real("p0"), settings);

    Table path{{"t", "price"}, {}};
    std::vector<double> t, p;
    for (std::size_t i = 0; i < traj.path.size(); ++i) {
        t.push_back(static_cast<double>(traj.path.index()[i]) * traj.dt);
        p.push_back(traj.path[i]);
        path.add({cell(t.back()), cell(p.back())});
    }
    emit_csv(c.out_dir / "support_path.csv", path);

    Table eq{{"equilibrium", "price", "mu", "stability"}, {}};
    for (auto which : {Equilibrium::upper, Equilibrium::lower}) {
        const auto r = linearize(model, which);
        eq.add({which == Equilibrium::upper ? "upper" : "lower", cell(r.equilibrium), cell(r.mu),
                std::string(to_string(r.stability))});
    }
    emit_csv(c.out_dir / "support_equilibria.csv", eq);

    ChartSpec chart;
    chart.title = "Support-level dynamics";
    chart.series.push_back({"P(t)", t, p});
    chart.series.push_back({"a", t, std::vector<double>(t.size(), model.upper())});
    chart.series.push_back({"b", t, std::vector<double>(t.size(), model.lower())});
    chart.x_label = "t";
    chart.y_label = "price";
    chart.output = c.out_dir / "support_path.svg";
    emit_svg(chart);
    log << "support-sim: " << traj.path.size() << " points, termination " << to_string(traj.termination) << '\n';
}

void ratchet_backtest(const ExperimentConfig& c, std::ostream& log) {
    const bool from_files = c.has("first") || c.has("second");
    if (from_files && !(c.has("first") && c.has("second")))
        throw UsageError("--first and --second must be given together");
    auto [p1, p2] = from_files
                        ? std::pair{load_csv(c.text("first"), columns(c)), load_csv(c.text("second"), columns(c))}
                        : ratchet::oscillating_pair(c.count("synthetic_steps"), c.real("amplitude"));
    if (p1.size() != p2.size()) throw LengthError("the two price series differ in length");

    const auto policy = ratchet::default_policy();
    ratchet::BacktestSettings settings;
    settings.cost = c.real("cost");
    settings.seed = c.seed;
    settings.stay_flat = c.flag("stay_flat");
    settings.window = c.count("window");
    if (c.has("windows")) {
        std::vector<std::size_t> candidates;
        for (const auto& item : split_list(c.text("windows"), ',')) candidates.push_back(parse_count(item, "--windows"));
        if (candidates.empty()) throw UsageError("--windows: no candidate windows");
        settings.window = ratchet::select_window(p1, p2, candidates, settings.cost, policy, c.seed);
    }
    const auto report = ratchet::backtest(p1, p2, policy, settings);
    save_csv(c.out_dir / "ratchet_equity.csv", report.equity);

    Table trades{{"step", "asset", "side", "price", "cost"}, {}};
    for (const auto& tr : report.trades)
        trades.add({std::to_string(tr.step), tr.asset == ratchet::Asset::first ? "1" : "2",
                    std::string(to_string(tr.side)), cell(tr.price), cell(tr.cost)});
    emit_csv(c.out_dir / "ratchet_trades.csv", trades);

    double sharpe = std::numeric_limits<double>::quiet_NaN();
    try {
        sharpe = report.sharpe();
    } catch (const SharpeUndefinedError&) {
    }
    const auto stats = ratchet::estimate_stats(p1, p2, settings.window);
    Table summary{{"window", "total_return", "sharpe", "rebalances", "expected_return", "risk"}, {}};
    summary.add({std::to_string(settings.window), cell(report.total_return), cell(sharpe),
                 std::to_string(report.rebalances), cell(ratchet::expected_return(stats, policy, settings.cost)),
                 cell(ratchet::risk(stats, policy, settings.cost))});
    emit_csv(c.out_dir / "ratchet_summary.csv", summary);

    ChartSpec chart;
    chart.title = "Ratchet equity";
    chart.series.push_back({"equity", as_double(report.equity.index()), report.equity.values()});
    chart.x_label = "step";
    chart.y_label = "equity";
    chart.output = c.out_dir / "ratchet_equity.svg";
    emit_svg(chart);
    log << "ratchet-backtest: window " << settings.window << ", total return " << cell(report.total_return)
        << ", sharpe " << cell(sharpe) << '\n';
}

void sgame_run(const ExperimentConfig& c, std::ostream& log) {
    const auto g = game_config(c);
    const auto run = sgame::run_game(g);
    save_csv(c.out_dir / "sgame_prices.csv", run.prices);

    const auto& d = run.diagnostics;
    const auto imbalance = sgame::order_imbalance(d);
    Table diag{{"t", "excess_demand", "order_imbalance", "technical", "fundamental", "abstained"}, {}};
    for (std::size_t t = 0; t < d.excess_demand.size(); ++t)
        diag.add({std::to_string(t), std::to_string(d.excess_demand[t]), cell(imbalance[t]),
                  std::to_string(d.usage[t].technical), std::to_string(d.usage[t].fundamental),
                  std::to_string(d.usage[t].abstained)});
    emit_csv(c.out_dir / "sgame_diagnostics.csv", diag);

    ChartSpec chart;
    chart.title = "$-game price";
    chart.series.push_back({"P(t)", as_double(run.prices.index()), run.prices.values()});
    chart.series.push_back({"v_f", as_double(run.prices.index()), std::vector<double>(run.prices.size(), g.v_f)});
    chart.x_label = "t";
    chart.y_label = "price";
    chart.log_y = true;
    chart.output = c.out_dir / "sgame_prices.svg";
    emit_svg(chart);
    log << "sgame-run: T = " << cell(sgame::temperature(g.m, g.N, g.s)) << ", final price "
        << cell(run.prices.back()) << '\n';
}

void sgame_sweep(const ExperimentConfig& c, std::ostream& log) {
    const auto g = game_config(c);
    std::vector<sgame::SweepPoint> points;
    for (const auto& item : split_list(c.text("points"), ',')) {
        const auto parts = split_list(item, ':');
        if (parts.size() != 2) throw UsageError("--points: expected N:s, got '" + item + "'");
        points.push_back({parse_count(parts[0], "--points"), parse_count(parts[1], "--points")});
    }
    if (points.empty()) throw UsageError("--points: no sweep points");
    const auto rows = sgame::temperature_sweep(g, points);

    Table table{{"T", "N", "s", "probability", "stderr", "order"}, {}};
    Series prob{"P(speculative)", {}, {}};
    for (const auto& r : rows) {
        table.add({cell(r.T), std::to_string(r.N), std::to_string(r.s), cell(r.estimate.probability),
                   cell(r.estimate.standard_error), cell(r.estimate.mean_order)});
        prob.x.push_back(r.T);
        prob.y.push_back(r.estimate.probability);
    }
    emit_csv(c.out_dir / "sgame_sweep.csv", table);

    ChartSpec chart;
    chart.title = "Speculative probability versus temperature";
    chart.series.push_back(std::move(prob));
    chart.x_label = "T = 2^(m+1)/(N s)";
    chart.y_label = "probability";
    chart.log_x = true;
    chart.output = c.out_dir / "sgame_sweep.svg";
    emit_svg(chart);
    log << "sgame-sweep: " << rows.size() << " points, " << g.runs << " runs each\n";
}

void sgame_quantiles(const ExperimentConfig& c, std::ostream& log) {
    const auto g = game_config(c);
    const auto q = sgame::quantile_ensemble(g);
    Table table{{"t", "q05", "q50", "q95", "sample"}, {}};
    for (std::size_t i = 0; i < q.q50.size(); ++i)
        table.add({std::to_string(q.q50.index()[i]), cell(q.q05[i]), cell(q.q50[i]), cell(q.q95[i]),
                   cell(q.sample[i])});
    emit_csv(c.out_dir / "sgame_quantiles.csv", table);

    const auto x = as_double(q.q50.index());
    ChartSpec chart;
    chart.title = "Price quantiles, rho = " + cell(g.rho);
    chart.series.push_back({"5%", x, q.q05.values()});
    chart.series.push_back({"50%", x, q.q50.values()});
    chart.series.push_back({"95%", x, q.q95.values()});
    chart.series.push_back({"one run", x, q.sample.values()});
    chart.x_label = "t";
    chart.y_label = "price";
    chart.log_y = true;
    chart.output = c.out_dir / "sgame_quantiles.svg";
    emit_svg(chart);
    log << "sgame-quantiles: final 5% quantile " << cell(q.q05.back()) << ", min long-only position "
        << q.min_long_only_position << '\n';
}

PriceSeries random_walk(std::size_t steps, double start, double volatility, std::uint64_t seed) {
    if (steps < 1) throw ParameterError("synthetic_steps must be at least 1");
    Engine rng(seed);
    std::vector<double> v(steps + 1);
    double lp = std::log(start);
    v[0] = start;
    for (std::size_t t = 1; t <= steps; ++t) {
        lp += volatility * standard_normal(rng);
        v[t] = std::exp(lp);
    }
    return PriceSeries::from_values(std::move(v));
}

void sgame_slaved(const ExperimentConfig& c, std::ostream& log) {
    const auto g = game_config(c);
    const PriceSeries external = c.has("input")
                                     ? load_csv(c.text("input"), columns(c))
                                     : random_walk(c.count("synthetic_steps"), g.v_f, c.real("volatility"), c.seed);
    const auto d = sgame::run_slaved(external, g);
    Table table{{"t", "price", "technical_share"}, {}};
    std::vector<double> x;
    for (std::size_t i = 0; i < d.index.size(); ++i) {
        const auto t = static_cast<std::size_t>(d.index[i]);
        table.add({std::to_string(d.index[i]), cell(external[t]), cell(d.technical_share[i])});
        x.push_back(static_cast<double>(d.index[i]));
    }
    emit_csv(c.out_dir / "sgame_slaved.csv", table);

    ChartSpec chart;
    chart.title = "Share of agents preferring technical strategies";
    chart.series.push_back({"technical share", x, d.technical_share});
    chart.x_label = "t";
    chart.y_label = "share";
    chart.output = c.out_dir / "sgame_slaved.svg";
    emit_svg(chart);
    log << "sgame-slaved: " << d.index.size() << " points\n";
}

std::vector<gl::OrderSample> read_sweep(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    const auto header = csv::split_line(line);
    const auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("missing column '" + name + "'", 1);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ct = col("T"), co = col("order");
    std::vector<gl::OrderSample> out;
    for (std::size_t row = 2; std::getline(in, line); ++row) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = csv::split_line(line);
        gl::OrderSample s{};
        if (f.size() != header.size() || !csv::parse_number(f[ct], s.T) || !csv::parse_number(f[co], s.order))
            throw ParseError("malformed row", row);
        out.push_back(s);
    }
    return out;
}

void gl_analyze(const ExperimentConfig& c, std::ostream& log) {
    if (c.has("sweep")) {
        auto samples = read_sweep(c.text("sweep"));
        std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.T < b.T; });
        const auto fit = gl::fit_tc(samples, c.real("noise_floor"));
        Table table{{"t_c", "a_over_b", "samples_used"}, {}};
        table.add({cell(fit.t_c), cell(fit.a_over_b), std::to_string(fit.samples_used)});
        emit_csv(c.out_dir / "gl_fit.csv", table);

        Series data{"order^2", {}, {}}, line{"fit", {}, {}};
        for (const auto& s : samples) {
            data.x.push_back(s.T);
            data.y.push_back(s.order * s.order);
            line.x.push_back(s.T);
            line.y.push_back(std::max(0.0, fit.a_over_b * (fit.t_c - s.T)));
        }
        ChartSpec chart;
        chart.title = "Critical temperature fit";
        chart.series = {std::move(data), std::move(line)};
        chart.x_label = "T";
        chart.y_label = "order^2";
        chart.output = c.out_dir / "gl_fit.svg";
        emit_svg(chart);
        log << "gl-analyze: t_c = " << cell(fit.t_c) << ", a/b = " << cell(fit.a_over_b) << '\n';
        return;
    }

    gl::GLParams p{c.real("a_coef"), c.real("b_coef"), c.real("t_c"), c.real("c_offset")};
    p.validate();
    const double t_min = c.real("t_min"), t_max = c.real("t_max");
    const std::size_t n = c.count("points");
    if (n < 2 || !(t_max > t_min)) throw ParameterError("need points >= 2 and t_max > t_min");

    Table order{{"T", "order_closed_form", "order_numeric", "free_energy"}, {}};
    Series plus{"+o(T)", {}, {}}, minus{"-o(T)", {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double T = t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double o = gl::equilibrium_order(p, T);
        const double numeric = gl::minimize_numerically(p, T);
        order.add({cell(T), cell(o), cell(numeric), cell(gl::free_energy(p, T, o))});
        plus.x.push_back(T);
        plus.y.push_back(o);
        minus.x.push_back(T);
        minus.y.push_back(-o);
    }
    emit_csv(c.out_dir / "gl_order.csv", order);
    ChartSpec oc;
    oc.title = "Order parameter branches";
    oc.series = {std::move(plus), std::move(minus)};
    oc.x_label = "T";
    oc.y_label = "o";
    oc.output = c.out_dir / "gl_order.svg";
    emit_svg(oc);

    const double half = c.real("o_range");
    const std::size_t m = c.count("landscape_points");
    if (m < 2 || !(half > 0.0)) throw ParameterError("need landscape_points >= 2 and o_range > 0");
    const std::vector<double> temps{t_min, 0.5 * (t_min + t_max), t_max};
    Table land{{"o"}, {}};
    ChartSpec lc;
    lc.title = "Free energy landscape";
    for (double T : temps) {
        land.columns.push_back("F(T=" + cell(T) + ")");
        lc.series.push_back({"T = " + cell(T), {}, {}});
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double o = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(m - 1);
        std::vector<std::string> row{cell(o)};
        for (std::size_t k = 0; k < temps.size(); ++k) {
            const double f = gl::free_energy(p, temps[k], o);
            row.push_back(cell(f));
            lc.series[k].x.push_back(o);
            lc.series[k].y.push_back(f);
        }
        land.add(std::move(row));
    }
    emit_csv(c.out_dir / "gl_landscape.csv", land);
    lc.x_label = "o";
    lc.y_label = "F";
    lc.output = c.out_dir / "gl_landscape.svg";
    emit_svg(lc);
    log << "gl-analyze: " << n << " temperatures\n";
}

void growth_solve(const ExperimentConfig& c, std::ostream& log) {
    growth::FundParams p;
    p.lambda = c.real("lambda");
    p.alpha = c.real("alpha");
    p.a_demand = c.optional_real("a_demand").value_or(p.alpha * p.lambda);
    p.r = c.real("r");
    p.d0 = c.real("d0");
    p.c0 = c.real("c0");
    const std::string& mode = c.text("dividend_mode");
    if (mode == "constant") p.dividend_mode = growth::DividendMode::constant;
    else if (mode == "wealth_effect") p.dividend_mode = growth::DividendMode::wealth_effect;
    else throw UsageError("--dividend_mode: expected constant or wealth_effect, got '" + mode + "'");
    const std::string& dir = c.text("direction");
    if (dir == "long_accumulation") p.direction = growth::Direction::long_accumulation;
    else if (dir == "short_accumulation") p.direction = growth::Direction::short_accumulation;
    else throw UsageError("--direction: expected long_accumulation or short_accumulation, got '" + dir + "'");
    // A short fund given a positive rate means the mirrored market.
    if (p.direction == growth::Direction::short_accumulation && p.alpha > 0.0) {
        p.direction = growth::Direction::long_accumulation;
        p = growth::mirror_short(p);
    }
    p.validate();

    const auto states = growth::integrate_cash(p, c.real("t_max"), c.real("dt"));
    Table table{{"t", "price", "cash", "wealth", "n"}, {}};
    Series price{"P(t)", {}, {}}, cash{"cash/lambda", {}, {}};
    std::optional<Marker> failure;
    for (const auto& s : states) {
        table.add({cell(s.t), cell(s.price), cell(s.cash), cell(s.wealth), cell(s.n)});
        price.x.push_back(s.t);
        price.y.push_back(s.price);
        cash.x.push_back(s.t);
        cash.y.push_back(s.cash);
        if (!failure && s.cash < s.price) failure = Marker{s.t, s.price, "cash < price at t = " + cell(s.t)};
    }
    emit_csv(c.out_dir / "growth.csv", table);

    ChartSpec chart;
    chart.title = "Fund cash versus market price";
    chart.series = {std::move(price), std::move(cash)};
    if (failure) chart.markers.push_back(*failure);
    chart.x_label = "t";
    chart.y_label = "units of lambda";
    chart.output = c.out_dir / "growth.svg";
    emit_svg(chart);
    if (failure) log << "growth-solve: fails at t = " << cell(failure->x) << '\n';
    else log << "growth-solve: sustainable to t = " << cell(states.back().t) << '\n';
}

}  // namespace

void execute(const ExperimentConfig& config, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.out_dir.string() + "': " + ec.message());
    const std::string& name = config.subcommand;
    if (name == "support-sim") support_sim(config, log);
    else if (name == "ratchet-backtest") ratchet_backtest(config, log);
    else if (name == "sgame-run") sgame_run(config, log);
    else if (name == "sgame-sweep") sgame_sweep(config, log);
    else if (name == "sgame-quantiles") sgame_quantiles(config, log);
    else if (name == "sgame-slaved") sgame_slaved(config, log);
    else if (name == "gl-analyze") gl_analyze(config, log);
    else if (name == "growth-solve") growth_solve(config, log);
    else throw UsageError("unknown subcommand '" + name + "'");
    write_text(config.out_dir / "run-config.txt", render_config(config));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const ExperimentConfig config = parse_args(argc, argv);
        execute(config, out);
        return kSuccess;
    } catch (const HelpRequested& h) {
        out << h.what();
        return kSuccess;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << usage();
        return kUsageFailure;
    } catch (const ParameterError& e) {
        err << "error: invalid parameter: " << e.what() << '\n';
        return kUsageFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

}  // namespace mktsym::cli
