#include "mktsym/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mktsym/csv.hpp"
#include "mktsym/sgame.hpp"

namespace mktsym::cli {

namespace {

std::string num(double x) { return csv::format_number(x); }

std::vector<KeySpec> game_keys() {
    const sgame::GameConfig d;
    return {
        {"N", std::to_string(d.N), ValueKind::count, "number of agents"},
        {"s", std::to_string(d.s), ValueKind::count, "technical strategies per agent"},
        {"m", std::to_string(d.m), ValueKind::count, "memory length (1..24)"},
        {"lambda", num(d.lambda), ValueKind::real, "liquidity"},
        {"rho", num(d.rho), ValueKind::real, "fraction of agents allowed to short"},
        {"v_f", num(d.v_f), ValueKind::real, "fundamental value and initial price"},
        {"steps", std::to_string(d.steps), ValueKind::count, "trading rounds"},
        {"gamma", num(d.gamma), ValueKind::real, "abstention threshold on score spread"},
        {"runs", std::to_string(d.runs), ValueKind::count, "ensemble size"},
    };
}

std::vector<KeySpec> with(std::vector<KeySpec> base, std::vector<KeySpec> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
}

std::vector<CommandSpec> build_commands() {
    std::vector<CommandSpec> out;
    out.push_back({"support-sim", "integrate the support-level price velocity", {
        {"alpha", "1", ValueKind::real, "velocity coefficient"},
        {"a", "2", ValueKind::real, "upper support level"},
        {"b", "1", ValueKind::real, "lower support level"},
        {"p0", "1.5", ValueKind::real, "initial price"},
        {"dt", "0.01", ValueKind::real, "time step"},
        {"steps", "2000", ValueKind::count, "integration steps"},
        {"noise", "0", ValueKind::real, "additive noise amplitude"},
        {"cap", "", ValueKind::real, "blow-up threshold (default 1e6 max(|a|,|b|))"},
    }});
    out.push_back({"ratchet-backtest", "backtest the two-asset ratchet strategy", {
        {"first", "", ValueKind::path, "CSV of the first asset (synthetic pair if unset)"},
        {"second", "", ValueKind::path, "CSV of the second asset"},
        {"date_column", "date", ValueKind::text, "label column name"},
        {"value_column", "close", ValueKind::text, "price column name"},
        {"window", "10", ValueKind::count, "moving-average window"},
        {"windows", "", ValueKind::text, "comma-separated candidate windows, chosen on the first half"},
        {"cost", "0", ValueKind::real, "cost per transaction leg, fraction of equity"},
        {"stay_flat", "false", ValueKind::flag, "close the pair in mixed configurations instead of drawing a side"},
        {"synthetic_steps", "1000", ValueKind::count, "length of the synthetic pair"},
        {"amplitude", "0.1", ValueKind::real, "relative amplitude of the synthetic pair"},
    }});
    out.push_back({"sgame-run", "play one $-game", game_keys()});
    out.push_back({"sgame-sweep", "speculative probability versus temperature",
                   with(game_keys(), {{"points", "5:1,5:2,10:2,10:4,20:2,25:2,40:2,50:4", ValueKind::text,
                                       "comma-separated N:s pairs"}})});
    out.push_back({"sgame-quantiles", "5/50/95% price quantiles over an ensemble", game_keys()});
    out.push_back({"sgame-slaved", "strategy usage of agents watching an external price",
                   with(game_keys(), {
                       {"input", "", ValueKind::path, "CSV price path (random walk if unset)"},
                       {"date_column", "date", ValueKind::text, "label column name"},
                       {"value_column", "close", ValueKind::text, "price column name"},
                       {"synthetic_steps", "500", ValueKind::count, "length of the random walk"},
                       {"volatility", "0.01", ValueKind::real, "log-return volatility of the random walk"},
                   })});
    out.push_back({"gl-analyze", "Landau free energy, order-parameter branches, Tc fits", {
        {"a_coef", "1", ValueKind::real, "quadratic coefficient"},
        {"b_coef", "1", ValueKind::real, "quartic coefficient"},
        {"t_c", "1", ValueKind::real, "critical temperature"},
        {"c_offset", "0", ValueKind::real, "constant term"},
        {"t_min", "0", ValueKind::real, "lowest temperature"},
        {"t_max", "2", ValueKind::real, "highest temperature"},
        {"points", "41", ValueKind::count, "temperatures on the grid"},
        {"o_range", "2", ValueKind::real, "landscape half-width in o"},
        {"landscape_points", "81", ValueKind::count, "points on the landscape grid"},
        {"sweep", "", ValueKind::path, "sgame-sweep CSV to fit Tc from instead"},
        {"noise_floor", "1e-9", ValueKind::real, "orders at or below this are ignored by the fit"},
    }});
    out.push_back({"growth-solve", "cash balance of a fund driving the market", {
        {"a_demand", "", ValueKind::real, "shares bought per unit time (default alpha*lambda)"},
        {"lambda", "1000", ValueKind::real, "liquidity"},
        {"alpha", "0.2", ValueKind::real, "market growth rate"},
        {"r", "0.1", ValueKind::real, "interest rate"},
        {"d0", "0.08", ValueKind::real, "initial dividend yield"},
        {"c0", "10", ValueKind::real, "initial cash in units of lambda"},
        {"dividend_mode", "wealth_effect", ValueKind::text, "constant or wealth_effect"},
        {"direction", "long_accumulation", ValueKind::text, "long_accumulation or short_accumulation"},
        {"t_max", "100", ValueKind::real, "time horizon"},
        {"dt", "0.01", ValueKind::real, "time step"},
    }});
    return out;
}

const KeySpec* find_key(const CommandSpec& cmd, std::string_view key) {
    for (const auto& k : cmd.keys)
        if (k.name == key) return &k;
    return nullptr;
}

std::string key_list(const CommandSpec& cmd) {
    std::string out = "seed";
    for (const auto& k : cmd.keys) out += ", " + k.name;
    return out;
}

template <typename Int>
bool parse_integer(std::string_view text, Int& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

bool parse_flag(std::string_view text, bool& out) {
    if (text == "true" || text == "1" || text == "yes") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        out = false;
        return true;
    }
    return false;
}

void check_value(const KeySpec& key, const std::string& value, const std::string& source) {
    if (value.empty()) return;
    switch (key.kind) {
        case ValueKind::real: {
            double x = 0.0;
            if (!csv::parse_number(value, x) || !std::isfinite(x))
                throw UsageError(source + ": expected a number, got '" + value + "'");
            break;
        }
        case ValueKind::count: {
            std::size_t x = 0;
            if (!parse_integer(value, x))
                throw UsageError(source + ": expected a non-negative integer, got '" + value + "'");
            break;
        }
        case ValueKind::flag: {
            bool b = false;
            if (!parse_flag(value, b)) throw UsageError(source + ": expected true or false, got '" + value + "'");
            break;
        }
        case ValueKind::path:
            if (!std::filesystem::is_regular_file(value))
                throw UsageError(source + ": no such file '" + value + "'");
            break;
        case ValueKind::text:
            break;
    }
}

std::uint64_t parse_seed(const std::string& value, const std::string& source) {
    std::uint64_t seed = 0;
    if (!parse_integer(value, seed)) throw UsageError(source + ": expected a non-negative integer, got '" + value + "'");
    return seed;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> table = build_commands();
    return table;
}

const CommandSpec* find_command(std::string_view name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

bool ExperimentConfig::has(const std::string& key) const {
    const auto it = params.find(key);
    return it != params.end() && !it->second.empty();
}

const std::string& ExperimentConfig::text(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw UsageError("unknown key " + key);
    return it->second;
}

double ExperimentConfig::real(const std::string& key) const {
    const auto v = optional_real(key);
    if (!v) throw UsageError("missing required key " + key);
    return *v;
}

std::optional<double> ExperimentConfig::optional_real(const std::string& key) const {
    const std::string& t = text(key);
    if (t.empty()) return std::nullopt;
    double x = 0.0;
    if (!csv::parse_number(t, x)) throw UsageError(key + ": expected a number, got '" + t + "'");
    return x;
}

std::size_t ExperimentConfig::count(const std::string& key) const {
    const std::string& t = text(key);
    if (t.empty()) throw UsageError("missing required key " + key);
    std::size_t x = 0;
    if (!parse_integer(t, x)) throw UsageError(key + ": expected a non-negative integer, got '" + t + "'");
    return x;
}

bool ExperimentConfig::flag(const std::string& key) const {
    bool b = false;
    if (!parse_flag(text(key), b)) throw UsageError(key + ": expected true or false, got '" + text(key) + "'");
    return b;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(row) + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw UsageError(path.string() + ":" + std::to_string(row) + ": empty key");
        out[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return out;
}

ExperimentConfig parse_args(int argc, const char* const* argv) {
    CLI::App app{"Market symmetry-breaking experiments", "mktsym"};
    app.require_subcommand(1);
    std::string seed_text, out_dir = ".", config_path;
    app.add_option("--seed", seed_text, "master seed (default 1)");
    app.add_option("--out-dir", out_dir, "output directory (created if missing)");
    app.add_option("--config", config_path, "key=value config file");

    // Node-stable storage for every subcommand's flag values.
    std::map<std::string, std::map<std::string, std::string>> given;
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.summary);
        sub->fallthrough();
        auto& store = given[cmd.name];
        for (const auto& key : cmd.keys) {
            std::string help = key.help;
            if (!key.default_value.empty()) help += " [" + key.default_value + "]";
            sub->add_option("--" + key.name, store[key.name], help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const auto chosen = app.get_subcommands();
    ExperimentConfig config;
    config.subcommand = chosen.front()->get_name();
    const CommandSpec& cmd = *find_command(config.subcommand);

    for (const auto& key : cmd.keys) config.params[key.name] = key.default_value;

    std::optional<std::string> seed_from_file;
    if (!config_path.empty()) {
        for (const auto& [k, v] : read_config_file(config_path)) {
            if (k == "seed") {
                seed_from_file = v;
                continue;
            }
            const KeySpec* key = find_key(cmd, k);
            if (!key)
                throw UsageError("config key '" + k + "' is not valid for " + cmd.name + "; valid keys: " +
                                 key_list(cmd));
            check_value(*key, v, "config key " + k);
            config.params[k] = v;
        }
    }
    for (const auto& key : cmd.keys) {
        const CLI::Option* opt = chosen.front()->get_option("--" + key.name);
        if (opt->count() == 0) continue;
        const std::string& v = given[cmd.name][key.name];
        check_value(key, v, "--" + key.name);
        config.params[key.name] = v;
    }

    if (!seed_text.empty()) config.seed = parse_seed(seed_text, "--seed");
    else if (seed_from_file) config.seed = parse_seed(*seed_from_file, "config key seed");

    config.out_dir = out_dir;
    for (const auto& key : cmd.keys)
        if (key.kind == ValueKind::path && !config.params[key.name].empty())
            config.inputs.emplace_back(config.params[key.name]);
    return config;
}

std::string render_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "subcommand=" << config.subcommand << '\n' << "seed=" << config.seed << '\n';
    const CommandSpec* cmd = find_command(config.subcommand);
    if (!cmd) return out.str();
    for (const auto& key : cmd->keys) out << key.name << '=' << config.text(key.name) << '\n';
    return out.str();
}

std::string usage() {
    std::ostringstream out;
    out << "usage: mktsym <subcommand> [--key value ...] [--seed S] [--out-dir DIR] [--config FILE]\n\n"
        << "subcommands:\n";
    for (const auto& c : commands()) out << "  " << c.name << std::string(20 - std::min<std::size_t>(c.name.size(), 19), ' ') << c.summary << '\n';
    out << "\nrun 'mktsym <subcommand> --help' for its keys\n";
    return out.str();
}

}  // namespace mktsym::cli
