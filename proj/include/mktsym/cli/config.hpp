#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mktsym::cli {

// Bad command line or config file; the CLI exits with status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --help was given; what() holds the help text. Exit status 0.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValueKind {
    real,
    count,  // non-negative integer
    text,
    flag,   // true/false/1/0
    path,   // input file; must exist when non-empty
};

struct KeySpec {
    std::string name;
    // Empty means "unset"; the command then derives a value.
    std::string default_value;
    ValueKind kind;
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string summary;
    std::vector<KeySpec> keys;
};

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(std::string_view name);

struct ExperimentConfig {
    std::string subcommand;
    // Effective value of every key of the subcommand, after precedence.
    std::map<std::string, std::string> params;
    std::vector<std::filesystem::path> inputs;  // non-empty path-valued keys
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;

    bool has(const std::string& key) const;  // set and non-empty
    double real(const std::string& key) const;
    std::optional<double> optional_real(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
};

// key=value lines, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Precedence: flags, then --config file, then defaults. Throws UsageError or
// HelpRequested.
ExperimentConfig parse_args(int argc, const char* const* argv);

// The effective configuration as key=value lines (output directory and
// config path excluded, so it is identical wherever the run is written).
std::string render_config(const ExperimentConfig& config);

std::string usage();

}  // namespace mktsym::cli
