#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mktsym::cli {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

// Shortest round-trip text, as used in every CSV cell.
std::string cell(double x);

// Header-only file when the table has no rows.
void emit_csv(const std::filesystem::path& path, const Table& table);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Marker {
    double x;
    double y;
    std::string label;
};

struct ChartSpec {
    std::string title;
    std::vector<Series> series;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Marker> markers;
    std::filesystem::path output;

    // At least one series, x and y of equal length, and every series spanning
    // the same x-domain. Throws ParameterError.
    void validate() const;
};

// Self-contained line chart; identical specs give identical bytes. Points
// that are not finite (or not positive on a log axis) break the line.
std::string render_svg(const ChartSpec& spec);
void emit_svg(const ChartSpec& spec);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mktsym::cli
