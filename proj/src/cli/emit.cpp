#include "mktsym/cli/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mktsym/csv.hpp"
#include "mktsym/error.hpp"

namespace mktsym::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr std::size_t kMaxPoints = 2000;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;
    double hi = 1.0;

    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    double map(double v) const { return log ? std::log10(v) : v; }
    double unit(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(bool log, const std::vector<double>& values) {
    Axis a;
    a.log = log;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!a.usable(v)) continue;
        lo = std::min(lo, a.map(v));
        hi = std::max(hi, a.map(v));
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(0.5, std::abs(hi) * 0.05);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

}  // namespace

void Table::add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

std::string cell(double x) { return csv::format_number(x); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void emit_csv(const std::filesystem::path& path, const Table& table) {
    std::string text;
    for (std::size_t i = 0; i < table.columns.size(); ++i) text += (i ? "," : "") + table.columns[i];
    text += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
        text += '\n';
    }
    write_text(path, text);
}

void ChartSpec::validate() const {
    if (series.empty()) throw ParameterError("chart needs at least one series");
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.x.size() != s.y.size()) throw ParameterError("series '" + s.name + "': x and y differ in length");
        if (s.x.empty()) throw ParameterError("series '" + s.name + "' is empty");
        const auto [mn, mx] = std::minmax_element(s.x.begin(), s.x.end());
        if (k == 0) {
            lo = *mn;
            hi = *mx;
        } else if (*mn != lo || *mx != hi) {
            throw ParameterError("series '" + s.name + "' does not share the x-domain of the chart");
        }
    }
}

std::string render_svg(const ChartSpec& spec) {
    spec.validate();
    std::vector<double> xs, ys;
    for (const auto& s : spec.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    for (const auto& m : spec.markers) {
        xs.push_back(m.x);
        ys.push_back(m.y);
    }
    const Axis ax = make_axis(spec.log_x, xs);
    const Axis ay = make_axis(spec.log_y, ys);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double v) { return kLeft + ax.unit(v) * pw; };
    const auto py = [&](double v) { return kTop + (1.0 - ay.unit(v)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";
    out << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
        << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0;
        const double xv = ax.lo + f * (ax.hi - ax.lo);
        const double yv = ay.lo + f * (ay.hi - ay.lo);
        const double gx = kLeft + f * pw;
        const double gy = kTop + (1.0 - f) * ph;
        out << "<line x1=\"" << fixed(gx) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(gx) << "\" y2=\""
            << fixed(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fixed(gx) << "\" y=\"" << fixed(kTop + ph + 20) << "\" text-anchor=\"middle\">"
            << tick_label(ax.log ? std::pow(10.0, xv) : xv) << "</text>\n";
        out << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(gy) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
            << fixed(gy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(gy + 4) << "\" text-anchor=\"end\">"
            << tick_label(ay.log ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    out << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 15)
        << "\" text-anchor=\"middle\">" << escape(spec.x_label) << (ax.log ? " (log)" : "") << "</text>\n";
    out << "<text transform=\"translate(18 " << fixed(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(spec.y_label) << (ay.log ? " (log)" : "") << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        const std::size_t stride = (s.x.size() + kMaxPoints - 1) / kMaxPoints;
        std::string points;
        const auto flush = [&] {
            if (!points.empty())
                out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
                    << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            const std::size_t j = std::min(i, s.x.size() - 1);
            if (!ax.usable(s.x[j]) || !ay.usable(s.y[j])) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += fixed(px(s.x[j])) + ',' + fixed(py(s.y[j]));
        }
        // always end on the last point
        const std::size_t last = s.x.size() - 1;
        if (last % stride != 0 && ax.usable(s.x[last]) && ay.usable(s.y[last]))
            points += (points.empty() ? "" : " ") + fixed(px(s.x[last])) + ',' + fixed(py(s.y[last]));
        flush();

        const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
        const double lx = kLeft + pw + 15;
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 20) << "\" y2=\""
            << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fixed(lx + 26) << "\" y=\"" << fixed(ly + 4) << "\">" << escape(s.name) << "</text>\n";
    }

    for (const auto& m : spec.markers) {
        if (!ax.usable(m.x) || !ay.usable(m.y)) continue;
        out << "<circle cx=\"" << fixed(px(m.x)) << "\" cy=\"" << fixed(py(m.y))
            << "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fixed(px(m.x) + 8) << "\" y=\"" << fixed(py(m.y) - 8) << "\">" << escape(m.label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void emit_svg(const ChartSpec& spec) { write_text(spec.output, render_svg(spec)); }

}  // namespace mktsym::cli
