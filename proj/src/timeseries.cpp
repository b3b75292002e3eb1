#include "mktsym/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mktsym/csv.hpp"
#include "mktsym/error.hpp"

namespace mktsym {

PriceSeries::PriceSeries(std::vector<std::int64_t> index, std::vector<double> values,
                         std::vector<std::string> labels)
    : index_(std::move(index)), values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.empty()) throw LengthError("price series must contain at least one point");
    if (index_.size() != values_.size()) throw LengthError("price series index and values differ in length");
    if (!labels_.empty() && labels_.size() != values_.size())
        throw LengthError("price series labels and values differ in length");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
            throw ParameterError("price at position " + std::to_string(i) + " is not strictly positive");
        if (i > 0 && index_[i] <= index_[i - 1])
            throw ParameterError("price series index is not strictly increasing at position " + std::to_string(i));
    }
}

PriceSeries PriceSeries::from_values(std::vector<double> values) {
    std::vector<std::int64_t> index(values.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<std::int64_t>(i);
    return PriceSeries(std::move(index), std::move(values));
}

std::string PriceSeries::label(std::size_t i) const {
    return labels_.empty() ? std::to_string(index_.at(i)) : labels_.at(i);
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw LengthError("slice extends past the end of the series");
    auto b = static_cast<std::ptrdiff_t>(first);
    auto e = static_cast<std::ptrdiff_t>(first + count);
    std::vector<std::string> labels;
    if (has_labels()) labels.assign(labels_.begin() + b, labels_.begin() + e);
    return PriceSeries({index_.begin() + b, index_.begin() + e}, {values_.begin() + b, values_.begin() + e},
                       std::move(labels));
}

ReturnSeries::ReturnSeries(std::vector<std::int64_t> index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
    if (index_.size() != values_.size()) throw LengthError("return series index and values differ in length");
}

ReturnSeries log_returns(const PriceSeries& p) {
    if (p.size() < 2) throw LengthError("log returns need at least two prices");
    std::vector<std::int64_t> index(p.index().begin(), p.index().end() - 1);
    std::vector<double> values(p.size() - 1);
    for (std::size_t t = 0; t + 1 < p.size(); ++t) values[t] = std::log(p[t + 1] / p[t]);
    return ReturnSeries(std::move(index), std::move(values));
}

PriceSeries moving_average(const PriceSeries& p, std::size_t window) {
    if (window == 0) throw ParameterError("moving average window must be at least 1");
    if (window > p.size()) throw LengthError("moving average window exceeds series length");
    const std::size_t n = p.size() - window + 1;
    std::vector<double> out(n);
    // Deviations from the window's first price are averaged afresh per window,
    // so a constant window yields exactly its constant; the clamp removes
    // last-ulp excursions outside the window's range.
    for (std::size_t k = 0; k < n; ++k) {
        const double anchor = p[k];
        double dev = 0.0, lo = anchor, hi = anchor;
        for (std::size_t j = k; j < k + window; ++j) {
            dev += p[j] - anchor;
            lo = std::min(lo, p[j]);
            hi = std::max(hi, p[j]);
        }
        out[k] = std::clamp(anchor + dev / static_cast<double>(window), lo, hi);
    }
    auto first = static_cast<std::ptrdiff_t>(window - 1);
    std::vector<std::string> labels;
    if (p.has_labels()) labels.assign(p.labels().begin() + first, p.labels().end());
    return PriceSeries({p.index().begin() + first, p.index().end()}, std::move(out), std::move(labels));
}

PriceSeries read_csv(std::istream& in, const CsvColumns& columns) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        header = csv::split_line(line);
        if (!(header.size() == 1 && header[0].empty())) break;
        header.clear();
    }
    if (header.empty()) throw ParseError("missing header row", row == 0 ? 1 : row);

    std::size_t date_col = header.size(), value_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == columns.date) date_col = c;
        if (header[c] == columns.value) value_col = c;
    }
    if (value_col == header.size()) throw ParseError("header has no '" + columns.value + "' column", row);
    if (date_col == header.size()) throw ParseError("header has no '" + columns.date + "' column", row);

    std::vector<double> values;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        ++row;
        auto fields = csv::split_line(line);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             row);
        double v = 0.0;
        if (!csv::parse_number(fields[value_col], v))
            throw ParseError("cannot parse price '" + fields[value_col] + "'", row);
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("price " + fields[value_col] + " is not strictly positive", row);
        values.push_back(v);
        labels.push_back(std::move(fields[date_col]));
    }
    if (values.empty()) throw LengthError("CSV contains no data rows");
    std::vector<std::int64_t> index(values.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<std::int64_t>(i);
    return PriceSeries(std::move(index), std::move(values), std::move(labels));
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_csv(in, columns);
}

void write_csv(std::ostream& out, const PriceSeries& p) {
    out << "date,close\n";
    for (std::size_t i = 0; i < p.size(); ++i) out << p.label(i) << ',' << csv::format_number(p[i]) << '\n';
}

void save_csv(const std::filesystem::path& path, const PriceSeries& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, p);
    if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace mktsym
