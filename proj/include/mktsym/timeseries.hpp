#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mktsym {

/// A positive price path on an integer time grid (trading days).
///
/// Immutable after construction. Calendar dates read from CSV are kept as
/// opaque labels and never used for arithmetic. Construction throws
/// LengthError on empty or mismatched inputs and ParameterError when a price
/// is not strictly positive or the index is not strictly increasing.
class PriceSeries {
public:
    PriceSeries(std::vector<std::int64_t> index, std::vector<double> values,
                std::vector<std::string> labels = {});

    // Index 0, 1, ..., n-1.
    static PriceSeries from_values(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<std::int64_t>& index() const noexcept { return index_; }
    const std::vector<double>& values() const noexcept { return values_; }
    // Either empty or one label per point.
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    bool has_labels() const noexcept { return !labels_.empty(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    // Label of point i, falling back to the integer index.
    std::string label(std::size_t i) const;

    // Points [first, first + count).
    PriceSeries slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<std::int64_t> index_;
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

/// Log returns of a PriceSeries; index[t] is the time of the earlier price.
class ReturnSeries {
public:
    ReturnSeries(std::vector<std::int64_t> index, std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<std::int64_t>& index() const noexcept { return index_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<std::int64_t> index_;
    std::vector<double> values_;
};

// values[t] = ln(p[t+1] / p[t]). Throws LengthError for fewer than 2 points.
ReturnSeries log_returns(const PriceSeries& p);

// Trailing mean over `window` points, defined from t = window - 1 on; the
// result keeps the source index and labels of those points. This is the
// support-level estimate used by the ratchet backtester.
PriceSeries moving_average(const PriceSeries& p, std::size_t window);

struct CsvColumns {
    std::string date = "date";
    std::string value = "close";
};

// Header row required; the named columns may appear in any position. Loaded
// series are indexed 0..n-1 with the date column kept as labels.
PriceSeries read_csv(std::istream& in, const CsvColumns& columns = {});
PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns = {});

// Writes `date,close` rows; unlabeled series use the integer index as date.
void write_csv(std::ostream& out, const PriceSeries& p);
void save_csv(const std::filesystem::path& path, const PriceSeries& p);

}  // namespace mktsym
