// histogram.hpp — Empirical distribution of per-run degree fractions.
//
// A Histogram keeps the exact sorted sample of R fraction values for one
// degree d; the evaluator is the right-continuous step cdf. Binned exports
// are lossy and only for plotting; the sorted sample is always available.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rtg/errors.hpp"

namespace rtg {

struct Histogram {
    std::int64_t d = 0;
    std::int64_t n = 0;
    std::int64_t runs = 0;
    std::vector<double> sorted_values;   // ascending, size == runs

    // H(x) = (1/R) * #{values <= x}; 0 below the sample, 1 above.
    [[nodiscard]] double operator()(double x) const {
        const auto count = std::upper_bound(sorted_values.begin(), sorted_values.end(), x) -
                           sorted_values.begin();
        return static_cast<double>(count) / static_cast<double>(runs);
    }

    [[nodiscard]] double quantile_at(double q) const {
        if (sorted_values.empty()) return std::nan("");
        const auto idx = static_cast<std::size_t>(
            std::clamp(q * static_cast<double>(runs) - 0.5, 0.0,
                       static_cast<double>(runs - 1)));
        return sorted_values[idx];
    }

    [[nodiscard]] double interquartile_range() const {
        return quantile_at(0.75) - quantile_at(0.25);
    }
};

inline Histogram make_histogram(std::int64_t d, std::int64_t n, std::vector<double> values) {
    if (values.empty()) throw invalid_input("make_histogram: values must be non-empty");
    Histogram h;
    h.d = d;
    h.n = n;
    h.runs = static_cast<std::int64_t>(values.size());
    std::sort(values.begin(), values.end());
    h.sorted_values = std::move(values);
    return h;
}

// sup_x |H1(x) - H2(x)|, evaluated over the merged jump points.
inline double ks_distance(const Histogram& h1, const Histogram& h2) {
    if (h1.d != h2.d)
        throw invalid_input("ks_distance: histograms must describe the same degree d");
    const auto& a = h1.sorted_values;
    const auto& b = h2.sorted_values;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double ks = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        ks = std::max(ks, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return ks;
}

// Equal-width binning on [0, hi]; masses sum to exactly 1 (last bin is
// right-closed so the maximum lands inside).
struct HistogramBins {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> mass;
};

inline HistogramBins bin_histogram(const Histogram& h, std::int64_t bin_count = 50,
                                   double hi = -1.0) {
    if (bin_count < 1) throw invalid_input("bin_histogram: bin_count must be >= 1");
    if (hi <= 0.0) {
        const double max_observed = h.sorted_values.back();
        hi = max_observed > 0.0 ? 1.1 * max_observed : 1.0 / static_cast<double>(bin_count);
    }
    HistogramBins bins;
    const auto count = static_cast<std::size_t>(bin_count);
    bins.lower.resize(count);
    bins.upper.resize(count);
    bins.mass.assign(count, 0.0);
    for (std::size_t b = 0; b < count; ++b) {
        bins.lower[b] = hi * static_cast<double>(b) / static_cast<double>(bin_count);
        bins.upper[b] = hi * static_cast<double>(b + 1) / static_cast<double>(bin_count);
    }
    const double weight = 1.0 / static_cast<double>(h.runs);
    for (double v : h.sorted_values) {
        auto b = static_cast<std::int64_t>(std::floor(v / hi * static_cast<double>(bin_count)));
        b = std::clamp<std::int64_t>(b, 0, bin_count - 1);
        bins.mass[static_cast<std::size_t>(b)] += weight;
    }
    return bins;
}

} // namespace rtg
