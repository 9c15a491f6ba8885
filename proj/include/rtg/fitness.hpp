// fitness.hpp — Fitness distributions, their intensity maps, and the
// threshold scaling that produces nontrivial degree limits.
//
// A model bundles five evaluators:
//   cdf(x), tail(x) = 1 - cdf(x), quantile(u),
//   intensity(x)          — the limit of n * tail(threshold(n) - x),
//   scaling_threshold(n)  — the threshold sequence that realizes that limit.
//
// Built-in families:
//   exponential(rate):   tail(x) = exp(-rate*x),  intensity(x) = exp(rate*x),
//                        threshold(n) = log(n)/rate
//   pareto(scale,shape): tail(x) = (scale/(scale+x))^shape, intensity(x) = 1,
//                        threshold(n) = scale * n^(1/shape)
// Custom models supply the evaluators explicitly; there is no numerical
// differentiation or root-finding fallback. A custom model may omit
// individual evaluators, in which case the operations needing them throw
// unsupported_operation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtg/errors.hpp"
#include "rtg/rng.hpp"

namespace rtg {

enum class FitnessFamily { exponential, pareto, custom };

inline const char* family_name(FitnessFamily f) {
    switch (f) {
        case FitnessFamily::exponential: return "exponential";
        case FitnessFamily::pareto: return "pareto";
        case FitnessFamily::custom: return "custom";
    }
    return "?";
}

struct CustomFitnessSpec {
    std::string name = "custom";
    std::function<double(double)> cdf;
    std::function<double(double)> tail;
    std::function<double(double)> quantile;   // optional; sampling needs it
    std::function<double(double)> intensity;
    std::function<double(std::int64_t)> scaling;
};

class FitnessModel {
public:
    static FitnessModel exponential(double rate) {
        if (!(rate > 0.0)) throw invalid_input("exponential fitness: rate must be > 0");
        FitnessModel m;
        m.family_ = FitnessFamily::exponential;
        m.rate_ = rate;
        return m;
    }

    static FitnessModel pareto(double scale, double shape) {
        if (!(scale > 0.0)) throw invalid_input("pareto fitness: scale must be > 0");
        if (!(shape > 0.0)) throw invalid_input("pareto fitness: shape must be > 0");
        FitnessModel m;
        m.family_ = FitnessFamily::pareto;
        m.scale_ = scale;
        m.shape_ = shape;
        return m;
    }

    static FitnessModel custom(CustomFitnessSpec spec) {
        if (!spec.cdf || !spec.tail || !spec.intensity || !spec.scaling)
            throw invalid_input("custom fitness: cdf, tail, intensity and scaling evaluators are required");
        FitnessModel m;
        m.family_ = FitnessFamily::custom;
        m.custom_ = std::move(spec);
        return m;
    }

    [[nodiscard]] FitnessFamily family() const noexcept { return family_; }
    [[nodiscard]] double rate() const noexcept { return rate_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double shape() const noexcept { return shape_; }

    // P{xi <= x}; zero on the non-positive axis.
    [[nodiscard]] double cdf(double x) const {
        switch (family_) {
            case FitnessFamily::exponential:
                return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
            case FitnessFamily::pareto:
                return x <= 0.0 ? 0.0 : -std::expm1(-shape_ * std::log1p(x / scale_));
            case FitnessFamily::custom:
                return custom_.cdf(x);
        }
        return 0.0;
    }

    // P{xi > x} = 1 - cdf(x), computed without cancellation.
    [[nodiscard]] double tail(double x) const {
        switch (family_) {
            case FitnessFamily::exponential:
                return x <= 0.0 ? 1.0 : std::exp(-rate_ * x);
            case FitnessFamily::pareto:
                return x <= 0.0 ? 1.0 : std::exp(-shape_ * std::log1p(x / scale_));
            case FitnessFamily::custom:
                return custom_.tail(x);
        }
        return 0.0;
    }

    // Inverse cdf on [0, 1).
    [[nodiscard]] double quantile(double u) const {
        if (!(u >= 0.0 && u < 1.0)) throw invalid_input("quantile: u must lie in [0,1)");
        switch (family_) {
            case FitnessFamily::exponential:
                return -std::log1p(-u) / rate_;
            case FitnessFamily::pareto:
                return scale_ * std::expm1(-std::log1p(-u) / shape_);
            case FitnessFamily::custom:
                if (!custom_.quantile)
                    throw unsupported_operation("custom fitness model has no quantile evaluator");
                return custom_.quantile(u);
        }
        return 0.0;
    }

    [[nodiscard]] bool has_quantile() const noexcept {
        return family_ != FitnessFamily::custom || static_cast<bool>(custom_.quantile);
    }

    // Limit intensity at x >= 0; non-negative and non-decreasing.
    [[nodiscard]] double intensity(double x) const {
        if (x < 0.0) throw invalid_input("intensity: x must be >= 0");
        switch (family_) {
            case FitnessFamily::exponential: return std::exp(rate_ * x);
            case FitnessFamily::pareto: return 1.0;
            case FitnessFamily::custom: return custom_.intensity(x);
        }
        return 0.0;
    }

    // Threshold sequence; real-valued, strictly increasing, divergent.
    [[nodiscard]] double scaling_threshold(std::int64_t n) const {
        if (n < 1) throw invalid_input("scaling_threshold: n must be >= 1");
        switch (family_) {
            case FitnessFamily::exponential:
                return std::log(static_cast<double>(n)) / rate_;
            case FitnessFamily::pareto:
                return scale_ * std::pow(static_cast<double>(n), 1.0 / shape_);
            case FitnessFamily::custom:
                return custom_.scaling(n);
        }
        return 0.0;
    }

    [[nodiscard]] std::string describe() const {
        switch (family_) {
            case FitnessFamily::exponential:
                return "exponential(rate=" + std::to_string(rate_) + ")";
            case FitnessFamily::pareto:
                return "pareto(scale=" + std::to_string(scale_) +
                       ",shape=" + std::to_string(shape_) + ")";
            case FitnessFamily::custom:
                return custom_.name;
        }
        return "?";
    }

private:
    FitnessModel() = default;

    FitnessFamily family_ = FitnessFamily::exponential;
    double rate_ = 1.0;
    double scale_ = 1.0;
    double shape_ = 1.0;
    CustomFitnessSpec custom_;
};

// i.i.d. draws via the inverse-cdf transform; deterministic given the stream.
inline std::vector<double> sample_fitness(const FitnessModel& model, RngStream& rng,
                                          std::int64_t count) {
    if (count < 1) throw invalid_input("sample_fitness: count must be >= 1");
    if (!model.has_quantile())
        throw unsupported_operation("sample_fitness: model has no quantile evaluator");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (auto& v : out) v = model.quantile(rng.uniform01());
    return out;
}

// Convergence evidence for the scaling: values n * tail(threshold(n) - x)
// against the claimed intensity, reported per grid point.
struct AssumptionReport {
    struct Entry {
        double x;
        std::int64_t n;
        double scaled_tail;   // n * tail(threshold(n) - x)
        double intensity;     // claimed limit at x
        double residual;      // |scaled_tail - intensity|
    };
    std::vector<Entry> entries;
    std::vector<double> max_residual_per_n;   // aligned with n_grid order
    std::vector<std::int64_t> n_grid;
    // Smallest n beyond which residuals are expected to be non-increasing;
    // 0 when the family provides no such bound (custom models).
    std::int64_t settled_n = 0;
};

inline AssumptionReport check_assumption_A(const FitnessModel& model,
                                           const std::vector<double>& x_grid,
                                           const std::vector<std::int64_t>& n_grid) {
    if (x_grid.empty() || n_grid.empty())
        throw invalid_input("check_assumption_A: grids must be non-empty");
    for (double x : x_grid)
        if (x < 0.0) throw invalid_input("check_assumption_A: x grid must be >= 0");
    for (std::int64_t n : n_grid)
        if (n < 2) throw invalid_input("check_assumption_A: n grid must be >= 2");

    AssumptionReport report;
    report.n_grid = n_grid;
    report.max_residual_per_n.assign(n_grid.size(), 0.0);
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const std::int64_t n = n_grid[j];
        const double theta = model.scaling_threshold(n);
        for (double x : x_grid) {
            const double scaled = static_cast<double>(n) * model.tail(theta - x);
            const double lambda = model.intensity(x);
            const double residual = std::abs(scaled - lambda);
            report.entries.push_back({x, n, scaled, lambda, residual});
            report.max_residual_per_n[j] = std::max(report.max_residual_per_n[j], residual);
        }
    }

    const double x_max = *std::max_element(x_grid.begin(), x_grid.end());
    switch (model.family()) {
        case FitnessFamily::exponential:
            // Exact identity n*exp(-rate*(threshold-x)) = exp(rate*x) once
            // threshold(n) >= x, i.e. n >= exp(rate*x).
            report.settled_n =
                static_cast<std::int64_t>(std::ceil(std::exp(model.rate() * x_max)));
            break;
        case FitnessFamily::pareto:
            report.settled_n = 2;
            break;
        case FitnessFamily::custom:
            report.settled_n = 0;   // reported, never asserted
            break;
    }
    return report;
}

} // namespace rtg
