// quadrature.hpp — Adaptive Gauss–Kronrod (7/15) integration on finite intervals.
//
// Globally adaptive: a heap of subintervals ordered by local error estimate,
// worst interval bisected until the summed estimate meets the absolute
// tolerance or the evaluation budget runs out. Probability-space integrands
// here are smooth once atoms and kinks are split off by the caller, so the
// plain |K15 - G7| estimate is already conservative.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "rtg/errors.hpp"

namespace rtg {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
};

namespace detail {

// Nodes/weights of the 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double kronrod = 0.0;
    double gauss = 0.0;
    for (std::size_t j = 0; j < 7; ++j) {
        const double offset = half * kKronrodNodes[j];
        const double sum = f(center - offset) + f(center + offset);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
    }
    const double fc = f(center);
    kronrod += kKronrodWeights[7] * fc;
    gauss += kGaussWeights[3] * fc;

    const double value = half * kronrod;
    const double error = std::abs(half * (kronrod - gauss));
    return Panel{a, b, value, error};
}

} // namespace detail

// Integrate f over [a, b] to absolute tolerance abs_tol with at most
// max_evaluations calls of f. Throws numerical_failure (carrying the partial
// result and achieved error) when the budget is exhausted first.
template <typename F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol,
                           std::int64_t max_evaluations = 1'000'000) {
    if (!(abs_tol > 0.0)) throw invalid_input("integrate: abs_tol must be positive");
    if (a == b) return {0.0, 0.0, 0};

    std::priority_queue<detail::Panel> panels;
    std::int64_t evals = 15;
    panels.push(detail::gauss_kronrod_15(f, a, b));
    double total_value = panels.top().value;
    double total_error = panels.top().error;

    while (total_error > abs_tol) {
        if (evals + 30 > max_evaluations || panels.empty()) {
            throw numerical_failure(
                "integrate: evaluation budget " + std::to_string(max_evaluations) +
                    " exhausted at error " + std::to_string(total_error) +
                    " (target " + std::to_string(abs_tol) + ")",
                total_value, total_error);
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at floating-point resolution; accept its estimate as is.
            total_error = std::max(total_error - worst.error, 0.0);
            continue;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        evals += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    return {total_value, total_error, evals};
}

// Expectation over a probability mass on (0, 1): E[g(U)]. Integrand values
// come from quantile transforms, so the domain is always the unit interval.
template <typename F>
QuadratureResult integrate_unit(const F& g, double abs_tol,
                                std::int64_t max_evaluations = 1'000'000) {
    return integrate(g, 0.0, 1.0, abs_tol, max_evaluations);
}

} // namespace rtg
