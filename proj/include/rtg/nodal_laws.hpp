// nodal_laws.hpp — Degree law of a single node: exact finite-n evaluation,
// the conditional-Poisson limit, and the exponential-fitness special case.
//
// Conditionally on its fitness x, a node's degree among n-1 peers is
// Binomial(n-1, tail(theta - x)). Expectations over the fitness are computed
// as integrals over the uniform variable u with x = quantile(u):
//
//   finite-n pmf:  int_0^F(theta) BinPmf(d; n-1, tail(theta - Q(u))) du
//                  + (1 - F(theta)) * [d == n-1]
//   limit pmf:     int_0^1 exp(d*log lam(Q(u)) - lgamma(d+1) - lam(Q(u))) du
//
// The second term of the finite-n pmf is the atom at fitness > theta, where
// the node is adjacent to everyone. Binomial terms are evaluated through
// log-gamma so n = 1e5 stays well inside double range.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "rtg/errors.hpp"
#include "rtg/fitness.hpp"
#include "rtg/quadrature.hpp"

namespace rtg {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline double log_binomial_coefficient(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n + 1)) -
           std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

// Binomial(trials, p) pmf at k, safe at p = 0 and p = 1.
inline double binomial_pmf(std::int64_t trials, std::int64_t k, double p, double log_coeff) {
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == trials ? 1.0 : 0.0;
    const double log_term = log_coeff + static_cast<double>(k) * std::log(p) +
                            static_cast<double>(trials - k) * std::log1p(-p);
    return std::exp(log_term);
}

} // namespace detail

// P{D_n(theta) = d} for one node of an n-node graph.
inline Estimate finite_n_nodal_pmf(const FitnessModel& model, std::int64_t n, double theta,
                                   std::int64_t d, double abs_tol = 1e-8,
                                   std::int64_t max_evaluations = 1'000'000) {
    if (n < 2) throw invalid_input("finite_n_nodal_pmf: n must be >= 2");
    if (d < 0 || d > n - 1)
        throw invalid_input("finite_n_nodal_pmf: d must lie in [0, n-1]");

    const double u_atom = std::clamp(model.cdf(theta), 0.0, 1.0);
    const double atom = (d == n - 1) ? 1.0 - u_atom : 0.0;
    if (u_atom <= 0.0) return {atom, 0.0};

    const double log_coeff = detail::log_binomial_coefficient(n - 1, d);
    const auto integrand = [&](double u) {
        const double p = model.tail(theta - model.quantile(u));
        return detail::binomial_pmf(n - 1, d, p, log_coeff);
    };
    const QuadratureResult q = integrate(integrand, 0.0, u_atom, abs_tol, max_evaluations);
    return {q.value + atom, q.error_estimate};
}

// E[z^{D_n(theta)}] for z in [0,1], atom term included exactly.
inline Estimate finite_n_nodal_pgf(const FitnessModel& model, std::int64_t n, double theta,
                                   double z, double abs_tol = 1e-8,
                                   std::int64_t max_evaluations = 1'000'000) {
    if (n < 2) throw invalid_input("finite_n_nodal_pgf: n must be >= 2");
    if (!(z >= 0.0 && z <= 1.0)) throw invalid_input("finite_n_nodal_pgf: z must lie in [0,1]");

    const double u_atom = std::clamp(model.cdf(theta), 0.0, 1.0);
    const double atom = (1.0 - u_atom) * std::pow(z, static_cast<double>(n - 1));
    if (u_atom <= 0.0) return {atom, 0.0};

    const auto integrand = [&](double u) {
        const double p = model.tail(theta - model.quantile(u));
        const double base = 1.0 - (1.0 - z) * p;
        if (base <= 0.0) return 0.0;
        return std::exp(static_cast<double>(n - 1) * std::log(base));
    };
    const QuadratureResult q = integrate(integrand, 0.0, u_atom, abs_tol, max_evaluations);
    return {q.value + atom, q.error_estimate};
}

// Limit pmf E[lam(xi)^d / d! * exp(-lam(xi))]; cached per (model, d, tol)
// for the built-in families.
inline Estimate limit_nodal_pmf(const FitnessModel& model, std::int64_t d,
                                double abs_tol = 1e-8,
                                std::int64_t max_evaluations = 1'000'000) {
    if (d < 0) throw invalid_input("limit_nodal_pmf: d must be >= 0");

    using Key = std::tuple<int, double, double, double, std::int64_t, double>;
    static std::map<Key, Estimate> cache;
    static std::mutex cache_mutex;

    const bool cacheable = model.family() != FitnessFamily::custom;
    Key key{static_cast<int>(model.family()), model.rate(), model.scale(), model.shape(),
            d, abs_tol};
    if (cacheable) {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const double log_dfact = std::lgamma(static_cast<double>(d + 1));
    const auto integrand = [&](double u) {
        const double lam = model.intensity(model.quantile(u));
        if (lam <= 0.0) return d == 0 ? 1.0 : 0.0;
        return std::exp(static_cast<double>(d) * std::log(lam) - log_dfact - lam);
    };
    const QuadratureResult q = integrate_unit(integrand, abs_tol, max_evaluations);
    const Estimate result{q.value, q.error_estimate};
    if (cacheable) {
        std::lock_guard lock(cache_mutex);
        cache[key] = result;
    }
    return result;
}

// Exponential-case limit pmf, evaluated through its own substitutions:
//   d = 0, 1:  int_0^1 t^{-d} exp(-1/t) dt / d!          (t = exp(-x))
//   d >= 2:    int_1^infty t^{d-2} exp(-t) dt / d!       (t = exp(x))
// The default tolerance tightens with d so the value stays meaningful next
// to the 1/d! approximation bound.
inline Estimate fujihara_pmf(std::int64_t d, double abs_tol = 0.0,
                             std::int64_t max_evaluations = 1'000'000) {
    if (d < 0) throw invalid_input("fujihara_pmf: d must be >= 0");
    const double log_dfact = std::lgamma(static_cast<double>(d + 1));
    if (abs_tol <= 0.0)
        abs_tol = std::clamp(0.02 * std::exp(-log_dfact), 1e-14, 1e-8);

    QuadratureResult q;
    if (d <= 1) {
        const auto integrand = [&](double t) {
            if (t <= 0.0) return 0.0;
            return std::exp(-1.0 / t - static_cast<double>(d) * std::log(t) - log_dfact);
        };
        q = integrate(integrand, 0.0, 1.0, abs_tol, max_evaluations);
    } else {
        // Map [1, infty) to s in [0, 1): t = 1 + s/(1-s).
        const auto integrand = [&](double s) {
            if (s >= 1.0) return 0.0;
            const double t = 1.0 + s / (1.0 - s);
            const double log_jacobian = -2.0 * std::log1p(-s);
            const double log_term =
                static_cast<double>(d - 2) * std::log(t) - t + log_jacobian - log_dfact;
            return std::exp(log_term);
        };
        q = integrate(integrand, 0.0, 1.0, abs_tol, max_evaluations);
    }
    return {q.value, q.error_estimate};
}

// The 1/(d(d-1)) approximation and its error bound 1/d!; defined for d >= 2.
inline std::pair<double, double> fujihara_approx(std::int64_t d) {
    if (d < 2) throw invalid_input("fujihara_approx: defined for d >= 2 only");
    const double approximation = 1.0 / (static_cast<double>(d) * static_cast<double>(d - 1));
    const double bound = std::exp(-std::lgamma(static_cast<double>(d + 1)));
    return {approximation, bound};
}

// Table of nodal laws for the `limits` CSV surface.
struct NodalPmfRow {
    std::int64_t d;
    Estimate finite_n;
    Estimate limit;
    double approximation;   // NaN for d < 2
    double bound;           // NaN for d < 2
};

inline std::vector<NodalPmfRow> nodal_pmf_table(const FitnessModel& model, std::int64_t n,
                                                std::int64_t d_max, double abs_tol = 1e-8,
                                                std::int64_t max_evaluations = 1'000'000) {
    if (d_max < 0) throw invalid_input("nodal_pmf_table: d_max must be >= 0");
    const double theta = model.scaling_threshold(n);
    std::vector<NodalPmfRow> rows;
    rows.reserve(static_cast<std::size_t>(d_max) + 1);
    for (std::int64_t d = 0; d <= d_max; ++d) {
        NodalPmfRow row{};
        row.d = d;
        row.finite_n = finite_n_nodal_pmf(model, n, theta, d, abs_tol, max_evaluations);
        row.limit = limit_nodal_pmf(model, d, abs_tol, max_evaluations);
        if (d >= 2) {
            auto [approx, bound] = fujihara_approx(d);
            row.approximation = approx;
            row.bound = bound;
        } else {
            row.approximation = std::nan("");
            row.bound = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace rtg
