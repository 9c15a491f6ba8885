// joint_limit.hpp — The limiting joint law of r tagged node degrees.
//
// Pieces, from exact to sampled:
//
//   f_r_factor        closed-form per-external-node factor F_r; its
//                     (n-r)-th power under the fitness expectation is the
//                     exact finite-n joint pgf of the reduced degrees.
//   finite_n_joint_pgf  Monte Carlo of that power.
//   g_r_direct        Monte Carlo of the limiting joint pgf G_r, written
//                     through order statistics and the sorting permutation.
//   sample_joint_limit  draws (D_1..D_r) from the limit law by cumulative
//                     sums of independent Poisson counts over intensity
//                     increments between consecutive order statistics. An
//                     Abel summation of the cumulative sums shows this
//                     construction has pgf exactly G_r; the test suite
//                     additionally validates it numerically on a z-grid.
//   joint_moment      m_r(d) = P{D_1 = ... = D_r = d}. The all-equal event
//                     forces the first Poisson count to d and the rest to 0,
//                     which collapses the law onto (min, max) of the fitness
//                     sample:  m_r(d) = E[ lam(min)^d/d! * exp(-lam(max)) ],
//                     integrated over the (min, max) density
//                     r(r-1) (F(v)-F(u))^{r-2} f(u) f(v).
//   char_fn           truncated moment series of the limiting degree
//                     fraction, truncation order set by the exp-series tail.
//   pi_mean_var       mean m_1 and variance m_2 - m_1^2 of that fraction.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtg/errors.hpp"
#include "rtg/fitness.hpp"
#include "rtg/nodal_laws.hpp"
#include "rtg/quadrature.hpp"
#include "rtg/rng.hpp"

namespace rtg {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

namespace detail {

inline void check_unit_range(std::span<const double> z, const char* where) {
    for (double v : z)
        if (!(v >= 0.0 && v <= 1.0))
            throw invalid_input(std::string(where) + ": z components must lie in [0,1]");
}

inline McEstimate finish_mean(long double sum, long double sum_sq, std::int64_t n) {
    const double mean = static_cast<double>(sum / n);
    double var = 0.0;
    if (n > 1) {
        var = static_cast<double>((sum_sq - sum * sum / n) / (n - 1));
        var = std::max(var, 0.0);
    }
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

// Largest double below 1; quadrature nodes may round onto the endpoint.
inline constexpr double kBelowOne = 0x1.fffffffffffffp-1;

} // namespace detail

// Closed form of F_r(theta; z; x): the product of z_s over coordinates with
// x_s > theta times a telescoping sum over the ascending arrangement of the
// remaining coordinates, with boundary conventions F(theta - (-inf)) = 1 and
// F(theta - (+inf)) = 0.
inline double f_r_factor(const FitnessModel& model, double theta, std::span<const double> z,
                         std::span<const double> x) {
    if (z.size() != x.size() || z.empty())
        throw invalid_input("f_r_factor: z and x must have equal positive length");
    detail::check_unit_range(z, "f_r_factor");

    double prefactor = 1.0;
    std::vector<std::pair<double, std::size_t>> below;
    below.reserve(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (x[s] > theta)
            prefactor *= z[s];
        else
            below.emplace_back(x[s], s);
    }
    std::sort(below.begin(), below.end());

    const std::size_t m = below.size();
    double sum = 0.0;
    double suffix_product = 1.0;
    double cdf_above = 0.0;   // F(theta - x) at ordered position t+1
    for (std::size_t t = m;; --t) {
        const double cdf_here = (t == 0) ? 1.0 : model.cdf(theta - below[t - 1].first);
        sum += suffix_product * (cdf_here - cdf_above);
        if (t == 0) break;
        suffix_product *= z[below[t - 1].second];
        cdf_above = cdf_here;
    }
    return prefactor * sum;
}

// Monte Carlo estimate of the exact finite-n joint pgf of the r reduced
// degrees: E[F_r(theta; z; xi_1..xi_r)^{n-r}].
inline McEstimate finite_n_joint_pgf(const FitnessModel& model, std::int64_t n, double theta,
                                     std::span<const double> z, std::int64_t samples,
                                     std::uint64_t seed) {
    const auto r = static_cast<std::int64_t>(z.size());
    if (r < 1) throw invalid_input("finite_n_joint_pgf: z must be non-empty");
    if (r >= n) throw invalid_input("finite_n_joint_pgf: requires r < n");
    if (samples < 1) throw invalid_input("finite_n_joint_pgf: samples must be >= 1");
    detail::check_unit_range(z, "finite_n_joint_pgf");

    RngStream rng(seed, 0x66696E6974ULL);
    std::vector<double> x(static_cast<std::size_t>(r));
    const double power = static_cast<double>(n - r);
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t i = 0; i < samples; ++i) {
        for (auto& v : x) v = model.quantile(rng.uniform01());
        const double factor = f_r_factor(model, theta, z, x);
        const double value = std::pow(factor, power);
        sum += value;
        sum_sq += static_cast<long double>(value) * value;
    }
    return detail::finish_mean(sum, sum_sq, samples);
}

namespace detail {

// Sorting permutation by (value, index); ties are measure-zero but resolved
// deterministically.
inline void sort_order(std::span<const double> values, std::vector<std::uint8_t>& order) {
    const auto r = static_cast<std::uint8_t>(values.size());
    order.resize(r);
    std::iota(order.begin(), order.end(), std::uint8_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint8_t a, std::uint8_t b) {
        return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
}

// Exponent of G_r for one fitness draw: sum over ranks t of
// (1 - z_{alpha(t)}) * prod_{s>t} z_{alpha(s)} * lam(xi_{(t)}).
inline double gr_exponent(std::span<const double> z, std::span<const double> ordered_intensity,
                          std::span<const std::uint8_t> order) {
    double exponent = 0.0;
    double suffix = 1.0;
    for (std::size_t t = order.size(); t-- > 0;) {
        exponent += (1.0 - z[order[t]]) * suffix * ordered_intensity[t];
        suffix *= z[order[t]];
    }
    return exponent;
}

} // namespace detail

// Monte Carlo of the limiting joint pgf G_r(z).
inline McEstimate g_r_direct(const FitnessModel& model, std::span<const double> z,
                             std::int64_t samples, std::uint64_t seed) {
    const std::size_t r = z.size();
    if (r < 1) throw invalid_input("g_r_direct: z must be non-empty");
    if (samples < 1) throw invalid_input("g_r_direct: samples must be >= 1");
    detail::check_unit_range(z, "g_r_direct");

    RngStream rng(seed, 0x67725F6469ULL);
    std::vector<double> x(r), lam(r);
    std::vector<std::uint8_t> order;
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t i = 0; i < samples; ++i) {
        for (auto& v : x) v = model.quantile(rng.uniform01());
        detail::sort_order(x, order);
        for (std::size_t t = 0; t < r; ++t) lam[t] = model.intensity(x[order[t]]);
        const double value = std::exp(-detail::gr_exponent(z, lam, order));
        sum += value;
        sum_sq += static_cast<long double>(value) * value;
    }
    return detail::finish_mean(sum, sum_sq, samples);
}

struct JointLimitSample {
    std::int64_t r = 0;
    std::vector<double> fitness;              // original order
    std::vector<double> ordered;              // ascending
    std::vector<std::uint8_t> order;          // order[t] = original index of rank t
    std::vector<double> increments;           // intensity increments per rank
    std::vector<std::int64_t> degrees;        // original order
};

// Draw (D_1..D_r) from the limit law: independent Poisson counts on the
// intensity increments, cumulated along the ranks.
inline JointLimitSample sample_joint_limit(const FitnessModel& model, std::int64_t r,
                                           RngStream& rng) {
    if (r < 1) throw invalid_input("sample_joint_limit: r must be >= 1");

    JointLimitSample s;
    s.r = r;
    s.fitness.resize(static_cast<std::size_t>(r));
    for (auto& v : s.fitness) v = model.quantile(rng.uniform01());
    detail::sort_order(s.fitness, s.order);

    s.ordered.resize(s.fitness.size());
    s.increments.resize(s.fitness.size());
    s.degrees.assign(s.fitness.size(), 0);
    double previous_intensity = 0.0;
    std::int64_t cumulative = 0;
    for (std::size_t t = 0; t < s.fitness.size(); ++t) {
        s.ordered[t] = s.fitness[s.order[t]];
        const double lam = model.intensity(s.ordered[t]);
        s.increments[t] = std::max(lam - previous_intensity, 0.0);
        previous_intensity = lam;
        cumulative += rng.poisson(s.increments[t]);
        s.degrees[s.order[t]] = cumulative;
    }
    return s;
}

// Degree tuples from many sampler draws, stored row-major so a z-grid can be
// evaluated against one shared batch.
struct JointSampleBatch {
    std::int64_t r = 0;
    std::int64_t samples = 0;
    std::vector<std::int64_t> degrees;   // samples x r
};

inline JointSampleBatch draw_joint_sample_batch(const FitnessModel& model, std::int64_t r,
                                                std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) throw invalid_input("draw_joint_sample_batch: samples must be >= 1");
    JointSampleBatch batch;
    batch.r = r;
    batch.samples = samples;
    batch.degrees.resize(static_cast<std::size_t>(r * samples));
    RngStream rng(seed, 0x73616D706CULL);
    for (std::int64_t i = 0; i < samples; ++i) {
        const JointLimitSample s = sample_joint_limit(model, r, rng);
        std::copy(s.degrees.begin(), s.degrees.end(),
                  batch.degrees.begin() + static_cast<std::ptrdiff_t>(i * r));
    }
    return batch;
}

// Empirical pgf E[prod z_s^{D_s}] over a stored batch.
inline McEstimate batch_pgf(const JointSampleBatch& batch, std::span<const double> z) {
    if (static_cast<std::int64_t>(z.size()) != batch.r)
        throw invalid_input("batch_pgf: z length must equal batch.r");
    detail::check_unit_range(z, "batch_pgf");
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t i = 0; i < batch.samples; ++i) {
        double value = 1.0;
        for (std::int64_t s = 0; s < batch.r; ++s) {
            const auto deg = batch.degrees[static_cast<std::size_t>(i * batch.r + s)];
            value *= std::pow(z[static_cast<std::size_t>(s)], static_cast<double>(deg));
        }
        sum += value;
        sum_sq += static_cast<long double>(value) * value;
    }
    return detail::finish_mean(sum, sum_sq, batch.samples);
}

// Ordered intensities and sorting permutations from many fitness draws, the
// G_r analogue of JointSampleBatch.
struct GrSampleBatch {
    std::int64_t r = 0;
    std::int64_t samples = 0;
    std::vector<double> ordered_intensity;   // samples x r
    std::vector<std::uint8_t> order;         // samples x r
};

inline GrSampleBatch draw_gr_batch(const FitnessModel& model, std::int64_t r,
                                   std::int64_t samples, std::uint64_t seed) {
    if (r < 1) throw invalid_input("draw_gr_batch: r must be >= 1");
    if (samples < 1) throw invalid_input("draw_gr_batch: samples must be >= 1");
    GrSampleBatch batch;
    batch.r = r;
    batch.samples = samples;
    batch.ordered_intensity.resize(static_cast<std::size_t>(r * samples));
    batch.order.resize(static_cast<std::size_t>(r * samples));
    RngStream rng(seed, 0x67725F6469ULL);
    std::vector<double> x(static_cast<std::size_t>(r));
    std::vector<std::uint8_t> order;
    for (std::int64_t i = 0; i < samples; ++i) {
        for (auto& v : x) v = model.quantile(rng.uniform01());
        detail::sort_order(x, order);
        for (std::int64_t t = 0; t < r; ++t) {
            const auto idx = static_cast<std::size_t>(i * r + t);
            batch.order[idx] = order[static_cast<std::size_t>(t)];
            batch.ordered_intensity[idx] =
                model.intensity(x[order[static_cast<std::size_t>(t)]]);
        }
    }
    return batch;
}

inline McEstimate batch_gr(const GrSampleBatch& batch, std::span<const double> z) {
    if (static_cast<std::int64_t>(z.size()) != batch.r)
        throw invalid_input("batch_gr: z length must equal batch.r");
    detail::check_unit_range(z, "batch_gr");
    long double sum = 0.0L, sum_sq = 0.0L;
    const auto r = static_cast<std::size_t>(batch.r);
    for (std::int64_t i = 0; i < batch.samples; ++i) {
        const auto base = static_cast<std::size_t>(i) * r;
        const double value = std::exp(-detail::gr_exponent(
            z, {batch.ordered_intensity.data() + base, r}, {batch.order.data() + base, r}));
        sum += value;
        sum_sq += static_cast<long double>(value) * value;
    }
    return detail::finish_mean(sum, sum_sq, batch.samples);
}

enum class MomentMethod { quadrature, monte_carlo };

// m_r(d) = P{D_1 = ... = D_r = d} in the limit law.
//
// Quadrature integrates E[lam(min)^d/d! * exp(-lam(max))] over the (min,max)
// distribution, transformed to ordered uniforms (a, b):
//   m_r(d) = int_{0<a<b<1} exp(d log lam(Q(a)) - lgamma(d+1) - lam(Q(b)))
//            * r(r-1) (b-a)^{r-2} da db            (r >= 2; r = 1 is the
//            marginal limit pmf).
// The exp(-lam(Q(b))) factor stays inside the inner exponent so the
// integrand remains bounded for every d.
//
// budget caps total integrand evaluations (quadrature) or draws (MC).
inline Estimate joint_moment(const FitnessModel& model, std::int64_t r, std::int64_t d,
                             MomentMethod method, std::int64_t budget = 2'000'000,
                             std::uint64_t seed = 0, double abs_tol = 1e-8) {
    if (r < 1) throw invalid_input("joint_moment: r must be >= 1");
    if (d < 0) throw invalid_input("joint_moment: d must be >= 0");

    if (method == MomentMethod::monte_carlo) {
        if (budget < 1) throw invalid_input("joint_moment: monte-carlo budget must be >= 1");
        RngStream rng(seed, 0x6D6F6D656EULL);
        std::int64_t hits = 0;
        for (std::int64_t i = 0; i < budget; ++i) {
            const JointLimitSample s = sample_joint_limit(model, r, rng);
            hits += static_cast<std::int64_t>(
                std::all_of(s.degrees.begin(), s.degrees.end(),
                            [&](std::int64_t deg) { return deg == d; }));
        }
        const double p = static_cast<double>(hits) / static_cast<double>(budget);
        return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(budget))};
    }

    if (r == 1) return limit_nodal_pmf(model, d, abs_tol, budget);

    const double log_dfact = std::lgamma(static_cast<double>(d + 1));
    const double pair_count = static_cast<double>(r) * static_cast<double>(r - 1);
    std::int64_t remaining = budget;
    const double inner_tol = 0.1 * abs_tol;
    double inner_error_max = 0.0;

    const auto outer_integrand = [&](double b) {
        const double bb = std::min(b, detail::kBelowOne);
        const double lam_max = model.intensity(model.quantile(bb));
        if (!std::isfinite(lam_max)) return 0.0;
        const auto inner_integrand = [&](double a) {
            const double aa = std::min(a, detail::kBelowOne);
            const double lam_min = model.intensity(model.quantile(aa));
            double log_term = -log_dfact - lam_max;
            if (d > 0) {
                if (!(lam_min > 0.0)) return 0.0;
                log_term += static_cast<double>(d) * std::log(lam_min);
            }
            if (r > 2) {
                const double gap = b - a;
                if (gap <= 0.0) return 0.0;
                log_term += static_cast<double>(r - 2) * std::log(gap);
            }
            return std::exp(log_term);
        };
        if (b <= 0.0) return 0.0;
        const QuadratureResult inner =
            integrate(inner_integrand, 0.0, b, inner_tol, std::max<std::int64_t>(remaining, 15));
        remaining -= inner.evaluations;
        if (remaining <= 0)
            throw numerical_failure("joint_moment: evaluation budget exhausted", 0.0, 0.0);
        inner_error_max = std::max(inner_error_max, inner.error_estimate);
        return pair_count * inner.value;
    };

    const QuadratureResult outer = integrate(outer_integrand, 0.0, 1.0, 0.9 * abs_tol,
                                             std::numeric_limits<std::int64_t>::max());
    return {outer.value, outer.error_estimate + pair_count * inner_error_max};
}

struct MomentSequence {
    std::int64_t d = 0;
    std::vector<double> values;   // m_1 .. m_R
    std::vector<double> errors;
    MomentMethod method = MomentMethod::quadrature;
};

inline MomentSequence moment_sequence(const FitnessModel& model, std::int64_t d,
                                      std::int64_t r_max, MomentMethod method,
                                      std::int64_t budget_per_entry = 2'000'000,
                                      std::uint64_t seed = 0, double abs_tol = 1e-8) {
    if (r_max < 1) throw invalid_input("moment_sequence: r_max must be >= 1");
    MomentSequence seq;
    seq.d = d;
    seq.method = method;
    for (std::int64_t r = 1; r <= r_max; ++r) {
        const Estimate e =
            joint_moment(model, r, d, method, budget_per_entry, derive_seed(seed, static_cast<std::uint64_t>(r)), abs_tol);
        seq.values.push_back(e.value);
        seq.errors.push_back(e.error);
    }
    return seq;
}

struct CharFnEval {
    std::int64_t d = 0;
    double t = 0.0;
    std::complex<double> value{1.0, 0.0};
    std::int64_t truncation_order = 0;   // R actually used
    double tail_bound = 0.0;             // series tail achieved (<= epsilon)
    double moment_error = 0.0;           // propagated quadrature error
};

namespace detail {

// Tail of the exponential series: sum_{r > R} |t|^r / r!.
inline double exp_series_tail(double abs_t, std::int64_t R) {
    double term = 1.0;
    for (std::int64_t r = 1; r <= R; ++r) term *= abs_t / static_cast<double>(r);
    // term == |t|^R / R!
    double tail = 0.0;
    double current = term;
    for (std::int64_t r = R + 1; r < R + 400; ++r) {
        current *= abs_t / static_cast<double>(r);
        tail += current;
        if (current < tail * 1e-18 + 1e-300) break;
    }
    return tail;
}

} // namespace detail

inline constexpr std::int64_t kCharFnTruncationCap = 40;

// Truncated power series of the characteristic function of the limiting
// degree fraction at d. The truncation order is the smallest R whose series
// tail is below epsilon; exceeding the cap of 40 is an error, never a silent
// truncation.
inline CharFnEval char_fn(const FitnessModel& model, std::int64_t d, double t, double epsilon,
                          std::int64_t quadrature_budget = 4'000'000) {
    if (!(epsilon > 0.0)) throw invalid_input("char_fn: epsilon must be > 0");
    if (d < 0) throw invalid_input("char_fn: d must be >= 0");

    const double abs_t = std::abs(t);
    std::int64_t truncation = -1;
    double tail = 0.0;
    for (std::int64_t R = 0; R <= kCharFnTruncationCap; ++R) {
        tail = detail::exp_series_tail(abs_t, R);
        if (tail <= epsilon) {
            truncation = R;
            break;
        }
    }
    if (truncation < 0)
        throw numerical_failure("char_fn: series needs truncation order beyond " +
                                std::to_string(kCharFnTruncationCap) + " for |t|=" +
                                std::to_string(abs_t) + ", epsilon=" + std::to_string(epsilon));

    CharFnEval eval;
    eval.d = d;
    eval.t = t;
    eval.truncation_order = truncation;
    eval.tail_bound = tail;

    const double moment_tol = std::max(epsilon / (8.0 * std::exp(abs_t)), 1e-12);
    std::complex<double> acc(1.0, 0.0);
    std::complex<double> coefficient(1.0, 0.0);   // (it)^r / r!
    const std::complex<double> it(0.0, t);
    double moment_error = 0.0;
    for (std::int64_t r = 1; r <= truncation; ++r) {
        coefficient *= it / static_cast<double>(r);
        const Estimate m = joint_moment(model, r, d, MomentMethod::quadrature,
                                        quadrature_budget, 0, moment_tol);
        acc += coefficient * m.value;
        moment_error += std::abs(coefficient) * m.error;
    }
    eval.value = acc;
    eval.moment_error = moment_error;
    return eval;
}

struct PiMoments {
    double mean = 0.0;
    double variance = 0.0;
    double mean_error = 0.0;
    double variance_error = 0.0;
};

// Mean and variance of the limiting degree fraction at d.
inline PiMoments pi_mean_var(const FitnessModel& model, std::int64_t d,
                             std::int64_t budget = 2'000'000, double abs_tol = 1e-9) {
    const Estimate m1 = joint_moment(model, 1, d, MomentMethod::quadrature, budget, 0, abs_tol);
    const Estimate m2 = joint_moment(model, 2, d, MomentMethod::quadrature, budget, 0, abs_tol);
    PiMoments out;
    out.mean = m1.value;
    out.mean_error = m1.error;
    out.variance = m2.value - m1.value * m1.value;
    out.variance_error = m2.error + 2.0 * std::abs(m1.value) * m1.error;
    return out;
}

} // namespace rtg
