// harness.hpp — Replicated graph experiments.
//
// R independent realizations of the n-node graph at the scaled threshold,
// per-run degree fractions for a chosen set of degrees, and the studies
// built on top: run-averaged pmf, per-degree histograms, stability across
// n, the factorial-moment identity check, and the non-degeneracy report.
//
// Reproducibility contract: run r draws from RngStream(master_seed, r), so
// the replication matrix is bit-identical for any worker count and any
// scheduling order. Workers hold one fitness vector each; nothing else is
// shared mutably.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rtg/errors.hpp"
#include "rtg/fitness.hpp"
#include "rtg/graph.hpp"
#include "rtg/histogram.hpp"
#include "rtg/rng.hpp"

namespace rtg {

struct ResourceLimits {
    // Cap on n * R node draws for one replication request.
    std::int64_t max_node_draws = 4'000'000'000;
};

struct ReplicationMatrix {
    std::int64_t n = 0;
    std::int64_t runs = 0;
    double theta = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::int64_t> d_set;     // ascending, unique
    std::vector<double> values;          // runs x d_set.size(), run-major

    [[nodiscard]] std::size_t d_index(std::int64_t d) const {
        const auto it = std::lower_bound(d_set.begin(), d_set.end(), d);
        if (it == d_set.end() || *it != d)
            throw invalid_input("ReplicationMatrix: degree " + std::to_string(d) +
                                " not tracked");
        return static_cast<std::size_t>(it - d_set.begin());
    }

    [[nodiscard]] double at(std::int64_t run, std::int64_t d) const {
        return values[static_cast<std::size_t>(run) * d_set.size() + d_index(d)];
    }

    [[nodiscard]] std::vector<double> column(std::int64_t d) const {
        const std::size_t idx = d_index(d);
        std::vector<double> col(static_cast<std::size_t>(runs));
        for (std::int64_t r = 0; r < runs; ++r)
            col[static_cast<std::size_t>(r)] = values[static_cast<std::size_t>(r) * d_set.size() + idx];
        return col;
    }
};

inline std::size_t resolve_thread_count(std::int64_t requested) {
    if (requested > 0) return static_cast<std::size_t>(requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// R realizations at theta = scaling_threshold(n); fractions recorded for
// each degree in d_set.
inline ReplicationMatrix run_replications(const FitnessModel& model, std::int64_t n,
                                          std::int64_t runs,
                                          std::span<const std::int64_t> d_set,
                                          std::uint64_t master_seed,
                                          std::int64_t threads = 0,
                                          const ResourceLimits& limits = {}) {
    if (n < 2) throw invalid_input("run_replications: n must be >= 2");
    if (runs < 1) throw invalid_input("run_replications: R must be >= 1");
    if (d_set.empty()) throw invalid_input("run_replications: d_set must be non-empty");
    for (std::int64_t d : d_set)
        if (d < 0) throw invalid_input("run_replications: degrees must be >= 0");
    if (n > limits.max_node_draws / runs)
        throw resource_refusal(
            "run_replications: n*R = " + std::to_string(n) + "*" + std::to_string(runs) +
            " exceeds the cap of " + std::to_string(limits.max_node_draws) +
            " node draws; reduce n or R, or raise run.max_cells");

    ReplicationMatrix matrix;
    matrix.n = n;
    matrix.runs = runs;
    matrix.theta = model.scaling_threshold(n);
    matrix.master_seed = master_seed;
    matrix.d_set.assign(d_set.begin(), d_set.end());
    std::sort(matrix.d_set.begin(), matrix.d_set.end());
    matrix.d_set.erase(std::unique(matrix.d_set.begin(), matrix.d_set.end()),
                       matrix.d_set.end());
    const std::size_t width = matrix.d_set.size();
    matrix.values.assign(static_cast<std::size_t>(runs) * width, 0.0);

    const std::size_t worker_count = std::min<std::size_t>(
        resolve_thread_count(threads), static_cast<std::size_t>(runs));
    std::atomic<std::int64_t> next_run{0};
    std::atomic<bool> census_ok{true};

    const auto worker = [&] {
        std::vector<double> fitness;
        for (;;) {
            const std::int64_t run = next_run.fetch_add(1);
            if (run >= runs) return;
            RngStream rng(master_seed, static_cast<std::uint64_t>(run));
            fitness.resize(static_cast<std::size_t>(n));
            for (auto& v : fitness) v = model.quantile(rng.uniform01());
            const std::vector<std::int64_t> degrees =
                degree_sequence_fast(fitness, matrix.theta);
            const DegreeCensus census = degree_census(degrees, matrix.theta);
            std::int64_t total = 0;
            for (const auto& [d, c] : census.counts) total += c;
            if (total != n) census_ok.store(false);
            for (std::size_t k = 0; k < width; ++k)
                matrix.values[static_cast<std::size_t>(run) * width + k] =
                    census.fraction(matrix.d_set[k]);
        }
    };

    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (std::size_t t = 0; t < worker_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (!census_ok.load())
        throw numerical_failure("run_replications: a degree census failed the partition check");
    return matrix;
}

inline Histogram empirical_histogram(const ReplicationMatrix& matrix, std::int64_t d) {
    return make_histogram(d, matrix.n, matrix.column(d));
}

// Column means: (1/R) sum_r fraction_r(d).
inline std::map<std::int64_t, double> run_averaged_pmf(const ReplicationMatrix& matrix) {
    std::map<std::int64_t, double> averages;
    for (std::int64_t d : matrix.d_set) {
        const std::vector<double> col = matrix.column(d);
        averages[d] = std::accumulate(col.begin(), col.end(), 0.0) /
                      static_cast<double>(col.size());
    }
    return averages;
}

struct SampleStats {
    double mean = 0.0;
    double std_dev = 0.0;    // NaN when fewer than 2 samples
    double std_error = 0.0;  // NaN when fewer than 2 samples
    std::int64_t count = 0;
};

inline SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.count = static_cast<std::int64_t>(values.size());
    if (s.count == 0) {
        s.mean = s.std_dev = s.std_error = std::nan("");
        return s;
    }
    long double sum = 0.0L;
    for (double v : values) sum += v;
    s.mean = static_cast<double>(sum / s.count);
    if (s.count < 2) {
        s.std_dev = s.std_error = std::nan("");
        return s;
    }
    long double ss = 0.0L;
    for (double v : values) {
        const long double delta = v - s.mean;
        ss += delta * delta;
    }
    s.std_dev = std::sqrt(static_cast<double>(ss / (s.count - 1)));
    s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.count));
    return s;
}

struct FactorialMomentCheck {
    double lhs = 0.0;          // E[prod_{s<r} (P_n(d) - s/n)]
    double rhs = 0.0;          // perm(n,r)/n^r * P{first r degrees all d}
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double combined_se = 0.0;
    std::int64_t graphs_per_side = 0;
};

// Both sides of the factorial-moment identity, estimated on independent
// graph samples. The rhs joint event reads only the first r node degrees of
// each graph, which is exact by exchangeability.
inline FactorialMomentCheck factorial_moment_check(const FitnessModel& model, std::int64_t n,
                                                   std::int64_t r, std::int64_t d,
                                                   std::int64_t mc_budget, std::uint64_t seed,
                                                   const ResourceLimits& limits = {}) {
    if (n < 2) throw invalid_input("factorial_moment_check: n must be >= 2");
    if (r < 1 || r > 5) throw invalid_input("factorial_moment_check: r must lie in [1,5]");
    if (r > n) throw invalid_input("factorial_moment_check: r must not exceed n");
    if (d < 0 || d > n - 1) throw invalid_input("factorial_moment_check: d out of range");
    if (mc_budget < 1) throw invalid_input("factorial_moment_check: budget must be >= 1");
    if (n > limits.max_node_draws / (2 * mc_budget))
        throw resource_refusal("factorial_moment_check: 2*budget*n exceeds the node-draw cap; "
                               "reduce the budget or n");

    const double theta = model.scaling_threshold(n);
    const double dn = static_cast<double>(n);
    double permutation_ratio = 1.0;   // n(n-1)...(n-r+1) / n^r
    for (std::int64_t s = 0; s < r; ++s)
        permutation_ratio *= (dn - static_cast<double>(s)) / dn;

    std::vector<double> fitness(static_cast<std::size_t>(n));
    const auto draw_degrees = [&](RngStream& rng) {
        for (auto& v : fitness) v = model.quantile(rng.uniform01());
        return degree_sequence_fast(fitness, theta);
    };

    // lhs sample
    RngStream lhs_rng(derive_seed(seed, 1), 0);
    long double lhs_sum = 0.0L, lhs_ss = 0.0L;
    for (std::int64_t g = 0; g < mc_budget; ++g) {
        const auto degrees = draw_degrees(lhs_rng);
        const auto hits = static_cast<double>(
            std::count(degrees.begin(), degrees.end(), d));
        const double fraction = hits / dn;
        double term = 1.0;
        for (std::int64_t s = 0; s < r; ++s) term *= fraction - static_cast<double>(s) / dn;
        lhs_sum += term;
        lhs_ss += static_cast<long double>(term) * term;
    }

    // rhs sample
    RngStream rhs_rng(derive_seed(seed, 2), 0);
    long double rhs_sum = 0.0L, rhs_ss = 0.0L;
    for (std::int64_t g = 0; g < mc_budget; ++g) {
        const auto degrees = draw_degrees(rhs_rng);
        bool all_d = true;
        for (std::int64_t s = 0; s < r; ++s) all_d = all_d && degrees[static_cast<std::size_t>(s)] == d;
        const double term = all_d ? permutation_ratio : 0.0;
        rhs_sum += term;
        rhs_ss += static_cast<long double>(term) * term;
    }

    const auto finalize = [&](long double sum, long double ss, double& mean, double& se) {
        mean = static_cast<double>(sum / mc_budget);
        const double var = std::max(
            static_cast<double>((ss - sum * sum / mc_budget) / (mc_budget - 1)), 0.0);
        se = std::sqrt(var / static_cast<double>(mc_budget));
    };
    FactorialMomentCheck out;
    out.graphs_per_side = mc_budget;
    finalize(lhs_sum, lhs_ss, out.lhs, out.lhs_se);
    finalize(rhs_sum, rhs_ss, out.rhs, out.rhs_se);
    out.combined_se = std::hypot(out.lhs_se, out.rhs_se);
    return out;
}

struct NondegeneracyReport {
    std::vector<std::int64_t> n_grid;
    std::int64_t runs = 0;

    struct PerDegree {
        std::int64_t d = 0;
        std::vector<double> means;            // per n
        std::vector<double> std_devs;         // per n; NaN when R < 2
        std::vector<double> ks_consecutive;   // n_grid.size() - 1 entries
        bool std_persists = false;            // std at largest n > ratio * std at smallest
        bool insufficient_replicates = false; // R < 2: verdict undefined
        [[nodiscard]] bool non_degenerate() const {
            return std_persists && !insufficient_replicates;
        }
    };
    std::vector<PerDegree> per_degree;
};

inline NondegeneracyReport nondegeneracy_report(const FitnessModel& model,
                                                std::span<const std::int64_t> n_grid,
                                                std::int64_t runs,
                                                std::span<const std::int64_t> d_set,
                                                std::uint64_t seed,
                                                double std_ratio_gate = 0.5,
                                                std::int64_t threads = 0,
                                                const ResourceLimits& limits = {}) {
    if (n_grid.empty() || d_set.empty())
        throw invalid_input("nondegeneracy_report: grids must be non-empty");

    std::vector<std::int64_t> ns(n_grid.begin(), n_grid.end());
    std::sort(ns.begin(), ns.end());

    NondegeneracyReport report;
    report.n_grid = ns;
    report.runs = runs;

    std::vector<ReplicationMatrix> matrices;
    matrices.reserve(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i)
        matrices.push_back(run_replications(model, ns[i], runs, d_set,
                                            derive_seed(seed, static_cast<std::uint64_t>(i)),
                                            threads, limits));

    for (std::int64_t d : d_set) {
        NondegeneracyReport::PerDegree entry;
        entry.d = d;
        std::vector<Histogram> histograms;
        for (const auto& matrix : matrices) {
            const SampleStats stats = sample_stats(matrix.column(d));
            entry.means.push_back(stats.mean);
            entry.std_devs.push_back(stats.std_dev);
            histograms.push_back(empirical_histogram(matrix, d));
        }
        for (std::size_t i = 0; i + 1 < histograms.size(); ++i)
            entry.ks_consecutive.push_back(ks_distance(histograms[i], histograms[i + 1]));
        entry.insufficient_replicates = runs < 2;
        if (!entry.insufficient_replicates)
            entry.std_persists =
                entry.std_devs.back() > std_ratio_gate * entry.std_devs.front();
        report.per_degree.push_back(std::move(entry));
    }
    return report;
}

} // namespace rtg
