// config.hpp — Flat key-value run configuration.
//
// Format: one `section.key = value` per line, `#` starts a comment. Every
// violation is collected and reported with its line number in a single
// config_error. Unknown keys are rejected. CLI flags reuse apply_override()
// with the same validation, line number 0.
#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rtg/errors.hpp"
#include "rtg/fitness.hpp"

namespace rtg {

struct RunConfig {
    // fitness
    std::string family;                      // "exponential" | "pareto"; required
    double rate = 1.0;
    double scale = 1.0;
    double shape = 2.0;
    // run
    std::int64_t n = 30000;
    std::vector<std::int64_t> n_grid;        // empty means single-n commands use run.n
    std::int64_t replications = 100;
    std::vector<std::int64_t> d_set = {0, 5, 10};
    std::uint64_t seed = 20250811;
    std::int64_t threads = 0;                // 0 = hardware concurrency
    std::string out_dir = "out";
    std::int64_t max_cells = 4'000'000'000;  // n * R node-draw cap
    // monte carlo
    std::int64_t mc_samples = 1'000'000;
    // quadrature
    double quad_tolerance = 1e-8;
    std::int64_t quad_max_evals = 1'000'000;
    // limits table
    std::int64_t limits_d_max = 20;
    // joint moments
    std::int64_t joint_r_max = 5;
    std::string joint_method = "quadrature"; // quadrature | monte-carlo | both
    // characteristic function
    std::vector<double> charfn_t_set = {0.5, 1.0, 2.0};
    double charfn_epsilon = 1e-8;
    // histogram export
    std::int64_t histogram_bins = 50;
    // stability gates: artifact-level calibrations, tunable here
    double gate_ks = 0.25;
    double gate_iqr_factor = 5.0;
    double gate_spread_se_factor = 10.0;
    double gate_std_ratio = 0.5;
    // verify
    std::string verify_level = "quick";      // quick | full
    // scaling check
    std::vector<double> scaling_x_grid = {0.0, 1.0, 2.0, 4.0};
    std::vector<std::int64_t> scaling_n_grid = {100, 1000, 10000, 100000, 1000000};

    std::set<std::string> explicit_keys;     // keys set by file or flags

    [[nodiscard]] FitnessModel model() const {
        if (family == "exponential") return FitnessModel::exponential(rate);
        if (family == "pareto") return FitnessModel::pareto(scale, shape);
        throw config_error("fitness.family must be set to exponential or pareto");
    }

    [[nodiscard]] std::vector<std::int64_t> effective_n_grid() const {
        return n_grid.empty() ? std::vector<std::int64_t>{n} : n_grid;
    }
};

namespace config_detail {

struct Violation {
    int line;                // 0 for CLI overrides
    std::string message;
};

inline bool parse_int(const std::string& text, std::int64_t& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size()) return false;
    out = v;
    return true;
}

inline bool parse_uint(const std::string& text, std::uint64_t& out) {
    if (text.empty() || text[0] == '-') return false;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size()) return false;
    out = v;
    return true;
}

inline bool parse_real(const std::string& text, double& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end != text.c_str() + text.size()) return false;
    out = v;
    return true;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

inline bool parse_int_list(const std::string& text, std::vector<std::int64_t>& out) {
    out.clear();
    for (const auto& part : split_list(text)) {
        std::int64_t v;
        if (!parse_int(part, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

inline bool parse_real_list(const std::string& text, std::vector<double>& out) {
    out.clear();
    for (const auto& part : split_list(text)) {
        double v;
        if (!parse_real(part, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

inline std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// One assignment handler per key: parses, range-checks, stores.
using KeyHandler = std::function<bool(RunConfig&, const std::string&, std::string&)>;

inline const std::map<std::string, KeyHandler>& key_handlers() {
    static const std::map<std::string, KeyHandler> handlers = [] {
        std::map<std::string, KeyHandler> h;

        const auto int_key = [&h](const std::string& key, std::int64_t RunConfig::* field,
                                  std::int64_t lo, const std::string& requirement) {
            h[key] = [field, lo, requirement](RunConfig& c, const std::string& v,
                                              std::string& err) {
                std::int64_t parsed;
                if (!parse_int(v, parsed)) {
                    err = "expected an integer";
                    return false;
                }
                if (parsed < lo) {
                    err = requirement;
                    return false;
                }
                c.*field = parsed;
                return true;
            };
        };
        const auto real_key = [&h](const std::string& key, double RunConfig::* field,
                                   bool positive) {
            h[key] = [field, positive](RunConfig& c, const std::string& v, std::string& err) {
                double parsed;
                if (!parse_real(v, parsed)) {
                    err = "expected a real number";
                    return false;
                }
                if (positive && !(parsed > 0.0)) {
                    err = "must be > 0";
                    return false;
                }
                c.*field = parsed;
                return true;
            };
        };

        h["fitness.family"] = [](RunConfig& c, const std::string& v, std::string& err) {
            if (v != "exponential" && v != "pareto") {
                err = "must be 'exponential' or 'pareto'";
                return false;
            }
            c.family = v;
            return true;
        };
        real_key("fitness.rate", &RunConfig::rate, true);
        real_key("fitness.scale", &RunConfig::scale, true);
        real_key("fitness.shape", &RunConfig::shape, true);

        int_key("run.n", &RunConfig::n, 2, "must be >= 2");
        h["run.n_grid"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::vector<std::int64_t> parsed;
            if (!parse_int_list(v, parsed)) {
                err = "expected a comma-separated list of integers";
                return false;
            }
            for (std::int64_t n : parsed)
                if (n < 2) {
                    err = "every n must be >= 2";
                    return false;
                }
            c.n_grid = parsed;
            return true;
        };
        int_key("run.R", &RunConfig::replications, 1, "must be >= 1");
        h["run.d_set"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::vector<std::int64_t> parsed;
            if (!parse_int_list(v, parsed)) {
                err = "expected a comma-separated list of integers";
                return false;
            }
            for (std::int64_t d : parsed)
                if (d < 0) {
                    err = "every degree must be >= 0";
                    return false;
                }
            c.d_set = parsed;
            return true;
        };
        h["run.seed"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::uint64_t parsed;
            if (!parse_uint(v, parsed)) {
                err = "expected a non-negative integer";
                return false;
            }
            c.seed = parsed;
            return true;
        };
        int_key("run.threads", &RunConfig::threads, 0, "must be >= 0");
        h["run.out"] = [](RunConfig& c, const std::string& v, std::string&) {
            c.out_dir = v;
            return true;
        };
        int_key("run.max_cells", &RunConfig::max_cells, 1, "must be >= 1");

        int_key("mc.samples", &RunConfig::mc_samples, 1, "must be >= 1");

        real_key("quad.tolerance", &RunConfig::quad_tolerance, true);
        int_key("quad.max_evals", &RunConfig::quad_max_evals, 100, "must be >= 100");

        int_key("limits.d_max", &RunConfig::limits_d_max, 0, "must be >= 0");

        int_key("joint.r_max", &RunConfig::joint_r_max, 1, "must be >= 1");
        h["joint.method"] = [](RunConfig& c, const std::string& v, std::string& err) {
            if (v != "quadrature" && v != "monte-carlo" && v != "both") {
                err = "must be 'quadrature', 'monte-carlo' or 'both'";
                return false;
            }
            c.joint_method = v;
            return true;
        };

        h["charfn.t_set"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::vector<double> parsed;
            if (!parse_real_list(v, parsed)) {
                err = "expected a comma-separated list of reals";
                return false;
            }
            c.charfn_t_set = parsed;
            return true;
        };
        real_key("charfn.epsilon", &RunConfig::charfn_epsilon, true);

        int_key("histogram.bins", &RunConfig::histogram_bins, 1, "must be >= 1");

        real_key("gates.ks", &RunConfig::gate_ks, true);
        real_key("gates.iqr_factor", &RunConfig::gate_iqr_factor, true);
        real_key("gates.spread_se_factor", &RunConfig::gate_spread_se_factor, true);
        real_key("gates.std_ratio", &RunConfig::gate_std_ratio, true);

        h["verify.level"] = [](RunConfig& c, const std::string& v, std::string& err) {
            if (v != "quick" && v != "full") {
                err = "must be 'quick' or 'full'";
                return false;
            }
            c.verify_level = v;
            return true;
        };

        h["scaling.x_grid"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::vector<double> parsed;
            if (!parse_real_list(v, parsed)) {
                err = "expected a comma-separated list of reals";
                return false;
            }
            for (double x : parsed)
                if (x < 0.0) {
                    err = "every x must be >= 0";
                    return false;
                }
            c.scaling_x_grid = parsed;
            return true;
        };
        h["scaling.n_grid"] = [](RunConfig& c, const std::string& v, std::string& err) {
            std::vector<std::int64_t> parsed;
            if (!parse_int_list(v, parsed)) {
                err = "expected a comma-separated list of integers";
                return false;
            }
            for (std::int64_t n : parsed)
                if (n < 2) {
                    err = "every n must be >= 2";
                    return false;
                }
            c.scaling_n_grid = parsed;
            return true;
        };
        return h;
    }();
    return handlers;
}

inline void assign(RunConfig& config, const std::string& key, const std::string& value,
                   int line, std::vector<Violation>& violations) {
    const auto& handlers = key_handlers();
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
        violations.push_back({line, "unknown key '" + key + "'"});
        return;
    }
    std::string err;
    if (!it->second(config, value, err)) {
        violations.push_back({line, "key '" + key + "': " + err + " (got '" + value + "')"});
        return;
    }
    config.explicit_keys.insert(key);
}

inline void cross_validate(const RunConfig& config, std::vector<Violation>& violations) {
    if (config.family.empty()) {
        violations.push_back({0, "required key 'fitness.family' is missing"});
        return;
    }
    const bool exponential = config.family == "exponential";
    if (!exponential && config.explicit_keys.count("fitness.rate"))
        violations.push_back({0, "key 'fitness.rate' applies only to the exponential family"});
    if (exponential && (config.explicit_keys.count("fitness.scale") ||
                        config.explicit_keys.count("fitness.shape")))
        violations.push_back(
            {0, "keys 'fitness.scale'/'fitness.shape' apply only to the pareto family"});
}

inline void raise(const std::vector<Violation>& violations) {
    if (violations.empty()) return;
    std::ostringstream message;
    message << "configuration invalid (" << violations.size() << " problem"
            << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& v : violations) {
        message << "\n  ";
        if (v.line > 0) message << "line " << v.line << ": ";
        message << v.message;
    }
    throw config_error(message.str());
}

} // namespace config_detail

// Parse configuration text. Collects every violation before throwing.
inline RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::vector<config_detail::Violation> violations;

    std::istringstream stream(text);
    std::string raw_line;
    int line_number = 0;
    while (std::getline(stream, raw_line)) {
        ++line_number;
        std::string line = raw_line;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back({line_number, "expected 'key = value'"});
            continue;
        }
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            violations.push_back({line_number, "empty key"});
            continue;
        }
        config_detail::assign(config, key, value, line_number, violations);
    }
    config_detail::cross_validate(config, violations);
    config_detail::raise(violations);
    return config;
}

// Apply one `key=value` override (CLI flag); validates like a file line.
inline void apply_override(RunConfig& config, const std::string& key,
                           const std::string& value) {
    std::vector<config_detail::Violation> violations;
    config_detail::assign(config, key, value, 0, violations);
    config_detail::raise(violations);
}

// Re-validate after overrides (family may have changed).
inline void finalize_config(RunConfig& config) {
    std::vector<config_detail::Violation> violations;
    config_detail::cross_validate(config, violations);
    config_detail::raise(violations);
}

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [key, handler] : config_detail::key_handlers()) out.push_back(key);
        return out;
    }();
    return keys;
}

} // namespace rtg
