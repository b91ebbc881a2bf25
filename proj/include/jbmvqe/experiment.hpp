// Copyright 2026 The jbmvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * Experiment plumbing: the key=value config format, per-iteration CSV
 * output, and the shots-to-beat-Hartree-Fock comparison.
 *
 * Config files are flat `key = value` lines grouped under `[experiment]` and
 * `[optimizer]` sections. `#` starts a comment line.
 */

#include "jbmvqe/error.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/statevector.hpp"
#include "jbmvqe/vqe.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace jbmvqe {

enum class Method { JBM, Conventional, Both };

[[nodiscard]] inline std::string to_string(Method m) {
    switch (m) {
    case Method::JBM:
        return "jbm";
    case Method::Conventional:
        return "conventional";
    case Method::Both:
        return "both";
    }
    return "both";
}

[[nodiscard]] inline std::optional<Method> method_from_string(std::string_view s) {
    if (s == "jbm") {
        return Method::JBM;
    }
    if (s == "conventional") {
        return Method::Conventional;
    }
    if (s == "both") {
        return Method::Both;
    }
    return std::nullopt;
}

struct ExperimentConfig {
    std::string hamiltonian_path;
    Method method = Method::Both;
    std::size_t depth = 1;
    OptimizerConfig optimizer;
    std::size_t trials = 1;
    std::uint64_t seed_base = 0;
    std::string output_dir = "results";
    /// Stop each compare trial once its exact energy is below Hartree-Fock.
    bool stop_at_hf = true;
    /// Worker threads for compare; 0 means one per hardware thread.
    std::size_t workers = 0;

    void validate(bool check_files = true) const {
        detail::require(!hamiltonian_path.empty(), "hamiltonian path missing");
        detail::require(depth >= 1, "depth must be at least 1");
        detail::require(trials >= 1, "trials must be at least 1");
        optimizer.validate();
        if (check_files) {
            detail::require(std::filesystem::exists(hamiltonian_path),
                            "hamiltonian file not found: " + hamiltonian_path);
        }
    }

    friend bool operator==(const ExperimentConfig &,
                           const ExperimentConfig &) = default;
};

namespace detail {

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline bool parse_bool(std::string_view s, bool &out) {
    if (s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

} // namespace detail

[[nodiscard]] inline std::string serialize_config(const ExperimentConfig &c) {
    using detail::format_bool;
    using detail::format_double;
    const auto &o = c.optimizer;
    std::ostringstream s;
    s << "[experiment]\n"
      << "hamiltonian = " << c.hamiltonian_path << '\n'
      << "method = " << to_string(c.method) << '\n'
      << "depth = " << c.depth << '\n'
      << "trials = " << c.trials << '\n'
      << "seed_base = " << c.seed_base << '\n'
      << "output_dir = " << c.output_dir << '\n'
      << "stop_at_hf = " << format_bool(c.stop_at_hf) << '\n'
      << "workers = " << c.workers << '\n'
      << "\n[optimizer]\n"
      << "learning_rate = " << format_double(o.learning_rate) << '\n'
      << "shift = " << format_double(o.shift) << '\n'
      << "sign_period = " << o.sign_period << '\n'
      << "bell_shots = " << o.bell_shots << '\n'
      << "sign_shots_per_group = " << o.sign_shots_per_group << '\n'
      << "vqe_shots_per_group = " << o.vqe_shots_per_group << '\n'
      << "stop_window = " << o.stop_window << '\n'
      << "stop_delta = " << format_double(o.stop_delta) << '\n'
      << "max_iterations = " << o.max_iterations << '\n'
      << "oracle = " << format_bool(o.oracle) << '\n'
      << "record_parameters = " << format_bool(o.record_parameters) << '\n';
    return s.str();
}

/**
 * Parses the config format. Unknown sections or keys, repeated keys and
 * malformed values raise ParseError. Keys left out keep their defaults.
 */
[[nodiscard]] inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    auto &o = c.optimizer;
    std::string section;
    std::vector<std::string> seen;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(line_no, "malformed section header");
            }
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "optimizer") {
                throw ParseError(line_no, "unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ParseError(line_no, "key outside a section");
        }
        const std::string qualified = section + "." + key;
        if (std::find(seen.begin(), seen.end(), qualified) != seen.end()) {
            throw ParseError(line_no, "repeated key '" + key + "'");
        }
        seen.push_back(qualified);

        auto fail = [&]() -> void {
            throw ParseError(line_no, "invalid value for '" + key + "'");
        };
        auto num = [&](auto &field) {
            if (!detail::parse_number(value, field)) {
                fail();
            }
        };
        auto flag = [&](bool &field) {
            if (!detail::parse_bool(value, field)) {
                fail();
            }
        };

        if (section == "experiment") {
            if (key == "hamiltonian") {
                c.hamiltonian_path = std::string(value);
            } else if (key == "method") {
                const auto m = method_from_string(value);
                if (!m) {
                    fail();
                }
                c.method = *m;
            } else if (key == "depth") {
                num(c.depth);
            } else if (key == "trials") {
                num(c.trials);
            } else if (key == "seed_base") {
                num(c.seed_base);
            } else if (key == "output_dir") {
                c.output_dir = std::string(value);
            } else if (key == "stop_at_hf") {
                flag(c.stop_at_hf);
            } else if (key == "workers") {
                num(c.workers);
            } else {
                throw ParseError(line_no, "unknown key '" + key + "'");
            }
        } else {
            if (key == "learning_rate") {
                num(o.learning_rate);
            } else if (key == "shift") {
                num(o.shift);
            } else if (key == "sign_period") {
                num(o.sign_period);
            } else if (key == "bell_shots") {
                num(o.bell_shots);
            } else if (key == "sign_shots_per_group") {
                num(o.sign_shots_per_group);
            } else if (key == "vqe_shots_per_group") {
                num(o.vqe_shots_per_group);
            } else if (key == "stop_window") {
                num(o.stop_window);
            } else if (key == "stop_delta") {
                num(o.stop_delta);
            } else if (key == "max_iterations") {
                num(o.max_iterations);
            } else if (key == "oracle") {
                flag(o.oracle);
            } else if (key == "record_parameters") {
                flag(o.record_parameters);
            } else {
                throw ParseError(line_no, "unknown key '" + key + "'");
            }
        }
    }
    return c;
}

/// Reads a config file. A relative hamiltonian path is taken relative to
/// the config file's directory.
[[nodiscard]] inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw Error("cannot open config file: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    ExperimentConfig c = parse_config(ss.str());
    const std::filesystem::path hp(c.hamiltonian_path);
    if (!c.hamiltonian_path.empty() && hp.is_relative()) {
        c.hamiltonian_path =
            (std::filesystem::path(path).parent_path() / hp).lexically_normal().string();
    }
    return c;
}

inline constexpr const char *csv_header =
    "iteration,est_energy,exact_energy,cum_shots,signs_refreshed";

inline void write_log_csv(std::ostream &out, const IterationLog &log) {
    out << csv_header << '\n';
    for (const auto &r : log.records) {
        out << r.iteration << ',' << detail::format_double(r.est_energy) << ','
            << detail::format_double(r.exact_energy) << ',' << r.cum_shots << ','
            << (r.signs_refreshed ? 1 : 0) << '\n';
    }
}

/// Cumulative shots at the first iteration whose exact energy is below `hf`.
[[nodiscard]] inline std::optional<std::uint64_t>
shots_to_beat(const IterationLog &log, double hf) {
    for (const auto &r : log.records) {
        if (r.exact_energy < hf) {
            return r.cum_shots;
        }
    }
    return std::nullopt;
}

struct TrialResult {
    std::uint64_t seed = 0;
    std::optional<IterationLog> jbm;
    std::optional<IterationLog> conventional;
    std::optional<std::uint64_t> jbm_shots_to_hf;
    std::optional<std::uint64_t> conventional_shots_to_hf;
    std::string error;
};

struct CompareSummary {
    double hf_energy = 0.0;
    std::size_t trials = 0;
    std::size_t jbm_successes = 0;
    std::size_t conventional_successes = 0;
    std::size_t both_successes = 0;
    std::size_t failed_trials = 0;
    std::optional<double> mean_jbm_shots;
    std::optional<double> mean_conventional_shots;
    /// mean conventional shots / mean JBM shots over trials where both beat HF
    std::optional<double> ratio;
    /// mean over the same trials of the per-trial ratio
    std::optional<double> mean_trial_ratio;
};

/// Trial i starts from θ₀ drawn with seed seed_base + i and runs the
/// selected methods with that seed.
[[nodiscard]] inline TrialResult run_trial(const VqeProblem &problem,
                                           const ExperimentConfig &cfg,
                                           std::uint64_t seed) {
    TrialResult t;
    t.seed = seed;
    OptimizerConfig oc = cfg.optimizer;
    oc.rng_seed = seed;
    const double hf = problem.reference_energy();
    if (cfg.stop_at_hf) {
        oc.stop_below = hf;
    }
    try {
        const ParameterVector theta0 =
            random_initial_parameters(problem.n_params(), seed);
        if (cfg.method != Method::Conventional) {
            t.jbm = run_jbm_vqe(problem, theta0, oc);
            t.jbm_shots_to_hf = shots_to_beat(*t.jbm, hf);
        }
        if (cfg.method != Method::JBM) {
            t.conventional = run_conventional_vqe(problem, theta0, oc);
            t.conventional_shots_to_hf = shots_to_beat(*t.conventional, hf);
        }
    } catch (const std::exception &e) {
        t.error = e.what();
    }
    return t;
}

[[nodiscard]] inline CompareSummary
summarize(const std::vector<TrialResult> &trials, double hf) {
    CompareSummary s;
    s.hf_energy = hf;
    s.trials = trials.size();
    double sum_j = 0.0;
    double sum_c = 0.0;
    double sum_r = 0.0;
    for (const auto &t : trials) {
        if (!t.error.empty()) {
            ++s.failed_trials;
            continue;
        }
        s.jbm_successes += t.jbm_shots_to_hf.has_value();
        s.conventional_successes += t.conventional_shots_to_hf.has_value();
        if (t.jbm_shots_to_hf && t.conventional_shots_to_hf) {
            ++s.both_successes;
            const auto j = static_cast<double>(*t.jbm_shots_to_hf);
            const auto c = static_cast<double>(*t.conventional_shots_to_hf);
            sum_j += j;
            sum_c += c;
            sum_r += c / j;
        }
    }
    if (s.both_successes > 0) {
        const auto n = static_cast<double>(s.both_successes);
        s.mean_jbm_shots = sum_j / n;
        s.mean_conventional_shots = sum_c / n;
        s.ratio = sum_c / sum_j;
        s.mean_trial_ratio = sum_r / n;
    }
    return s;
}

/**
 * Runs cfg.trials trials on a pool of worker threads. Results come back in
 * trial order regardless of scheduling, so output is reproducible. `on_done`
 * is called from the calling thread in trial order.
 */
[[nodiscard]] inline std::vector<TrialResult>
run_compare(const VqeProblem &problem, const ExperimentConfig &cfg,
            const std::function<void(const TrialResult &)> &on_done = {}) {
    cfg.validate(false);
    std::size_t workers = cfg.workers;
    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, cfg.trials);
    std::vector<TrialResult> results(cfg.trials);
    std::vector<std::future<TrialResult>> pending;
    std::size_t next = 0;
    std::size_t collected = 0;
    while (collected < cfg.trials) {
        while (next < cfg.trials && pending.size() - collected < workers) {
            const std::uint64_t seed = cfg.seed_base + next;
            pending.push_back(std::async(std::launch::async, [&problem, &cfg, seed] {
                return run_trial(problem, cfg, seed);
            }));
            ++next;
        }
        results[collected] = pending[collected].get();
        if (on_done) {
            on_done(results[collected]);
        }
        ++collected;
    }
    return results;
}

[[nodiscard]] inline nlohmann::json to_json(const CompareSummary &s,
                                            const ExperimentConfig &cfg) {
    auto opt = [](const auto &v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return {
        {"hamiltonian", cfg.hamiltonian_path},
        {"depth", cfg.depth},
        {"method", to_string(cfg.method)},
        {"oracle", cfg.optimizer.oracle},
        {"hf_energy", s.hf_energy},
        {"trials", s.trials},
        {"seed_base", cfg.seed_base},
        {"jbm_successes", s.jbm_successes},
        {"conventional_successes", s.conventional_successes},
        {"both_successes", s.both_successes},
        {"failed_trials", s.failed_trials},
        {"mean_jbm_shots_to_hf", opt(s.mean_jbm_shots)},
        {"mean_conventional_shots_to_hf", opt(s.mean_conventional_shots)},
        {"ratio_conventional_over_jbm", opt(s.ratio)},
        {"mean_per_trial_ratio", opt(s.mean_trial_ratio)},
        {"ratio_policy",
         "trials that never beat HF count as infinite and are excluded; ratio "
         "is mean conventional shots over mean JBM shots on trials where both "
         "methods beat HF"},
    };
}

} // namespace jbmvqe
