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
 * Gradient-descent VQE driven either by joint Bell measurements with cached
 * signs or by conventional grouped projective measurements.
 *
 * Every estimate evaluates 2·N_θ + 1 circuits: the current parameters and,
 * for each parameter l, the shifted points θ ± α·e_l. The gradient is
 * (E(θ + α·e_l) − E(θ − α·e_l)) / (2 sin α).
 */

#include "jbmvqe/bell.hpp"
#include "jbmvqe/error.hpp"
#include "jbmvqe/grouping.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/statevector.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace jbmvqe {

struct OptimizerConfig {
    double learning_rate = 0.02;
    double shift = std::numbers::pi / 4;
    std::size_t sign_period = 30;
    std::size_t bell_shots = 4159;
    std::size_t sign_shots_per_group = 513;
    std::size_t vqe_shots_per_group = 739;
    std::size_t stop_window = 200;
    double stop_delta = 0.001;
    std::size_t max_iterations = 5000;
    std::uint64_t rng_seed = 0;
    /// Infinite-shot mode: exact expectations and exact gradients. Shot
    /// counters still follow the finite-shot census.
    bool oracle = false;
    /// End the run at the first iteration whose exact energy is below this.
    std::optional<double> stop_below;
    bool record_parameters = false;

    void validate() const {
        detail::require(learning_rate > 0.0, "learning rate must be positive");
        detail::require(shift > 0.0 && shift < std::numbers::pi,
                        "shift must lie in (0, pi)");
        detail::require(sign_period >= 1, "sign period must be at least 1");
        detail::require(bell_shots >= 1 && sign_shots_per_group >= 1 &&
                            vqe_shots_per_group >= 1,
                        "shot counts must be positive");
        detail::require(stop_window >= 1, "stop window must be at least 1");
    }

    friend bool operator==(const OptimizerConfig &,
                           const OptimizerConfig &) = default;
};

/// Signs t_j recorded at θ and at every shifted point, one per term.
struct SignCache {
    std::vector<int> energy_signs;
    std::vector<std::vector<int>> gradient_signs_plus;
    std::vector<std::vector<int>> gradient_signs_minus;
    std::size_t recorded_at_iteration = 0;

    void check_shape(std::size_t n_terms, std::size_t n_params) const {
        auto ok = [&](const std::vector<int> &v) {
            return v.size() == n_terms;
        };
        detail::require_size(ok(energy_signs) &&
                                 gradient_signs_plus.size() == n_params &&
                                 gradient_signs_minus.size() == n_params,
                             "sign cache does not match problem shape");
        for (std::size_t l = 0; l < n_params; ++l) {
            detail::require_size(ok(gradient_signs_plus[l]) &&
                                     ok(gradient_signs_minus[l]),
                                 "sign cache does not match problem shape");
        }
    }
};

struct IterationRecord {
    std::size_t iteration = 0;
    double est_energy = 0.0;
    double exact_energy = 0.0;
    std::uint64_t cum_shots = 0;
    bool signs_refreshed = false;
    ParameterVector parameters; ///< filled only when recording is enabled
};

struct IterationLog {
    std::vector<IterationRecord> records;
    ParameterVector final_parameters;
};

struct Estimate {
    double energy = 0.0;
    std::vector<double> gradient;
    std::uint64_t shots = 0;
};

struct SignedEstimate : Estimate {
    SignCache signs;
};

/// Hamiltonian and circuit plus the grouping shared by all estimators.
class VqeProblem {
  public:
    VqeProblem(Hamiltonian h, AnsatzCircuit circuit)
        : h_(std::move(h)), circuit_(std::move(circuit)),
          groups_(group_qwc_greedy(h_)) {
        detail::require_size(h_.n_qubits() == circuit_.n_qubits(),
                             "circuit and Hamiltonian widths differ");
        ops_.reserve(h_.term_count());
        for (const auto &t : h_.terms()) {
            ops_.push_back(t.op);
        }
    }

    [[nodiscard]] const Hamiltonian &hamiltonian() const noexcept { return h_; }
    [[nodiscard]] const AnsatzCircuit &circuit() const noexcept {
        return circuit_;
    }
    [[nodiscard]] const std::vector<MeasurementGroup> &groups() const noexcept {
        return groups_;
    }
    [[nodiscard]] const std::vector<PauliOperator> &operators() const noexcept {
        return ops_;
    }
    [[nodiscard]] std::size_t n_params() const noexcept {
        return circuit_.parameter_count();
    }
    [[nodiscard]] std::size_t n_circuits() const noexcept {
        return 2 * n_params() + 1;
    }

    /// Circuit c: 0 is θ, 2l+1 is θ + α·e_l, 2l+2 is θ − α·e_l.
    [[nodiscard]] ParameterVector shifted(const ParameterVector &theta,
                                          std::size_t c, double alpha) const {
        ParameterVector p = theta;
        if (c > 0) {
            const std::size_t l = (c - 1) / 2;
            p[l] += (c % 2 == 1) ? alpha : -alpha;
        }
        return p;
    }

    [[nodiscard]] double exact_energy_at(const ParameterVector &theta) const {
        return exact_energy(apply_ansatz(circuit_, theta), h_);
    }

    /// Energy of the reference state, i.e. the Hartree-Fock energy.
    [[nodiscard]] double reference_energy() const {
        return exact_energy(
            prepare_reference(circuit_.n_qubits(), circuit_.n_electrons()), h_);
    }

    void check_parameters(const ParameterVector &theta) const {
        detail::require_size(theta.size() == n_params(),
                             "parameter vector length differs from circuit");
    }

  private:
    Hamiltonian h_;
    AnsatzCircuit circuit_;
    std::vector<MeasurementGroup> groups_;
    std::vector<PauliOperator> ops_;
};

namespace detail {

inline int sign_of(double v) noexcept { return v >= 0.0 ? 1 : -1; }

/// Σ_j λ_j v_j plus the identity offset.
inline double weighted_sum(const Hamiltonian &h, const std::vector<double> &v) {
    double e = h.identity_offset();
    for (std::size_t j = 0; j < v.size(); ++j) {
        e += h.terms()[j].coefficient * v[j];
    }
    return e;
}

inline std::vector<double> exact_expectations(const VqeProblem &problem,
                                              const ParameterVector &theta) {
    const StateVector s = apply_ansatz(problem.circuit(), theta);
    std::vector<double> out;
    out.reserve(problem.operators().size());
    for (const auto &op : problem.operators()) {
        out.push_back(exact_expectation(s, op));
    }
    return out;
}

inline std::vector<double> bell_abs_estimates(const VqeProblem &problem,
                                              const ParameterVector &theta,
                                              std::size_t shots, Rng &rng) {
    const StateVector s = apply_ansatz(problem.circuit(), theta);
    const BellBatch batch = sample_bell(s, shots, rng);
    auto sq = pauli_square_estimates(batch, problem.operators());
    for (auto &v : sq) {
        v = abs_from_square(v);
    }
    return sq;
}

inline std::vector<double> grouped_estimates(const VqeProblem &problem,
                                             const ParameterVector &theta,
                                             std::size_t shots_per_group,
                                             Rng &rng) {
    const StateVector s = apply_ansatz(problem.circuit(), theta);
    return estimate_all_grouped(s, problem.hamiltonian(), problem.groups(),
                                shots_per_group, rng);
}

/// Energy and gradient from per-circuit signed term values.
inline void assemble(const VqeProblem &problem,
                     const std::vector<std::vector<double>> &signed_values,
                     double alpha, Estimate &out) {
    const auto &h = problem.hamiltonian();
    out.energy = weighted_sum(h, signed_values[0]);
    out.gradient.assign(problem.n_params(), 0.0);
    const double scale = 1.0 / (2.0 * std::sin(alpha));
    for (std::size_t l = 0; l < problem.n_params(); ++l) {
        double g = 0.0;
        const auto &plus = signed_values[2 * l + 1];
        const auto &minus = signed_values[2 * l + 2];
        for (std::size_t j = 0; j < plus.size(); ++j) {
            g += h.terms()[j].coefficient * (plus[j] - minus[j]);
        }
        out.gradient[l] = g * scale;
    }
}

} // namespace detail

/**
 * Exact gradient by shifting each rotation gate separately.
 *
 * Every block angle θ drives two Ry gates with angles θ − π/2 and π/2 − θ.
 * The energy is a sinusoid of each single gate angle, so the two-term shift
 * rule is exact per gate for any α in (0, π), and the chain rule gives
 * ∂E/∂θ = ∂E/∂φ₁ − ∂E/∂φ₂.
 */
[[nodiscard]] inline std::vector<double>
parameter_shift_gradient_exact(const Hamiltonian &h,
                               const AnsatzCircuit &circuit,
                               const ParameterVector &theta, double alpha) {
    detail::require(alpha > 0.0 && alpha < std::numbers::pi,
                    "shift must lie in (0, pi)");
    const std::vector<double> angles = gate_angles(circuit, theta);
    auto energy = [&](const std::vector<double> &a) {
        return exact_energy(apply_ansatz_gates(circuit, a), h);
    };
    const double scale = 1.0 / (2.0 * std::sin(alpha));
    auto gate_derivative = [&](std::size_t g) {
        std::vector<double> a = angles;
        a[g] = angles[g] + alpha;
        const double ep = energy(a);
        a[g] = angles[g] - alpha;
        return (ep - energy(a)) * scale;
    };
    std::vector<double> grad(circuit.parameter_count());
    for (std::size_t l = 0; l < grad.size(); ++l) {
        grad[l] = gate_derivative(2 * l) - gate_derivative(2 * l + 1);
    }
    return grad;
}

/// Signs from grouped projective estimates (m_S shots per group) and
/// absolute values from Bell batches (m shots), at all 2N_θ+1 circuits.
[[nodiscard]] inline SignedEstimate
subroutine1(const VqeProblem &problem, const ParameterVector &theta,
            const OptimizerConfig &cfg, Rng &rng) {
    problem.check_parameters(theta);
    const std::size_t nc = problem.n_circuits();
    std::vector<std::vector<int>> signs(nc);
    std::vector<std::vector<double>> values(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const ParameterVector p = problem.shifted(theta, c, cfg.shift);
        std::vector<double> sgn_src;
        std::vector<double> abs_vals;
        if (cfg.oracle) {
            sgn_src = detail::exact_expectations(problem, p);
            abs_vals = sgn_src;
            for (auto &v : abs_vals) {
                v = std::abs(v);
            }
        } else {
            sgn_src = detail::grouped_estimates(problem, p,
                                                cfg.sign_shots_per_group, rng);
            abs_vals = detail::bell_abs_estimates(problem, p, cfg.bell_shots, rng);
        }
        signs[c].resize(sgn_src.size());
        values[c].resize(sgn_src.size());
        for (std::size_t j = 0; j < sgn_src.size(); ++j) {
            signs[c][j] = detail::sign_of(sgn_src[j]);
            values[c][j] = signs[c][j] * abs_vals[j];
        }
    }
    SignedEstimate out;
    detail::assemble(problem, values, cfg.shift, out);
    if (cfg.oracle) {
        out.gradient = parameter_shift_gradient_exact(
            problem.hamiltonian(), problem.circuit(), theta, cfg.shift);
    }
    out.shots = static_cast<std::uint64_t>(nc) *
                (cfg.bell_shots +
                 cfg.sign_shots_per_group * problem.groups().size());
    out.signs.energy_signs = std::move(signs[0]);
    for (std::size_t l = 0; l < problem.n_params(); ++l) {
        out.signs.gradient_signs_plus.push_back(std::move(signs[2 * l + 1]));
        out.signs.gradient_signs_minus.push_back(std::move(signs[2 * l + 2]));
    }
    return out;
}

/// Bell batches only; signs come from `cache`.
[[nodiscard]] inline Estimate subroutine2(const VqeProblem &problem,
                                          const ParameterVector &theta,
                                          const SignCache &cache,
                                          const OptimizerConfig &cfg, Rng &rng) {
    problem.check_parameters(theta);
    cache.check_shape(problem.hamiltonian().term_count(), problem.n_params());
    const std::size_t nc = problem.n_circuits();
    std::vector<std::vector<double>> values(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const ParameterVector p = problem.shifted(theta, c, cfg.shift);
        std::vector<double> v;
        if (cfg.oracle) {
            v = detail::exact_expectations(problem, p);
            for (auto &x : v) {
                x = std::abs(x);
            }
        } else {
            v = detail::bell_abs_estimates(problem, p, cfg.bell_shots, rng);
        }
        const std::vector<int> &t =
            c == 0 ? cache.energy_signs
                   : (c % 2 == 1 ? cache.gradient_signs_plus[(c - 1) / 2]
                                 : cache.gradient_signs_minus[(c - 1) / 2]);
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] *= t[j];
        }
        values[c] = std::move(v);
    }
    Estimate out;
    detail::assemble(problem, values, cfg.shift, out);
    if (cfg.oracle) {
        out.gradient = parameter_shift_gradient_exact(
            problem.hamiltonian(), problem.circuit(), theta, cfg.shift);
    }
    out.shots = static_cast<std::uint64_t>(nc) * cfg.bell_shots;
    return out;
}

/// Grouped projective estimation with m_VQE shots per group per circuit.
[[nodiscard]] inline Estimate conventional_estimate(const VqeProblem &problem,
                                                    const ParameterVector &theta,
                                                    const OptimizerConfig &cfg,
                                                    Rng &rng) {
    problem.check_parameters(theta);
    const std::size_t nc = problem.n_circuits();
    Estimate out;
    if (cfg.oracle) {
        out.energy = problem.exact_energy_at(theta);
        out.gradient = parameter_shift_gradient_exact(
            problem.hamiltonian(), problem.circuit(), theta, cfg.shift);
    } else {
        std::vector<std::vector<double>> values(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            values[c] = detail::grouped_estimates(
                problem, problem.shifted(theta, c, cfg.shift),
                cfg.vqe_shots_per_group, rng);
        }
        detail::assemble(problem, values, cfg.shift, out);
    }
    out.shots = static_cast<std::uint64_t>(nc) * cfg.vqe_shots_per_group *
                problem.groups().size();
    return out;
}

/**
 * True when the mean estimated energy of the latest complete window of
 * `window` iterations failed to drop by at least `delta` below the mean of
 * the window before it. Windows are aligned to the start of the log.
 */
[[nodiscard]] inline bool stopping_rule(const IterationLog &log,
                                        std::size_t window, double delta) {
    detail::require(window >= 1, "stop window must be at least 1");
    const std::size_t complete = log.records.size() / window;
    if (complete < 2) {
        return false;
    }
    auto mean = [&](std::size_t w) {
        double acc = 0.0;
        for (std::size_t i = w * window; i < (w + 1) * window; ++i) {
            acc += log.records[i].est_energy;
        }
        return acc / static_cast<double>(window);
    };
    return mean(complete - 2) - mean(complete - 1) < delta;
}

namespace detail {

template <class Step>
IterationLog run_loop(const VqeProblem &problem, ParameterVector theta,
                      const OptimizerConfig &cfg, Step &&step) {
    cfg.validate();
    problem.check_parameters(theta);
    IterationLog log;
    std::uint64_t cum = 0;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        const Estimate est = step(it, theta, rec.signs_refreshed);
        cum += est.shots;
        rec.est_energy = est.energy;
        rec.exact_energy = problem.exact_energy_at(theta);
        rec.cum_shots = cum;
        if (cfg.record_parameters) {
            rec.parameters = theta;
        }
        const bool below = cfg.stop_below && rec.exact_energy < *cfg.stop_below;
        log.records.push_back(std::move(rec));
        for (std::size_t l = 0; l < theta.size(); ++l) {
            theta[l] -= cfg.learning_rate * est.gradient[l];
        }
        if (below || stopping_rule(log, cfg.stop_window, cfg.stop_delta)) {
            break;
        }
    }
    log.final_parameters = std::move(theta);
    return log;
}

} // namespace detail

/// Algorithm loop: Subroutine 1 every `sign_period` iterations (refreshing
/// the sign cache), Subroutine 2 otherwise.
[[nodiscard]] inline IterationLog run_jbm_vqe(const VqeProblem &problem,
                                              const ParameterVector &theta0,
                                              const OptimizerConfig &cfg) {
    Rng rng(cfg.rng_seed);
    SignCache cache;
    return detail::run_loop(
        problem, theta0, cfg,
        [&](std::size_t it, const ParameterVector &theta,
            bool &refreshed) -> Estimate {
            if (it % cfg.sign_period == 0) {
                SignedEstimate r = subroutine1(problem, theta, cfg, rng);
                cache = std::move(r.signs);
                cache.recorded_at_iteration = it;
                refreshed = true;
                return r;
            }
            return subroutine2(problem, theta, cache, cfg, rng);
        });
}

[[nodiscard]] inline IterationLog
run_conventional_vqe(const VqeProblem &problem, const ParameterVector &theta0,
                     const OptimizerConfig &cfg) {
    Rng rng(cfg.rng_seed);
    return detail::run_loop(
        problem, theta0, cfg,
        [&](std::size_t, const ParameterVector &theta, bool &) -> Estimate {
            return conventional_estimate(problem, theta, cfg, rng);
        });
}

/// Initial parameters drawn uniformly from [0, π/5).
[[nodiscard]] inline ParameterVector
random_initial_parameters(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, std::numbers::pi / 5);
    ParameterVector p(count);
    for (auto &v : p) {
        v = u(rng);
    }
    return p;
}

} // namespace jbmvqe
