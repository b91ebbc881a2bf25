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
 * Joint Bell measurement on two copies of a state.
 *
 * Register A occupies qubits 0..n-1 of the doubled register and register B
 * qubits n..2n-1. Per pair i the circuit is CNOT(A_i → B_i) followed by H on
 * A_i, so a computational-basis readout gives a "phase" bit a_i (register A)
 * and a "parity" bit b_i (register B):
 *
 *     |Φ+⟩ → (0,0)   |Φ−⟩ → (1,0)   |Ψ+⟩ → (0,1)   |Ψ−⟩ → (1,1)
 *
 * P⊗P is diagonal in this basis with per-qubit eigenvalue (−1)^{a_i} for X,
 * (−1)^{b_i} for Z and (−1)^{a_i + b_i + 1} for Y.
 */

#include "jbmvqe/error.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jbmvqe {

inline constexpr std::size_t max_bell_qubits = 12;

struct BellOutcome {
    std::uint64_t phase_bits = 0;  ///< a_i, read from register A
    std::uint64_t parity_bits = 0; ///< b_i, read from register B

    friend bool operator==(const BellOutcome &, const BellOutcome &) = default;
};

/// Outcomes of one Bell-measurement batch on an n-qubit state.
struct BellBatch {
    std::size_t n_qubits = 0;
    std::vector<BellOutcome> outcomes;

    [[nodiscard]] std::size_t shots() const noexcept { return outcomes.size(); }
};

/// Pairs rendered as "a0b0 a1b1 ...".
[[nodiscard]] inline std::string to_string(const BellOutcome &o,
                                           std::size_t n_qubits) {
    std::string s;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (q != 0) {
            s += ' ';
        }
        s += ((o.phase_bits >> q) & 1U) ? '1' : '0';
        s += ((o.parity_bits >> q) & 1U) ? '1' : '0';
    }
    return s;
}

/// (H_A ⊗ I) · CNOT_{A→B} on every pair, applied to |ψ⟩_A ⊗ |ψ⟩_B.
[[nodiscard]] inline StateVector doubled_bell_state(const StateVector &state) {
    const std::size_t n = state.n_qubits();
    detail::require(n <= max_bell_qubits, "register too large for doubling");
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<Complex> amps(dim * dim);
    for (std::uint64_t b = 0; b < dim; ++b) {
        for (std::uint64_t a = 0; a < dim; ++a) {
            amps[a | (b << n)] = state[a] * state[b];
        }
    }
    StateVector doubled = StateVector::from_amplitudes(2 * n, std::move(amps));
    for (std::size_t q = 0; q < n; ++q) {
        doubled.apply_cnot(q, n + q);
        doubled.apply_hadamard(q);
    }
    return doubled;
}

namespace detail {

// In-place unnormalized Walsh–Hadamard transform.
template <class T> void walsh_hadamard(std::vector<T> &v) {
    const std::size_t dim = v.size();
    for (std::size_t h = 1; h < dim; h <<= 1) {
        for (std::size_t base = 0; base < dim; base += 2 * h) {
            for (std::size_t i = base; i < base + h; ++i) {
                const T u = v[i];
                const T w = v[i + h];
                v[i] = u + w;
                v[i + h] = u - w;
            }
        }
    }
}

template <class T, class Amp>
std::vector<double> bell_probabilities_impl(std::size_t n, Amp amp) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> probs(dim * dim);
    std::vector<T> row(dim);
    const double scale = 1.0 / static_cast<double>(dim);
    for (std::uint64_t b = 0; b < dim; ++b) {
        for (std::uint64_t x = 0; x < dim; ++x) {
            row[x] = amp(x) * amp(x ^ b);
        }
        walsh_hadamard(row);
        double *out = probs.data() + (b << n);
        for (std::uint64_t a = 0; a < dim; ++a) {
            out[a] = std::norm(row[a]) * scale;
        }
    }
    return probs;
}

} // namespace detail

/**
 * Outcome distribution of the Bell measurement, indexed by
 * a | (b << n). Equivalent to doubled_bell_state(...).probabilities() but
 * computed as
 *
 *     Φ(a, b) = 2^{-n/2} Σ_x (−1)^{a·x} ψ(x) ψ(x ⊕ b)
 *
 * with one Walsh–Hadamard transform per parity pattern b. Real states take
 * a real-arithmetic path.
 */
[[nodiscard]] inline std::vector<double>
bell_probabilities(const StateVector &state) {
    const std::size_t n = state.n_qubits();
    detail::require(n <= max_bell_qubits, "register too large for doubling");
    const auto amps = state.amplitudes();
    const bool real = std::all_of(amps.begin(), amps.end(), [](const Complex &c) {
        return c.imag() == 0.0;
    });
    if (real) {
        return detail::bell_probabilities_impl<double>(
            n, [&](std::uint64_t i) { return amps[i].real(); });
    }
    return detail::bell_probabilities_impl<Complex>(
        n, [&](std::uint64_t i) { return amps[i]; });
}

[[nodiscard]] inline BellBatch sample_bell(const StateVector &state,
                                           std::size_t shots, Rng &rng) {
    detail::require(shots >= 1, "shot count must be positive");
    const std::size_t n = state.n_qubits();
    const auto probs = bell_probabilities(state);
    const DiscreteSampler sampler(probs);
    const std::uint64_t low = (std::uint64_t{1} << n) - 1;
    BellBatch batch{n, std::vector<BellOutcome>(shots)};
    for (auto &o : batch.outcomes) {
        const std::uint64_t k = sampler(rng);
        o = {k & low, k >> n};
    }
    return batch;
}

[[nodiscard]] inline BellBatch sample_bell(const StateVector &state,
                                           std::size_t shots,
                                           std::uint64_t seed) {
    Rng rng(seed);
    return sample_bell(state, shots, rng);
}

/// Eigenvalue of P⊗P on one Bell outcome.
[[nodiscard]] inline int bell_eigenvalue(const BellOutcome &o,
                                         const PauliOperator &op) noexcept {
    const int parity = std::popcount(o.phase_bits & op.x_mask()) +
                       std::popcount(o.parity_bits & op.z_mask()) +
                       static_cast<int>(op.y_count());
    return (parity & 1) ? -1 : 1;
}

/// Sample mean of the P⊗P eigenvalue: an unbiased estimate of ⟨P⟩².
[[nodiscard]] inline double pauli_square_estimate(const BellBatch &batch,
                                                  const PauliOperator &op) {
    detail::require_size(op.n_qubits() == batch.n_qubits,
                         "operator width differs from Bell outcome width");
    detail::require(batch.shots() > 0, "empty Bell batch");
    long long acc = 0;
    for (const auto &o : batch.outcomes) {
        acc += bell_eigenvalue(o, op);
    }
    return static_cast<double>(acc) / static_cast<double>(batch.shots());
}

/**
 * Square estimates for many operators from one shared batch. Outcomes are
 * transposed into one bit-plane per measured bit, so each operator costs an
 * XOR of the planes it touches and a popcount per 64 shots.
 */
[[nodiscard]] inline std::vector<double>
pauli_square_estimates(const BellBatch &batch,
                       std::span<const PauliOperator> ops) {
    detail::require(batch.shots() > 0, "empty Bell batch");
    const std::size_t n = batch.n_qubits;
    detail::require(2 * n <= 64, "Bell outcome does not fit a machine word");
    const std::size_t shots = batch.shots();
    const std::size_t words = (shots + 63) / 64;
    std::vector<std::uint64_t> planes(2 * n * words, 0);
    for (std::size_t s = 0; s < shots; ++s) {
        const std::uint64_t w = batch.outcomes[s].phase_bits |
                                (batch.outcomes[s].parity_bits << n);
        const std::uint64_t bit = std::uint64_t{1} << (s % 64);
        for (std::size_t k = 0; k < 2 * n; ++k) {
            if ((w >> k) & 1U) {
                planes[k * words + s / 64] |= bit;
            }
        }
    }
    std::vector<double> out;
    out.reserve(ops.size());
    std::vector<std::uint64_t> acc(words);
    for (const auto &op : ops) {
        detail::require_size(op.n_qubits() == n,
                             "operator width differs from Bell outcome width");
        std::fill(acc.begin(), acc.end(), 0);
        for (std::uint64_t mask = op.x_mask() | (op.z_mask() << n); mask != 0;
             mask &= mask - 1) {
            const std::uint64_t *plane =
                planes.data() + static_cast<std::size_t>(std::countr_zero(mask)) * words;
            for (std::size_t i = 0; i < words; ++i) {
                acc[i] ^= plane[i];
            }
        }
        long long odd = 0;
        for (const auto w : acc) {
            odd += std::popcount(w);
        }
        long long total = static_cast<long long>(shots) - 2 * odd;
        if (op.y_count() & 1U) {
            total = -total;
        }
        out.push_back(static_cast<double>(total) / static_cast<double>(shots));
    }
    return out;
}

/// Probability-weighted P⊗P eigenvalue over an exact Bell distribution.
[[nodiscard]] inline double
weighted_square_estimate(std::span<const double> bell_probs,
                         std::size_t n_qubits, const PauliOperator &op) {
    detail::require_size(op.n_qubits() == n_qubits &&
                             bell_probs.size() ==
                                 (std::size_t{1} << (2 * n_qubits)),
                         "distribution width differs from operator width");
    const std::uint64_t low = (std::uint64_t{1} << n_qubits) - 1;
    double acc = 0.0;
    for (std::uint64_t k = 0; k < bell_probs.size(); ++k) {
        acc += bell_probs[k] * bell_eigenvalue({k & low, k >> n_qubits}, op);
    }
    return acc;
}

/// √max{0, s}: the absolute-value estimate from a squared estimate.
[[nodiscard]] inline double abs_from_square(double squared) {
    constexpr double slack = 1e-12;
    detail::require(squared >= -1.0 - slack && squared <= 1.0 + slack,
                    "squared estimate outside [-1, 1]");
    return std::sqrt(std::clamp(squared, 0.0, 1.0));
}

struct AbsEstimate {
    PauliOperator op;
    double squared_estimate = 0.0;
    double abs_estimate = 0.0;
    std::size_t shots = 0;
};

[[nodiscard]] inline AbsEstimate estimate_abs(const BellBatch &batch,
                                              const PauliOperator &op) {
    const double sq = pauli_square_estimate(batch, op);
    return {op, sq, abs_from_square(sq), batch.shots()};
}

/// Closed-form bias of the absolute-value estimator under a uniform
/// smearing of the squared estimate over ±σ.
struct BiasPrediction {
    double bias = 0.0;
    double sigma = 0.0;
    bool zero_expectation_branch = false;
    /// The nonzero branch assumes ⟨P⟩² > σ.
    bool valid = true;
};

[[nodiscard]] inline BiasPrediction bias_prediction(std::size_t shots,
                                                    double true_expectation) {
    detail::require(shots >= 1, "shot count must be positive");
    detail::require(true_expectation >= -1.0 && true_expectation <= 1.0,
                    "expectation outside [-1, 1]");
    const double m = static_cast<double>(shots);
    const double y = std::abs(true_expectation);
    if (y == 0.0) {
        const double sigma = 1.0 / std::sqrt(m);
        return {std::sqrt(sigma) / 3.0, sigma, true, true};
    }
    const double y2 = y * y;
    const double sigma = std::sqrt((1.0 - y2 * y2) / m);
    const double bias = sigma == 0.0 ? 0.0 : -sigma * sigma / (24.0 * y2 * y);
    return {bias, sigma, false, y2 > sigma};
}

} // namespace jbmvqe
