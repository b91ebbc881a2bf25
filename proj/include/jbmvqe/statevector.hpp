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
 * Dense statevector simulator with the handful of gates the ansatz and the
 * measurement circuits need, plus exact expectation values and
 * computational-basis sampling.
 */

#include "jbmvqe/error.hpp"
#include "jbmvqe/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace jbmvqe {

using Complex = std::complex<double>;

/// Normalization tolerance for externally supplied amplitudes.
inline constexpr double norm_tolerance = 1e-10;

class StateVector {
  public:
    StateVector() = default;

    /// Computational basis state |index⟩.
    static StateVector basis_state(std::size_t n_qubits, std::uint64_t index) {
        StateVector s(n_qubits);
        detail::require(index < s.amps_.size(), "basis index out of range");
        s.amps_[index] = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::size_t n_qubits,
                                       std::vector<Complex> amplitudes) {
        detail::require(n_qubits >= 1 && n_qubits <= 2 * 12,
                        "statevector width must be in [1, 24]");
        detail::require_size(amplitudes.size() == (std::size_t{1} << n_qubits),
                             "amplitude count must be 2^n_qubits");
        StateVector s;
        s.n_qubits_ = n_qubits;
        s.amps_ = std::move(amplitudes);
        detail::require(std::abs(s.norm_squared() - 1.0) <= norm_tolerance,
                        "amplitudes are not normalized");
        return s;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] const Complex &operator[](std::size_t i) const {
        return amps_[i];
    }

    [[nodiscard]] double norm_squared() const noexcept {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        std::transform(amps_.begin(), amps_.end(), p.begin(),
                       [](const Complex &a) { return std::norm(a); });
        return p;
    }

    void apply_hadamard(std::size_t q) {
        check_qubit(q);
        const double r = std::numbers::sqrt2 / 2.0;
        for_each_pair(q, [r](Complex &a0, Complex &a1) {
            const Complex u = a0;
            const Complex v = a1;
            a0 = r * (u + v);
            a1 = r * (u - v);
        });
    }

    /// S† = diag(1, -i).
    void apply_sdg(std::size_t q) {
        check_qubit(q);
        for_each_pair(q, [](Complex &, Complex &a1) {
            a1 = Complex(a1.imag(), -a1.real());
        });
    }

    /// Ry(θ) = exp(-iθY/2).
    void apply_ry(std::size_t q, double angle) {
        check_qubit(q);
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        for_each_pair(q, [c, s](Complex &a0, Complex &a1) {
            const Complex u = a0;
            const Complex v = a1;
            a0 = c * u - s * v;
            a1 = s * u + c * v;
        });
    }

    void apply_cnot(std::size_t control, std::size_t target) {
        check_qubit(control);
        check_qubit(target);
        detail::require(control != target, "CNOT control equals target");
        const std::uint64_t cbit = std::uint64_t{1} << control;
        const std::uint64_t tbit = std::uint64_t{1} << target;
        for (std::uint64_t i = 0; i < amps_.size(); ++i) {
            if ((i & cbit) != 0 && (i & tbit) == 0) {
                std::swap(amps_[i], amps_[i | tbit]);
            }
        }
    }

    /// Maps each letter to the computational basis: H for X, H·S† for Y.
    void rotate_to_basis(const PauliOperator &basis) {
        detail::require_size(basis.n_qubits() == n_qubits_,
                             "basis width differs from state width");
        for (std::size_t q = 0; q < n_qubits_; ++q) {
            switch (basis.letter(q)) {
            case Pauli::X:
                apply_hadamard(q);
                break;
            case Pauli::Y:
                apply_sdg(q);
                apply_hadamard(q);
                break;
            default:
                break;
            }
        }
    }

  private:
    explicit StateVector(std::size_t n_qubits)
        : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
        detail::require(n_qubits >= 1 && n_qubits <= 2 * 12,
                        "statevector width must be in [1, 24]");
    }

    void check_qubit(std::size_t q) const {
        detail::require(q < n_qubits_, "qubit index out of range");
    }

    // Visits (|..0_q..⟩, |..1_q..⟩) amplitude pairs by bit-masked strides.
    template <class F>
    void for_each_pair(std::size_t q, F &&f) {
        const std::uint64_t stride = std::uint64_t{1} << q;
        const std::uint64_t dim = amps_.size();
        for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
            for (std::uint64_t i = base; i < base + stride; ++i) {
                f(amps_[i], amps_[i + stride]);
            }
        }
    }

    std::size_t n_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// Basis state with the n_electrons lowest-index qubits set to |1⟩.
[[nodiscard]] inline StateVector prepare_reference(std::size_t n_qubits,
                                                   std::size_t n_electrons) {
    detail::require(n_qubits >= 1 && n_qubits <= 12,
                    "register width must be in [1, 12]");
    detail::require(n_electrons <= n_qubits,
                    "electron count exceeds qubit count");
    return StateVector::basis_state(n_qubits,
                                    (std::uint64_t{1} << n_electrons) - 1);
}

/**
 * @brief Number-conserving real ansatz made of two-qubit blocks on
 * neighbouring qubits.
 *
 * Each layer is a brick: blocks on (0,1),(2,3),... followed by blocks on
 * (1,2),(3,4),.... A block with angle θ on pair (a,b) applies, in order,
 *
 *     CNOT(a→b), Ry(θ − π/2) on a, CNOT(b→a), Ry(π/2 − θ) on a, CNOT(a→b)
 *
 * which acts as the reflection [[cos θ, sin θ], [sin θ, −cos θ]] on
 * span{|1_a 0_b⟩, |0_a 1_b⟩} and as identity on |00⟩ and |11⟩.
 */
class AnsatzCircuit {
  public:
    AnsatzCircuit(std::size_t n_qubits, std::size_t n_electrons,
                  std::size_t depth)
        : n_qubits_(n_qubits), n_electrons_(n_electrons), depth_(depth) {
        detail::require(n_qubits >= 1 && n_qubits <= 12,
                        "ansatz width must be in [1, 12]");
        detail::require(n_electrons <= n_qubits,
                        "electron count exceeds qubit count");
        for (std::size_t layer = 0; layer < depth; ++layer) {
            for (std::size_t offset : {0U, 1U}) {
                for (std::size_t a = offset; a + 1 < n_qubits; a += 2) {
                    blocks_.emplace_back(a, a + 1);
                }
            }
        }
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t n_electrons() const noexcept {
        return n_electrons_;
    }
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }

    /// One angle per block.
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return blocks_.size();
    }

    /// Rotation gates per block; each block angle drives two Ry gates.
    static constexpr std::size_t gates_per_block = 2;

    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>> &
    blocks() const noexcept {
        return blocks_;
    }

  private:
    std::size_t n_qubits_;
    std::size_t n_electrons_;
    std::size_t depth_;
    std::vector<std::pair<std::size_t, std::size_t>> blocks_;
};

using ParameterVector = std::vector<double>;

/// Per-gate Ry angles (two per block) for the given block angles.
[[nodiscard]] inline std::vector<double>
gate_angles(const AnsatzCircuit &circuit, std::span<const double> params) {
    detail::require_size(params.size() == circuit.parameter_count(),
                         "parameter vector length differs from circuit");
    std::vector<double> angles;
    angles.reserve(params.size() * AnsatzCircuit::gates_per_block);
    for (const double theta : params) {
        const double phi = theta - std::numbers::pi / 2.0;
        angles.push_back(phi);
        angles.push_back(-phi);
    }
    return angles;
}

/// Runs the block sequence with explicit per-gate Ry angles.
[[nodiscard]] inline StateVector
apply_ansatz_gates(const AnsatzCircuit &circuit,
                   std::span<const double> angles) {
    detail::require_size(angles.size() == circuit.parameter_count() *
                                              AnsatzCircuit::gates_per_block,
                         "gate angle count differs from circuit");
    StateVector state =
        prepare_reference(circuit.n_qubits(), circuit.n_electrons());
    std::size_t k = 0;
    for (const auto &[a, b] : circuit.blocks()) {
        state.apply_cnot(a, b);
        state.apply_ry(a, angles[k++]);
        state.apply_cnot(b, a);
        state.apply_ry(a, angles[k++]);
        state.apply_cnot(a, b);
    }
    return state;
}

[[nodiscard]] inline StateVector apply_ansatz(const AnsatzCircuit &circuit,
                                              std::span<const double> params) {
    const auto angles = gate_angles(circuit, params);
    return apply_ansatz_gates(circuit, angles);
}

/// ⟨ψ|P|ψ⟩ for a single Pauli string.
[[nodiscard]] inline double exact_expectation(const StateVector &state,
                                              const PauliOperator &op) {
    detail::require_size(state.n_qubits() == op.n_qubits(),
                         "operator width differs from state width");
    const std::uint64_t x = op.x_mask();
    const std::uint64_t z = op.z_mask();
    // P|k⟩ = i^{#Y} (-1)^{|k & z|} |k ^ x⟩
    static constexpr Complex iy[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex phase = iy[op.y_count() % 4];
    const auto amps = state.amplitudes();
    Complex acc = 0.0;
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        const Complex term = std::conj(amps[k ^ x]) * amps[k];
        acc += (std::popcount(k & z) & 1) ? -term : term;
    }
    return (phase * acc).real();
}

[[nodiscard]] inline double exact_energy(const StateVector &state,
                                         const Hamiltonian &h) {
    detail::require_size(state.n_qubits() == h.n_qubits(),
                         "Hamiltonian width differs from state width");
    double e = h.identity_offset();
    for (const auto &t : h.terms()) {
        e += t.coefficient * exact_expectation(state, t.op);
    }
    return e;
}

/**
 * Samples indices from a fixed discrete distribution by inverse CDF. A guide
 * table maps each of n equal slices of [0, total) to the first CDF entry
 * that can cover it, so lookups are a short forward scan.
 */
class DiscreteSampler {
  public:
    explicit DiscreteSampler(std::span<const double> weights)
        : cdf_(weights.size()), guide_(weights.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            cdf_[i] = acc;
        }
        detail::require(acc > 0.0, "distribution has zero mass");
        total_ = acc;
        last_ = static_cast<std::size_t>(
            std::lower_bound(cdf_.begin(), cdf_.end(), total_) - cdf_.begin());
        const double width = total_ / static_cast<double>(cdf_.size());
        std::size_t k = 0;
        for (std::size_t s = 0; s < guide_.size(); ++s) {
            const double lo = width * static_cast<double>(s);
            while (k < last_ && cdf_[k] <= lo) {
                ++k;
            }
            guide_[s] = k;
        }
    }

    template <class Rng>
    std::uint64_t operator()(Rng &rng) const {
        std::uniform_real_distribution<double> u(0.0, total_);
        const double r = u(rng);
        auto slice = static_cast<std::size_t>(
            r / total_ * static_cast<double>(cdf_.size()));
        slice = std::min(slice, guide_.size() - 1);
        std::size_t k = guide_[slice];
        while (k > 0 && cdf_[k - 1] > r) { // slice rounding at a boundary
            --k;
        }
        // First index with cdf > r; a draw rounded up to total_ takes the
        // last outcome with mass.
        while (k < last_ && cdf_[k] <= r) {
            ++k;
        }
        return k;
    }

  private:
    std::vector<double> cdf_;
    std::vector<std::size_t> guide_;
    double total_ = 0.0;
    std::size_t last_ = 0;
};

using Rng = std::mt19937_64;

/**
 * Projective measurement in a per-qubit Pauli basis. Returns one n-bit
 * outcome per shot; bit q is the readout of qubit q, 1 meaning the −1
 * eigenvalue of the letter on q.
 */
[[nodiscard]] inline std::vector<std::uint64_t>
sample_projective(const StateVector &state, const PauliOperator &basis,
                  std::size_t shots, Rng &rng) {
    detail::require(shots >= 1, "shot count must be positive");
    StateVector rotated = state;
    rotated.rotate_to_basis(basis);
    const auto probs = rotated.probabilities();
    const DiscreteSampler sampler(probs);
    std::vector<std::uint64_t> out(shots);
    for (auto &o : out) {
        o = sampler(rng);
    }
    return out;
}

[[nodiscard]] inline std::vector<std::uint64_t>
sample_projective(const StateVector &state, const PauliOperator &basis,
                  std::size_t shots, std::uint64_t seed) {
    Rng rng(seed);
    return sample_projective(state, basis, shots, rng);
}

/// "0101..." rendering of an outcome, qubit 0 first.
[[nodiscard]] inline std::string outcome_string(std::uint64_t outcome,
                                                std::size_t n_qubits) {
    std::string s(n_qubits, '0');
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if ((outcome >> q) & 1U) {
            s[q] = '1';
        }
    }
    return s;
}

/// Mean of (−1)^{|outcome & support|}: the estimate of a diagonal Pauli.
[[nodiscard]] inline double parity_mean(std::span<const std::uint64_t> outcomes,
                                        std::uint64_t support) {
    detail::require(!outcomes.empty(), "no outcomes");
    long long acc = 0;
    for (const auto o : outcomes) {
        acc += (std::popcount(o & support) & 1) ? -1 : 1;
    }
    return static_cast<double>(acc) / static_cast<double>(outcomes.size());
}

} // namespace jbmvqe
