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

// Dense exact-diagonalization oracle for small Hamiltonians.

#include "jbmvqe/error.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/statevector.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <vector>

namespace jbmvqe {

/// Largest register the dense oracle accepts (2^10 × 2^10 matrix).
inline constexpr std::size_t max_dense_qubits = 10;

[[nodiscard]] inline Eigen::MatrixXcd dense_matrix(const Hamiltonian &h) {
    detail::require(h.n_qubits() <= max_dense_qubits,
                    "system too large for the dense eigensolver");
    const std::uint64_t dim = std::uint64_t{1} << h.n_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    static constexpr Complex iy[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto &t : h.terms()) {
        const Complex phase = t.coefficient * iy[t.op.y_count() % 4];
        const std::uint64_t x = t.op.x_mask();
        const std::uint64_t z = t.op.z_mask();
        for (std::uint64_t k = 0; k < dim; ++k) {
            const Complex v = (std::popcount(k & z) & 1) ? -phase : phase;
            m(static_cast<Eigen::Index>(k ^ x), static_cast<Eigen::Index>(k)) += v;
        }
    }
    return m;
}

struct GroundState {
    double energy = 0.0;
    StateVector state;
};

/**
 * Lowest eigenvalue (plus the identity offset) and a normalized eigenvector
 * of Σ_j λ_j P_j.
 */
[[nodiscard]] inline GroundState exact_ground_energy(const Hamiltonian &h) {
    const Eigen::MatrixXcd m = dense_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("dense eigensolver failed to converge");
    }
    const Eigen::VectorXcd v = solver.eigenvectors().col(0);
    std::vector<Complex> amps(v.data(), v.data() + v.size());
    double norm = 0.0;
    for (const auto &a : amps) {
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return {solver.eigenvalues()(0) + h.identity_offset(),
            StateVector::from_amplitudes(h.n_qubits(), std::move(amps))};
}

} // namespace jbmvqe
