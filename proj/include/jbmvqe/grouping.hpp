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

// Qubit-wise-commuting grouping of Hamiltonian terms and grouped projective
// estimation.

#include "jbmvqe/error.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

namespace jbmvqe {

struct MeasurementGroup {
    std::vector<std::size_t> members; ///< indices into Hamiltonian::terms()
    PauliOperator basis;              ///< per-qubit join of member letters
};

/// Term indices ordered by |λ| descending, ties by operator order.
[[nodiscard]] inline std::vector<std::size_t>
greedy_order(const Hamiltonian &h) {
    const auto &terms = h.terms();
    std::vector<std::size_t> order(terms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ca = std::abs(terms[a].coefficient);
        const double cb = std::abs(terms[b].coefficient);
        if (ca != cb) {
            return ca > cb;
        }
        return terms[a].op < terms[b].op;
    });
    return order;
}

/**
 * First-fit greedy grouping: terms are visited in greedy_order() and each
 * joins the earliest-created group it qubit-wise commutes with, otherwise it
 * opens a new group.
 */
[[nodiscard]] inline std::vector<MeasurementGroup>
group_qwc_greedy(const Hamiltonian &h) {
    detail::require(h.term_count() > 0, "Hamiltonian has no terms to group");
    std::vector<MeasurementGroup> groups;
    for (const std::size_t j : greedy_order(h)) {
        const PauliOperator &op = h.terms()[j].op;
        // Commuting with the join is the same as commuting with every member.
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const MeasurementGroup &g) {
                                   return qwc_compatible(g.basis, op);
                               });
        if (it == groups.end()) {
            groups.push_back({{j}, op});
            continue;
        }
        it->members.push_back(j);
        for (std::size_t q = 0; q < op.n_qubits(); ++q) {
            if (op.letter(q) != Pauli::I) {
                it->basis.set(q, op.letter(q));
            }
        }
    }
    return groups;
}

/// Estimates every member of `group` from one projective batch in its basis.
[[nodiscard]] inline std::map<std::size_t, double>
estimate_group_expectations(const StateVector &state, const Hamiltonian &h,
                            const MeasurementGroup &group, std::size_t shots,
                            Rng &rng) {
    detail::require_size(state.n_qubits() == h.n_qubits() &&
                             group.basis.n_qubits() == h.n_qubits(),
                         "group, state and Hamiltonian widths differ");
    const auto outcomes = sample_projective(state, group.basis, shots, rng);
    std::map<std::size_t, double> out;
    for (const std::size_t j : group.members) {
        detail::require(j < h.term_count(), "group member out of range");
        out[j] = parity_mean(outcomes, h.terms()[j].op.support());
    }
    return out;
}

[[nodiscard]] inline std::map<std::size_t, double>
estimate_group_expectations(const StateVector &state, const Hamiltonian &h,
                            const MeasurementGroup &group, std::size_t shots,
                            std::uint64_t seed) {
    Rng rng(seed);
    return estimate_group_expectations(state, h, group, shots, rng);
}

/// Per-term estimates with `shots_per_group` shots spent on every group.
[[nodiscard]] inline std::vector<double>
estimate_all_grouped(const StateVector &state, const Hamiltonian &h,
                     const std::vector<MeasurementGroup> &groups,
                     std::size_t shots_per_group, Rng &rng) {
    std::vector<double> est(h.term_count(), 0.0);
    for (const auto &g : groups) {
        for (const auto &[j, v] :
             estimate_group_expectations(state, h, g, shots_per_group, rng)) {
            est[j] = v;
        }
    }
    return est;
}

} // namespace jbmvqe
