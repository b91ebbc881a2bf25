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

#include "jbmvqe/pauli.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <string>

using namespace jbmvqe;
using Catch::Matchers::WithinAbs;

using oracle::pauli_matrix;
using oracle::random_pauli;

namespace {

const std::string data_dir = oracle::data_dir;

} // namespace

TEST_CASE("Pauli strings round-trip through text and masks") {
    const auto p = PauliOperator::from_string("XIZY");
    CHECK(p.n_qubits() == 4);
    CHECK(p.letter(0) == Pauli::X);
    CHECK(p.letter(1) == Pauli::I);
    CHECK(p.letter(2) == Pauli::Z);
    CHECK(p.letter(3) == Pauli::Y);
    CHECK(p.x_mask() == 0b1001);
    CHECK(p.z_mask() == 0b1100);
    CHECK(p.y_count() == 1);
    CHECK(p.weight() == 3);
    CHECK(p.to_string() == "XIZY");
    CHECK(PauliOperator::from_string("III").is_identity());
    CHECK_THROWS_AS(PauliOperator::from_string("XQ"), InvalidArgument);
    CHECK_THROWS_AS(PauliOperator::from_string(""), InvalidArgument);
}

TEST_CASE("qwc_compatible examples") {
    auto P = [](const char *s) { return PauliOperator::from_string(s); };
    CHECK(qwc_compatible(P("ZI"), P("ZZ")));
    CHECK_FALSE(qwc_compatible(P("ZZ"), P("XX")));
    CHECK(qwc_compatible(P("XIZ"), P("XYZ")));
    CHECK_THROWS_AS(qwc_compatible(P("ZI"), P("Z")), SizeMismatch);
}

TEST_CASE("qwc_compatible is symmetric, reflexive and implies commuting matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto a = random_pauli(n, rng);
        const auto b = random_pauli(n, rng);
        CHECK(qwc_compatible(a, a));
        CHECK(qwc_compatible(a, b) == qwc_compatible(b, a));
        if (qwc_compatible(a, b)) {
            const auto ma = pauli_matrix(a);
            const auto mb = pauli_matrix(b);
            CHECK((ma * mb - mb * ma).norm() < 1e-12);
        }
    }
}

TEST_CASE("parse_hamiltonian basic examples") {
    SECTION("single term") {
        const auto h = parse_hamiltonian("# n_qubits = 2\n0.5 Z0\n");
        REQUIRE(h.term_count() == 1);
        CHECK(h.terms()[0].coefficient == 0.5);
        CHECK(h.terms()[0].op.to_string() == "ZI");
        CHECK(h.identity_offset() == 0.0);
    }
    SECTION("identity only") {
        const auto h = parse_hamiltonian("# n_qubits = 2\n1.0 I\n");
        CHECK(h.term_count() == 0);
        CHECK(term_count(h) == 0);
        CHECK(h.identity_offset() == 1.0);
    }
    SECTION("duplicates merge, cancellations drop, identities fold") {
        const auto h = parse_hamiltonian("# n_qubits = 3\n"
                                         "# a free comment\n"
                                         "\n"
                                         "0.25 X0 Z2\n"
                                         "0.5 Z2 X0\n"
                                         "1.0 Y1\n"
                                         "-1.0 Y1\n"
                                         "0.1\n"
                                         "0.2 I\n");
        REQUIRE(h.term_count() == 1);
        CHECK(h.terms()[0].op.to_string() == "XIZ");
        CHECK_THAT(h.terms()[0].coefficient, WithinAbs(0.75, 1e-15));
        CHECK_THAT(h.identity_offset(), WithinAbs(0.3, 1e-15));
    }
    SECTION("metadata") {
        const auto h = parse_hamiltonian("# n_qubits = 2\n# n_electrons = 1\n"
                                         "# molecule = Test\n"
                                         "# note = x; fci_energy=-1.5\n1 Z1\n");
        CHECK(h.n_electrons() == 1);
        CHECK(h.metadata().at("molecule") == "Test");
        CHECK(h.recorded_value("fci_energy") == -1.5);
        CHECK_FALSE(h.recorded_value("hf_energy").has_value());
    }
}

TEST_CASE("parse_hamiltonian rejects malformed input with line numbers") {
    auto line_of = [](const char *text) -> std::size_t {
        try {
            (void)parse_hamiltonian(text);
        } catch (const ParseError &e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("0.5 Z0\n") != 0);                          // no n_qubits
    CHECK(line_of("# n_qubits = 2\n0.5 Z2\n") == 2);          // index ≥ n
    CHECK(line_of("# n_qubits = 2\n\n0.5 Q0\n") == 3);        // unknown letter
    CHECK(line_of("# n_qubits = 2\nabc Z0\n") == 2);          // coefficient
    CHECK(line_of("# n_qubits = 2\n0.5 Zx\n") == 2);          // factor
    CHECK(line_of("# n_qubits = 2\n0.5 Z0 X0\n") == 2);       // repeated qubit
    CHECK(line_of("# n_qubits = 2\n# n_qubits = 2\n") == 2);  // duplicate key
    CHECK(line_of("# n_qubits = two\n") == 1);
}

TEST_CASE("serialization is inverted by parsing") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> coef(0.0, 1.0);
    std::vector<PauliTerm> raw;
    for (int i = 0; i < 60; ++i) {
        raw.push_back({coef(rng), random_pauli(5, rng)});
    }
    const auto h = Hamiltonian::from_raw_terms(5, raw, 0.25, {{"molecule", "random"}});
    const auto back = parse_hamiltonian(serialize_hamiltonian(h));
    REQUIRE(back.term_count() == h.term_count());
    for (std::size_t j = 0; j < h.term_count(); ++j) {
        CHECK(back.terms()[j].op == h.terms()[j].op);
        CHECK(back.terms()[j].coefficient == h.terms()[j].coefficient);
    }
    CHECK(back.identity_offset() == h.identity_offset());
    CHECK(back.metadata() == h.metadata());
    for (std::size_t j = 1; j < back.term_count(); ++j) {
        CHECK(back.terms()[j - 1].op < back.terms()[j].op);
    }
}

TEST_CASE("Hamiltonian constructor enforces invariants") {
    const auto z = PauliOperator::from_string("ZI");
    CHECK_THROWS_AS(Hamiltonian(2, {{1.0, z}, {2.0, z}}), InvalidArgument);
    CHECK_THROWS_AS(Hamiltonian(2, {{1.0, PauliOperator(2)}}), InvalidArgument);
    CHECK_THROWS_AS(Hamiltonian(3, {{1.0, z}}), SizeMismatch);
    CHECK_THROWS_AS(Hamiltonian(2, {{std::nan(""), z}}), InvalidArgument);
}

TEST_CASE("bundled fixtures have the expected term counts") {
    const auto h2 = load_hamiltonian(data_dir + "/hamiltonians/h2.ham");
    CHECK(h2.n_qubits() == 4);
    CHECK(term_count(h2) == 14);
    CHECK(h2.n_electrons() == 2);
    const auto h4 = load_hamiltonian(data_dir + "/hamiltonians/h4.ham");
    CHECK(h4.n_qubits() == 8);
    CHECK(term_count(h4) == 184);
    CHECK_THROWS_AS(load_hamiltonian(data_dir + "/missing.ham"), Error);
}
