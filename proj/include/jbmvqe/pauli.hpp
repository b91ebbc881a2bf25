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
 * Pauli strings and Pauli-sum Hamiltonians with their line-oriented text
 * format.
 *
 * Qubit 0 is the leftmost letter of a serialized string and the least
 * significant bit of a basis-state index.
 */

#include "jbmvqe/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace jbmvqe {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::size_t max_qubits = 32;

[[nodiscard]] inline char to_char(Pauli p) noexcept {
    constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
    return letters[static_cast<std::uint8_t>(p)];
}

[[nodiscard]] inline std::optional<Pauli> pauli_from_char(char c) noexcept {
    switch (c) {
    case 'I':
        return Pauli::I;
    case 'X':
        return Pauli::X;
    case 'Y':
        return Pauli::Y;
    case 'Z':
        return Pauli::Z;
    default:
        return std::nullopt;
    }
}

/**
 * @brief An n-qubit tensor product of single-qubit Paulis, stored as
 * symplectic bit masks.
 *
 * Bit q of x_mask() is set when the letter on qubit q is X or Y; bit q of
 * z_mask() is set when it is Z or Y.
 */
class PauliOperator {
  public:
    PauliOperator() = default;

    explicit PauliOperator(std::size_t n_qubits) : n_qubits_(n_qubits) {
        detail::require(n_qubits >= 1 && n_qubits <= max_qubits,
                        "qubit count must be in [1, " +
                            std::to_string(max_qubits) + "]");
    }

    PauliOperator(std::size_t n_qubits, std::uint64_t x_mask,
                  std::uint64_t z_mask)
        : PauliOperator(n_qubits) {
        const std::uint64_t full = full_mask();
        detail::require((x_mask & ~full) == 0 && (z_mask & ~full) == 0,
                        "mask has bits beyond the qubit count");
        x_ = x_mask;
        z_ = z_mask;
    }

    /// Parses a dense letter string such as "XIZY" (qubit 0 first).
    static PauliOperator from_string(std::string_view letters) {
        PauliOperator op(letters.size());
        for (std::size_t q = 0; q < letters.size(); ++q) {
            const auto p = pauli_from_char(letters[q]);
            detail::require(p.has_value(), std::string("unknown Pauli letter '") +
                                               letters[q] + "'");
            op.set(q, *p);
        }
        return op;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::uint64_t x_mask() const noexcept { return x_; }
    [[nodiscard]] std::uint64_t z_mask() const noexcept { return z_; }
    [[nodiscard]] std::uint64_t support() const noexcept { return x_ | z_; }
    [[nodiscard]] std::size_t y_count() const noexcept {
        return static_cast<std::size_t>(std::popcount(x_ & z_));
    }
    [[nodiscard]] std::size_t weight() const noexcept {
        return static_cast<std::size_t>(std::popcount(support()));
    }
    [[nodiscard]] bool is_identity() const noexcept { return support() == 0; }

    [[nodiscard]] Pauli letter(std::size_t q) const {
        detail::require(q < n_qubits_, "qubit index out of range");
        const bool x = (x_ >> q) & 1U;
        const bool z = (z_ >> q) & 1U;
        if (x && z) {
            return Pauli::Y;
        }
        if (x) {
            return Pauli::X;
        }
        return z ? Pauli::Z : Pauli::I;
    }

    void set(std::size_t q, Pauli p) {
        detail::require(q < n_qubits_, "qubit index out of range");
        const std::uint64_t bit = std::uint64_t{1} << q;
        x_ &= ~bit;
        z_ &= ~bit;
        if (p == Pauli::X || p == Pauli::Y) {
            x_ |= bit;
        }
        if (p == Pauli::Z || p == Pauli::Y) {
            z_ |= bit;
        }
    }

    [[nodiscard]] std::string to_string() const {
        std::string s(n_qubits_, 'I');
        for (std::size_t q = 0; q < n_qubits_; ++q) {
            s[q] = to_char(letter(q));
        }
        return s;
    }

    friend bool operator==(const PauliOperator &,
                           const PauliOperator &) = default;

    /// Lexicographic order on the letter string with I < X < Y < Z.
    friend std::strong_ordering operator<=>(const PauliOperator &a,
                                            const PauliOperator &b) {
        const std::size_t n = std::min(a.n_qubits_, b.n_qubits_);
        for (std::size_t q = 0; q < n; ++q) {
            const auto la = static_cast<std::uint8_t>(a.letter(q));
            const auto lb = static_cast<std::uint8_t>(b.letter(q));
            if (la != lb) {
                return la <=> lb;
            }
        }
        return a.n_qubits_ <=> b.n_qubits_;
    }

  private:
    [[nodiscard]] std::uint64_t full_mask() const noexcept {
        return n_qubits_ >= 64 ? ~std::uint64_t{0}
                               : (std::uint64_t{1} << n_qubits_) - 1;
    }

    std::size_t n_qubits_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

/// True iff the two operators commute letter by letter.
[[nodiscard]] inline bool qwc_compatible(const PauliOperator &a,
                                         const PauliOperator &b) {
    detail::require_size(a.n_qubits() == b.n_qubits(),
                         "qwc_compatible: operators have different widths");
    const std::uint64_t both = a.support() & b.support();
    const std::uint64_t differ = (a.x_mask() ^ b.x_mask()) |
                                 (a.z_mask() ^ b.z_mask());
    return (both & differ) == 0;
}

struct PauliTerm {
    double coefficient = 0.0;
    PauliOperator op;

    friend bool operator==(const PauliTerm &, const PauliTerm &) = default;
};

/// Coefficients whose merged magnitude falls below this are dropped.
inline constexpr double merge_drop_tolerance = 1e-12;

/**
 * @brief A real linear combination of non-identity Pauli strings plus the
 * folded identity coefficient.
 *
 * Construction validates every invariant: matching widths, no identity term,
 * no duplicate operators, finite coefficients.
 */
class Hamiltonian {
  public:
    using Metadata = std::map<std::string, std::string>;

    Hamiltonian() = default;

    Hamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms,
                double identity_offset = 0.0, Metadata metadata = {})
        : n_qubits_(n_qubits), terms_(std::move(terms)),
          identity_offset_(identity_offset), metadata_(std::move(metadata)) {
        detail::require(n_qubits_ >= 1 && n_qubits_ <= max_qubits,
                        "Hamiltonian qubit count out of range");
        detail::require(std::isfinite(identity_offset_),
                        "identity offset must be finite");
        std::vector<PauliOperator> seen;
        seen.reserve(terms_.size());
        for (const auto &t : terms_) {
            detail::require_size(t.op.n_qubits() == n_qubits_,
                                 "term width differs from Hamiltonian width");
            detail::require(!t.op.is_identity(),
                            "identity term must be folded into the offset");
            detail::require(std::isfinite(t.coefficient),
                            "term coefficient must be finite");
            seen.push_back(t.op);
        }
        std::sort(seen.begin(), seen.end());
        detail::require(std::adjacent_find(seen.begin(), seen.end()) ==
                            seen.end(),
                        "duplicate Pauli operator in Hamiltonian");
    }

    /**
     * Builds a Hamiltonian from raw terms. Identity terms fold into the offset
     * and duplicates are summed; merged terms that cancel are dropped. Terms
     * end up sorted by operator.
     */
    static Hamiltonian from_raw_terms(std::size_t n_qubits,
                                      const std::vector<PauliTerm> &raw,
                                      double identity_offset = 0.0,
                                      Metadata metadata = {}) {
        std::map<PauliOperator, double> merged;
        for (const auto &t : raw) {
            if (t.op.is_identity()) {
                identity_offset += t.coefficient;
            } else {
                merged[t.op] += t.coefficient;
            }
        }
        std::vector<PauliTerm> terms;
        terms.reserve(merged.size());
        for (const auto &[op, c] : merged) {
            if (std::abs(c) >= merge_drop_tolerance) {
                terms.push_back({c, op});
            }
        }
        return {n_qubits, std::move(terms), identity_offset,
                std::move(metadata)};
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const noexcept {
        return terms_;
    }
    [[nodiscard]] double identity_offset() const noexcept {
        return identity_offset_;
    }
    [[nodiscard]] const Metadata &metadata() const noexcept {
        return metadata_;
    }

    /// Number of non-identity terms M.
    [[nodiscard]] std::size_t term_count() const noexcept {
        return terms_.size();
    }

    /**
     * Looks up `key=value` inside the `note` metadata entry, the place where
     * fixture generators record reference energies (`hf_energy`,
     * `fci_energy`).
     */
    [[nodiscard]] std::optional<double> recorded_value(std::string_view key) const {
        const auto it = metadata_.find("note");
        if (it == metadata_.end()) {
            return std::nullopt;
        }
        const std::string &note = it->second;
        const std::string needle = std::string(key) + "=";
        std::size_t pos = 0;
        while ((pos = note.find(needle, pos)) != std::string::npos) {
            const bool at_boundary =
                pos == 0 || note[pos - 1] == ' ' || note[pos - 1] == ';';
            pos += needle.size();
            if (!at_boundary) {
                continue;
            }
            double v = 0.0;
            const char *first = note.data() + pos;
            const char *last = note.data() + note.size();
            if (auto [p, ec] = std::from_chars(first, last, v);
                ec == std::errc{}) {
                return v;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::optional<int> n_electrons() const {
        const auto it = metadata_.find("n_electrons");
        if (it == metadata_.end()) {
            return std::nullopt;
        }
        return std::stoi(it->second);
    }

    friend bool operator==(const Hamiltonian &, const Hamiltonian &) = default;

  private:
    std::size_t n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
    double identity_offset_ = 0.0;
    Metadata metadata_;
};

[[nodiscard]] inline std::size_t term_count(const Hamiltonian &h) noexcept {
    return h.term_count();
}

namespace detail {

inline const std::vector<std::string> &header_keys() {
    static const std::vector<std::string> keys = {
        "n_qubits", "n_electrons", "molecule", "basis", "geometry", "note"};
    return keys;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T &out) {
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, p};
}

} // namespace detail

/**
 * @brief Parses the sparse Pauli text format.
 *
 * Header lines read `# key = value` for the keys n_qubits (required),
 * n_electrons, molecule, basis, geometry and note. Other `#` lines and blank
 * lines are ignored. Term lines read `<coefficient> <factor>...` with factors
 * `X<i>`, `Y<i>`, `Z<i>`; a bare `I` (or no factor) is the identity term.
 */
inline Hamiltonian parse_hamiltonian(std::string_view text) {
    struct RawLine {
        std::size_t line;
        double coefficient;
        std::vector<std::pair<std::size_t, Pauli>> factors;
    };
    std::vector<RawLine> raw;
    Hamiltonian::Metadata meta;
    std::optional<std::size_t> n_qubits;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto end = eol == std::string_view::npos ? text.size() : eol;
        const std::string_view line = detail::trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) {
            if (eol == std::string_view::npos) {
                break;
            }
            continue;
        }
        if (line.front() == '#') {
            const std::string_view body = detail::trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            const std::string key(detail::trim(body.substr(0, eq)));
            const auto &keys = detail::header_keys();
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                continue;
            }
            const std::string value(detail::trim(body.substr(eq + 1)));
            if (meta.count(key) != 0 || (key == "n_qubits" && n_qubits)) {
                throw ParseError(line_no, "duplicate header key '" + key + "'");
            }
            if (key == "n_qubits") {
                std::size_t n = 0;
                if (!detail::parse_number(value, n) || n == 0 ||
                    n > max_qubits) {
                    throw ParseError(line_no, "invalid n_qubits '" + value + "'");
                }
                n_qubits = n;
            } else {
                if (key == "n_electrons") {
                    std::size_t ne = 0;
                    if (!detail::parse_number(value, ne)) {
                        throw ParseError(line_no,
                                         "invalid n_electrons '" + value + "'");
                    }
                }
                meta.emplace(key, value);
            }
        } else {
            const auto tokens = detail::split_ws(line);
            RawLine r{line_no, 0.0, {}};
            if (!detail::parse_number(tokens[0], r.coefficient) ||
                !std::isfinite(r.coefficient)) {
                throw ParseError(line_no, "malformed coefficient '" +
                                              std::string(tokens[0]) + "'");
            }
            if (tokens.size() == 2 && tokens[1] == "I") {
                raw.push_back(std::move(r));
                continue;
            }
            for (std::size_t k = 1; k < tokens.size(); ++k) {
                const std::string_view tok = tokens[k];
                const auto p = pauli_from_char(tok.front());
                if (!p || *p == Pauli::I) {
                    throw ParseError(line_no, "unknown Pauli letter in factor '" +
                                                  std::string(tok) + "'");
                }
                std::size_t q = 0;
                if (tok.size() < 2 || !detail::parse_number(tok.substr(1), q)) {
                    throw ParseError(line_no, "malformed factor '" +
                                                  std::string(tok) + "'");
                }
                for (const auto &[prev, letter] : r.factors) {
                    if (prev == q) {
                        throw ParseError(line_no, "qubit " + std::to_string(q) +
                                                      " appears twice");
                    }
                }
                r.factors.emplace_back(q, *p);
            }
            raw.push_back(std::move(r));
        }
        if (eol == std::string_view::npos) {
            break;
        }
    }

    if (!n_qubits) {
        throw ParseError(line_no, "missing required header 'n_qubits'");
    }
    meta.emplace("n_qubits", std::to_string(*n_qubits));

    std::vector<PauliTerm> terms;
    terms.reserve(raw.size());
    for (const auto &r : raw) {
        PauliOperator op(*n_qubits);
        for (const auto &[q, p] : r.factors) {
            if (q >= *n_qubits) {
                throw ParseError(r.line, "qubit index " + std::to_string(q) +
                                             " >= n_qubits " +
                                             std::to_string(*n_qubits));
            }
            op.set(q, p);
        }
        terms.push_back({r.coefficient, op});
    }
    meta.erase("n_qubits");
    return Hamiltonian::from_raw_terms(*n_qubits, terms, 0.0, std::move(meta));
}

/// Writes the text format; parse_hamiltonian reads it back exactly.
[[nodiscard]] inline std::string serialize_hamiltonian(const Hamiltonian &h) {
    std::ostringstream os;
    os << "# n_qubits = " << h.n_qubits() << '\n';
    for (const auto &key : detail::header_keys()) {
        if (const auto it = h.metadata().find(key); it != h.metadata().end()) {
            os << "# " << key << " = " << it->second << '\n';
        }
    }
    if (h.identity_offset() != 0.0) {
        os << detail::format_double(h.identity_offset()) << " I\n";
    }
    for (const auto &t : h.terms()) {
        os << detail::format_double(t.coefficient);
        for (std::size_t q = 0; q < h.n_qubits(); ++q) {
            const Pauli p = t.op.letter(q);
            if (p != Pauli::I) {
                os << ' ' << to_char(p) << q;
            }
        }
        os << '\n';
    }
    return os.str();
}

inline Hamiltonian load_hamiltonian(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open Hamiltonian file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_hamiltonian(buf.str());
}

} // namespace jbmvqe
