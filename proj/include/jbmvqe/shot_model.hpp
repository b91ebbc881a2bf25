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
 * Binomial shot-count calculus for single-Pauli estimation.
 *
 * A projective estimate of ⟨P⟩ from m shots is 2x/m − 1 with
 * x ~ Binomial(m, (1+⟨P⟩)/2). A Bell estimate of |⟨P⟩| is
 * √max{0, 2x/m − 1} with x ~ Binomial(m, (1+⟨P⟩²)/2). The probabilities here
 * are exact binomial sums; thresholds are the least m whose grid-averaged
 * success probability reaches the target confidence.
 */

#include "jbmvqe/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace jbmvqe {

enum class MeasurementKind { SM, JBM };

/// `count` equally spaced expectation values on [−1, 1]. By default the
/// endpoints are included; `midpoint` selects subinterval midpoints instead.
struct UniformGrid {
    std::size_t count = 2000;
    bool midpoint = false;
};

struct ExplicitValues {
    std::vector<double> values;
};

using ExpectationGrid = std::variant<UniformGrid, ExplicitValues>;

struct ThresholdQuery {
    double tau = 0.05;
    double p = 0.9;
    ExpectationGrid grid = UniformGrid{};

    void validate() const;
};

[[nodiscard]] inline std::vector<double> grid_points(const ExpectationGrid &g) {
    if (const auto *e = std::get_if<ExplicitValues>(&g)) {
        detail::require(!e->values.empty(), "empty expectation grid");
        for (double v : e->values) {
            detail::require(v >= -1.0 && v <= 1.0,
                            "grid value outside [-1, 1]");
        }
        return e->values;
    }
    const auto &u = std::get<UniformGrid>(g);
    detail::require(u.count >= 1, "empty expectation grid");
    std::vector<double> pts(u.count);
    const auto n = static_cast<double>(u.count);
    if (u.midpoint) {
        for (std::size_t i = 0; i < u.count; ++i) {
            pts[i] = -1.0 + (static_cast<double>(i) + 0.5) * 2.0 / n;
        }
    } else if (u.count == 1) {
        pts[0] = -1.0;
    } else {
        // Same arithmetic as numpy.linspace so grid values agree bit-for-bit.
        const double step = 2.0 / (n - 1.0);
        for (std::size_t i = 0; i < u.count; ++i) {
            pts[i] = -1.0 + static_cast<double>(i) * step;
        }
        pts.back() = 1.0;
    }
    return pts;
}

inline void ThresholdQuery::validate() const {
    detail::require(tau > 0.0 && tau <= 2.0, "tau must lie in (0, 2]");
    detail::require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
    (void)grid_points(grid);
}

namespace detail {

/// Σ_{x=lo}^{hi} C(m,x) q^x (1−q)^{m−x}, summed outward from the in-range
/// term closest to the mode and truncated once terms stop contributing.
inline double binomial_range(std::size_t m, double q, long long lo,
                             long long hi) {
    const auto mm = static_cast<long long>(m);
    lo = std::max(lo, 0LL);
    hi = std::min(hi, mm);
    if (lo > hi) {
        return 0.0;
    }
    if (q <= 0.0) {
        return lo == 0 ? 1.0 : 0.0;
    }
    if (q >= 1.0) {
        return hi == mm ? 1.0 : 0.0;
    }
    const double md = static_cast<double>(m);
    const auto mode = static_cast<long long>(std::floor((md + 1.0) * q));
    const long long k0 = std::clamp(std::min(mode, mm), lo, hi);
    const double log_q = std::log(q);
    const double log_1q = std::log1p(-q);
    auto log_pmf = [&](long long k) {
        const double kd = static_cast<double>(k);
        return std::lgamma(md + 1.0) - std::lgamma(kd + 1.0) -
               std::lgamma(md - kd + 1.0) + kd * log_q + (md - kd) * log_1q;
    };
    const double t0 = std::exp(log_pmf(k0));
    double sum = t0;
    constexpr double negligible = 1e-17;
    const double ratio = q / (1.0 - q);
    double t = t0;
    for (long long k = k0; k < hi; ++k) {
        t *= ratio * static_cast<double>(mm - k) / static_cast<double>(k + 1);
        sum += t;
        if (t < negligible * sum) {
            break;
        }
    }
    t = t0;
    for (long long k = k0; k > lo; --k) {
        t *= static_cast<double>(k) / (ratio * static_cast<double>(mm - k + 1));
        sum += t;
        if (t < negligible * sum) {
            break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline void check_probability_args(std::size_t shots, double expectation) {
    require(shots >= 1, "shot count must be positive");
    require(expectation >= -1.0 && expectation <= 1.0,
            "expectation outside [-1, 1]");
}

} // namespace detail

/// P(|2x/m − 1 − ⟨P⟩| ≤ τ) for x ~ Binomial(m, (1+⟨P⟩)/2).
[[nodiscard]] inline double prob_sm(std::size_t shots, double tau,
                                    double expectation) {
    detail::check_probability_args(shots, expectation);
    const double m = static_cast<double>(shots);
    const auto lo = static_cast<long long>(std::ceil(m * (1.0 + expectation - tau) / 2.0));
    const auto hi = static_cast<long long>(std::floor(m * (1.0 + expectation + tau) / 2.0));
    return detail::binomial_range(shots, (1.0 + expectation) / 2.0, lo, hi);
}

/// P(|√max{0, 2x/m − 1} − |⟨P⟩|| ≤ τ) for x ~ Binomial(m, (1+⟨P⟩²)/2).
[[nodiscard]] inline double prob_jbm(std::size_t shots, double tau,
                                     double expectation) {
    detail::check_probability_args(shots, expectation);
    const double m = static_cast<double>(shots);
    const double y = std::abs(expectation);
    const auto mm = static_cast<long long>(shots);
    auto estimate = [&](long long x) {
        return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(x) / m - 1.0));
    };
    // The estimate is non-decreasing in x, so the accepted set is the
    // interval between the first x not below |y|−τ and the last x not above
    // |y|+τ. Both ends come from binary search on the exact predicate.
    auto first_true = [&](auto pred) {
        long long lo = 0;
        long long hi = mm + 1;
        while (lo < hi) {
            const long long mid = lo + (hi - lo) / 2;
            if (pred(mid)) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    };
    const long long x_lo =
        first_true([&](long long x) { return estimate(x) - y >= -tau; });
    const long long x_hi =
        first_true([&](long long x) { return estimate(x) - y > tau; }) - 1;
    return detail::binomial_range(shots, (1.0 + y * y) / 2.0, x_lo, x_hi);
}

[[nodiscard]] inline double success_prob(MeasurementKind kind,
                                         std::size_t shots, double tau,
                                         double expectation) {
    return kind == MeasurementKind::SM ? prob_sm(shots, tau, expectation)
                                       : prob_jbm(shots, tau, expectation);
}

/// Mean success probability over precomputed grid points.
[[nodiscard]] inline double averaged_prob(MeasurementKind kind,
                                          std::size_t shots, double tau,
                                          const std::vector<double> &points) {
    detail::require(!points.empty(), "empty expectation grid");
    double acc = 0.0;
    for (double y : points) {
        acc += success_prob(kind, shots, tau, y);
    }
    return acc / static_cast<double>(points.size());
}

[[nodiscard]] inline double averaged_prob(MeasurementKind kind,
                                          std::size_t shots, double tau,
                                          const ExpectationGrid &grid) {
    return averaged_prob(kind, shots, tau, grid_points(grid));
}

inline constexpr std::size_t default_threshold_cap = std::size_t{1} << 24;

/**
 * Least m ≥ 1 with averaged_prob(m) ≥ p, or nullopt if none is found up to
 * `cap`. Doubling brackets a crossing and bisection locates it. A scan over
 * the `window` values below then catches earlier crossings the bisection may
 * have jumped over (the JBM curve is not monotone in m). The result is checked
 * against m−1 before returning.
 */
[[nodiscard]] inline std::optional<std::size_t>
shot_threshold(MeasurementKind kind, const ThresholdQuery &query,
               std::size_t cap = default_threshold_cap,
               std::size_t window = 64) {
    query.validate();
    const auto points = grid_points(query.grid);
    auto passes = [&](std::size_t m) {
        return averaged_prob(kind, m, query.tau, points) >= query.p;
    };
    std::size_t hi = 1;
    while (!passes(hi)) {
        if (hi >= cap) {
            return std::nullopt;
        }
        hi = std::min(cap, hi * 2);
    }
    std::size_t lo = hi / 2; // fails, or 0 when hi == 1
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (passes(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for (bool moved = true; moved;) {
        moved = false;
        const std::size_t start = hi > window ? hi - window : 1;
        for (std::size_t m = start; m + 1 < hi; ++m) {
            if (passes(m)) {
                hi = m;
                moved = true;
                break;
            }
        }
    }
    if (hi > 1 && passes(hi - 1)) {
        throw Error("threshold search lost minimality");
    }
    return hi;
}

/// Probability that the majority vote of m (odd) projective shots reports
/// the correct sign of ⟨P⟩; zero counts as positive.
[[nodiscard]] inline double sign_success_prob(std::size_t shots_odd,
                                              double expectation) {
    detail::check_probability_args(shots_odd, expectation);
    detail::require(shots_odd % 2 == 1, "majority vote needs an odd shot count");
    const auto m = static_cast<long long>(shots_odd);
    const double q = (1.0 + std::abs(expectation)) / 2.0;
    return detail::binomial_range(shots_odd, q, (m + 1) / 2, m);
}

} // namespace jbmvqe
