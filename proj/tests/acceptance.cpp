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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed here, not tuned.

#include "jbmvqe/jbmvqe.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace jbmvqe;

namespace {

const std::string data_dir = JBMVQE_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

Hamiltonian fixture(const std::string &name) {
    return load_hamiltonian(data_dir + "/hamiltonians/" + name + ".ham");
}

VqeProblem problem_for(const std::string &name, std::size_t depth) {
    Hamiltonian h = fixture(name);
    const auto n = h.n_qubits();
    const auto ne = static_cast<std::size_t>(h.n_electrons().value());
    return {std::move(h), AnsatzCircuit(n, ne, depth)};
}

Outcome threshold_exactness() {
    const ThresholdQuery q{0.05, 0.9, UniformGrid{2000, false}};
    const auto sm = shot_threshold(MeasurementKind::SM, q).value();
    const auto jbm = shot_threshold(MeasurementKind::JBM, q).value();
    const ThresholdQuery mid{0.05, 0.9, UniformGrid{2000, true}};
    const auto sm_mid = shot_threshold(MeasurementKind::SM, mid).value();
    const auto jbm_mid = shot_threshold(MeasurementKind::JBM, mid).value();
    auto near = [](std::size_t got, std::size_t want) {
        return got + 2 >= want && got <= want + 2;
    };
    const bool exact = (sm == 739 && jbm == 4159) || (sm_mid == 739 && jbm_mid == 4159);
    const bool within = near(sm, 739) && near(jbm, 4159);
    const double p739 = averaged_prob(MeasurementKind::SM, 739, 0.05, q.grid);
    return {exact || within,
            fmt("linspace grid SM=%zu JBM=%zu, midpoint grid SM=%zu JBM=%zu "
                "(want 739/4159, +-2 allowed); SM averaged prob at 739 = %.6f",
                sm, jbm, sm_mid, jbm_mid, p739)};
}

Outcome sign_point() {
    const double p = sign_success_prob(17, 0.2);
    return {p >= 0.8, fmt("P(correct sign | m=17, <P>=0.2) = %.6f (want >= 0.8)", p)};
}

Outcome appendix_c() {
    const Hamiltonian h = fixture("h4");
    const GroundState gs = exact_ground_energy(h);
    ExplicitValues ev;
    for (const auto &t : h.terms()) {
        ev.values.push_back(std::clamp(exact_expectation(gs.state, t.op), -1.0, 1.0));
    }
    const ThresholdQuery q{0.1, 0.9, ev};
    const auto sm = shot_threshold(MeasurementKind::SM, q).value();
    const auto jbm = shot_threshold(MeasurementKind::JBM, q).value();
    auto rel = [](std::size_t got, double want) { return std::abs(double(got) - want) / want; };
    return {ev.values.size() == 184 && rel(sm, 235) <= 0.03 && rel(jbm, 6576) <= 0.03,
            fmt("%zu terms; SM=%zu (%.2f%% off 235), JBM=%zu (%.2f%% off 6576), limit 3%%",
                ev.values.size(), sm, 100 * rel(sm, 235), jbm, 100 * rel(jbm, 6576))};
}

Outcome bell_identity() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    std::vector<PauliOperator> ops;
    for (std::uint64_t x = 0; x < 16; ++x) {
        for (std::uint64_t z = 0; z < 16; ++z) {
            if (x || z) {
                ops.emplace_back(4, x, z);
            }
        }
    }
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        std::vector<Complex> a(16);
        double norm = 0.0;
        for (auto &c : a) {
            c = {g(rng), g(rng)};
            norm += std::norm(c);
        }
        for (auto &c : a) {
            c /= std::sqrt(norm);
        }
        const auto state = StateVector::from_amplitudes(4, std::move(a));
        // The explicit doubled circuit, not the transform shortcut.
        const auto probs = doubled_bell_state(state).probabilities();
        for (const auto &op : ops) {
            const double y = exact_expectation(state, op);
            worst = std::max(worst, std::abs(weighted_square_estimate(probs, 4, op) - y * y));
        }
    }
    return {worst <= 1e-10,
            fmt("200 states x %zu Paulis, max |E[P(x)P] - <P>^2| = %.2e (limit 1e-10)",
                ops.size(), worst)};
}

// Least-squares slope of log|b| against log m.
double loglog_slope(const std::vector<double> &m, const std::vector<double> &b) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = std::log(m[i]);
        const double y = std::log(std::abs(b[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Empirical bias of √max{0, 2x/m − 1} against |y| for x ~ Binomial(m, (1+y²)/2).
// The unbiased square estimate serves as a control variate with slope 1/(2|y|),
// which removes the first-order noise when y ≠ 0.
double empirical_bias(std::size_t m, double y, std::size_t resamples, std::mt19937_64 &rng) {
    std::binomial_distribution<long long> binom(static_cast<long long>(m), (1 + y * y) / 2);
    const double c = y == 0.0 ? 0.0 : 1.0 / (2.0 * std::abs(y));
    double acc = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
        const double sq = 2.0 * double(binom(rng)) / double(m) - 1.0;
        acc += std::sqrt(std::max(0.0, sq)) - c * (sq - y * y);
    }
    return acc / double(resamples) - std::abs(y);
}

Outcome bias_scaling() {
    std::mt19937_64 rng(77);
    const std::vector<double> ms{1e2, 1e3, 1e4, 1e5};
    const std::size_t resamples = 200000;
    std::vector<double> b0, b6;
    for (double m : ms) {
        b0.push_back(empirical_bias(std::size_t(m), 0.0, resamples, rng));
        b6.push_back(empirical_bias(std::size_t(m), 0.6, resamples, rng));
    }
    const double s0 = loglog_slope(ms, b0);
    const double s6 = loglog_slope(ms, b6);
    const bool signs = std::all_of(b0.begin(), b0.end(), [](double v) { return v > 0; }) &&
                       std::all_of(b6.begin(), b6.end(), [](double v) { return v < 0; });
    const bool pass = std::abs(s0 + 0.25) <= 0.05 && std::abs(s6 + 1.0) <= 0.2 && signs;
    return {pass, fmt("slope at <P>=0: %.4f (want -0.25+-0.05), at <P>=0.6: %.4f (want "
                      "-1.0+-0.2); bias at m=1e5: %+.3e / %+.3e (predicted %+.3e / %+.3e); "
                      "%zu resamples per point",
                      s0, s6, b0.back(), b6.back(), bias_prediction(100000, 0.0).bias,
                      bias_prediction(100000, 0.6).bias, resamples)};
}

Outcome gradient_check() {
    const VqeProblem p = problem_for("h2", 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    const double h = 1e-5;
    double worst_fd = 0.0;
    double worst_alpha = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ParameterVector theta(p.n_params());
        for (auto &t : theta) {
            t = u(rng);
        }
        const auto g4 = parameter_shift_gradient_exact(p.hamiltonian(), p.circuit(), theta,
                                                       std::numbers::pi / 4);
        const auto g2 = parameter_shift_gradient_exact(p.hamiltonian(), p.circuit(), theta,
                                                       std::numbers::pi / 2);
        for (std::size_t l = 0; l < theta.size(); ++l) {
            auto tp = theta;
            auto tm = theta;
            tp[l] += h;
            tm[l] -= h;
            const double fd = (p.exact_energy_at(tp) - p.exact_energy_at(tm)) / (2 * h);
            worst_fd = std::max(worst_fd, std::abs(g4[l] - fd));
            worst_alpha = std::max(worst_alpha, std::abs(g4[l] - g2[l]));
        }
    }
    return {worst_fd <= 1e-6 && worst_alpha <= 1e-9,
            fmt("H2 circuit, 20 points: max |grad - FD| = %.2e (limit 1e-6), "
                "max |grad(pi/4) - grad(pi/2)| = %.2e (limit 1e-9)",
                worst_fd, worst_alpha)};
}

Outcome symmetry_suite() {
    const std::vector<std::pair<std::string, std::size_t>> fixtures{
        {"h2", 3}, {"h3p", 4}, {"h4", 8}, {"lih", 4}};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    double worst_imag = 0.0;
    double worst_off = 0.0;
    for (const auto &[name, depth] : fixtures) {
        const VqeProblem p = problem_for(name, depth);
        const auto ne = p.circuit().n_electrons();
        for (int trial = 0; trial < 100; ++trial) {
            ParameterVector theta(p.n_params());
            for (auto &t : theta) {
                t = u(rng);
            }
            const auto s = apply_ansatz(p.circuit(), theta);
            for (std::uint64_t k = 0; k < s.dimension(); ++k) {
                worst_imag = std::max(worst_imag, std::abs(s[k].imag()));
                if (std::size_t(std::popcount(k)) != ne) {
                    worst_off = std::max(worst_off, std::abs(s[k]));
                }
            }
        }
    }
    return {worst_imag < 1e-10 && worst_off < 1e-10,
            fmt("4 fixture circuits x 100 points: max |imag| = %.2e, max off-sector "
                "|amp| = %.2e (limit 1e-10)",
                worst_imag, worst_off)};
}

// Oracle runs use the fixed 5000-iteration budget with the plateau rule off.
OptimizerConfig oracle_budget() {
    OptimizerConfig cfg;
    cfg.oracle = true;
    cfg.max_iterations = 5000;
    cfg.stop_delta = -std::numeric_limits<double>::infinity();
    return cfg;
}

Outcome oracle_convergence() {
    const VqeProblem p = problem_for("h2", 3);
    const double exact = exact_ground_energy(p.hamiltonian()).energy;
    auto count = [&](const OptimizerConfig &cfg, double &worst) {
        int converged = 0;
        worst = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto log =
                run_conventional_vqe(p, random_initial_parameters(p.n_params(), seed), cfg);
            double best = std::numeric_limits<double>::infinity();
            for (const auto &r : log.records) {
                best = std::min(best, r.exact_energy);
            }
            converged += best - exact <= 1e-4;
            worst = std::max(worst, best - exact);
        }
        return converged;
    };
    double worst = 0.0;
    const int converged = count(oracle_budget(), worst);
    OptimizerConfig plateau = oracle_budget();
    plateau.stop_delta = OptimizerConfig{}.stop_delta;
    double worst_plateau = 0.0;
    const int with_plateau = count(plateau, worst_plateau);
    return {converged >= 16,
            fmt("%d/20 seeds within 1e-4 Ha after 5000 iterations (need 16), worst gap %.2e Ha; "
                "with the window-200 plateau rule also active: %d/20, worst gap %.2e Ha",
                converged, worst, with_plateau, worst_plateau)};
}

Outcome sign_stability() {
    const VqeProblem p = problem_for("h2", 3);
    OptimizerConfig cfg = oracle_budget();
    cfg.record_parameters = true;
    const auto log = run_conventional_vqe(p, random_initial_parameters(p.n_params(), 0), cfg);
    const std::size_t terms = p.hamiltonian().term_count();
    // Values within 1e-10 of zero keep the previous sign, so round-off on a
    // vanishing expectation is not counted as a change.
    std::vector<int> last(terms, 0);
    std::vector<int> changes(terms, 0);
    for (const auto &r : log.records) {
        const auto s = apply_ansatz(p.circuit(), r.parameters);
        for (std::size_t j = 0; j < terms; ++j) {
            const double v = exact_expectation(s, p.operators()[j]);
            if (std::abs(v) <= 1e-10) {
                continue;
            }
            const int sg = v > 0 ? 1 : -1;
            if (last[j] != 0 && sg != last[j]) {
                ++changes[j];
            }
            last[j] = sg;
        }
    }
    const auto unstable = std::count_if(changes.begin(), changes.end(), [](int c) { return c > 1; });
    const auto single = std::count(changes.begin(), changes.end(), 1);
    const double frac = double(unstable) / double(terms);
    return {frac <= 0.2,
            fmt("%zu iterations: %ld of %zu terms change sign more than once (%.0f%%, limit "
                "20%%), %ld change once",
                log.records.size(), long(unstable), terms, 100 * frac, long(single))};
}

CompareSummary compare_for(const std::string &cfg_name) {
    ExperimentConfig cfg = load_config(data_dir + "/../configs/" + cfg_name);
    cfg.trials = std::max<std::size_t>(cfg.trials, 50);
    Hamiltonian h = load_hamiltonian(cfg.hamiltonian_path);
    const auto n = h.n_qubits();
    const auto ne = static_cast<std::size_t>(h.n_electrons().value());
    const VqeProblem p(std::move(h), AnsatzCircuit(n, ne, cfg.depth));
    return summarize(run_compare(p, cfg), p.reference_energy());
}

Outcome speedup() {
    const CompareSummary h2 = compare_for("h2.cfg");
    const CompareSummary h4 = compare_for("h4.cfg");
    const bool ok2 = h2.ratio && *h2.ratio > 1.2;
    const bool ok4 = h2.ratio && h4.ratio && *h4.ratio > *h2.ratio;
    auto r = [](const CompareSummary &s) { return s.ratio ? *s.ratio : std::nan(""); };
    auto mr = [](const CompareSummary &s) {
        return s.mean_trial_ratio ? *s.mean_trial_ratio : std::nan("");
    };
    return {ok2 && ok4,
            fmt("H2 ratio %.3f (want > 1.2: %s; both beat HF in %zu/%zu, mean per-trial "
                "ratio %.3f); H4 ratio %.3f (want > H2: %s; both beat HF in %zu/%zu, mean "
                "per-trial ratio %.3f)",
                r(h2), ok2 ? "yes" : "no", h2.both_successes, h2.trials, mr(h2), r(h4),
                ok4 ? "yes" : "no", h4.both_successes, h4.trials, mr(h4))};
}

Outcome shot_census() {
    const VqeProblem p = problem_for("h2", 3);
    OptimizerConfig cfg;
    cfg.max_iterations = 300;
    cfg.rng_seed = 3;
    const auto theta = random_initial_parameters(p.n_params(), 3);
    const std::uint64_t nc = p.n_circuits();
    const std::uint64_t g = p.groups().size();
    bool ok = true;
    const auto jbm = run_jbm_vqe(p, theta, cfg);
    std::uint64_t cum = 0;
    for (const auto &r : jbm.records) {
        const bool refresh = r.iteration % cfg.sign_period == 0;
        cum += nc * (cfg.bell_shots + (refresh ? cfg.sign_shots_per_group * g : 0));
        ok = ok && r.cum_shots == cum && r.signs_refreshed == refresh;
    }
    const auto conv = run_conventional_vqe(p, theta, cfg);
    for (const auto &r : conv.records) {
        ok = ok && r.cum_shots == (r.iteration + 1) * nc * cfg.vqe_shots_per_group * g;
    }
    return {ok && !jbm.records.empty() && !conv.records.empty(),
            fmt("H2, %zu JBM and %zu conventional iterations; final cumulative shots %llu and "
                "%llu",
                jbm.records.size(), conv.records.size(),
                (unsigned long long)jbm.records.back().cum_shots,
                (unsigned long long)conv.records.back().cum_shots)};
}

} // namespace

// Optional arguments restrict the run to the named criteria.
int main(int argc, char **argv) {
    const std::vector<std::string> only(argv + 1, argv + argc);
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"threshold_exactness", threshold_exactness},
        {"sign_probability_point", sign_point},
        {"appendix_c_thresholds", appendix_c},
        {"bell_estimator_identity", bell_identity},
        {"bias_scaling", bias_scaling},
        {"gradient_correctness", gradient_check},
        {"symmetry_suite", symmetry_suite},
        {"oracle_vqe_convergence", oracle_convergence},
        {"sign_stability", sign_stability},
        {"shot_census_exactness", shot_census},
        {"speedup_reproduction", speedup},
    };
    int failed = 0;
    std::size_t ran = 0;
    for (const auto &[name, check] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) {
            continue;
        }
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, ran);
    return failed == 0 ? 0 : 1;
}
