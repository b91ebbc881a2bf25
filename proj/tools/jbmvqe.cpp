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

// Command-line driver for the shot model, grouping and ground-state tools
// and for VQE runs.

#include "jbmvqe/jbmvqe.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace jbmvqe;

namespace {

std::string fmt(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

std::ofstream open_out(const fs::path &p) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream f(p);
    if (!f) {
        throw Error("cannot write " + p.string());
    }
    return f;
}

struct ThresholdArgs {
    std::string kind = "both";
    std::vector<double> taus{0.05};
    std::vector<double> ps{0.9};
    std::string grid = "uniform";
    std::size_t count = 2000;
    std::string hamiltonian;
    std::vector<std::size_t> shots{1, 3, 5, 9, 17, 33, 65, 129, 257, 513};
    std::vector<double> expectations{0.05, 0.1, 0.2, 0.3, 0.5};
    std::string out;
};

int cmd_thresholds(const ThresholdArgs &a) {
    std::ostringstream table;
    if (a.kind == "sign") {
        table << "shots,expectation,probability\n";
        for (std::size_t m : a.shots) {
            for (double y : a.expectations) {
                table << m << ',' << fmt(y) << ',' << fmt(sign_success_prob(m, y))
                      << '\n';
            }
        }
    } else {
        ExpectationGrid grid = UniformGrid{a.count, a.grid == "midpoint"};
        if (!a.hamiltonian.empty()) {
            // Explicit grid: the exact ground-state expectation of every term.
            const Hamiltonian h = load_hamiltonian(a.hamiltonian);
            const GroundState gs = exact_ground_energy(h);
            ExplicitValues ev;
            for (const auto &t : h.terms()) {
                ev.values.push_back(std::clamp(exact_expectation(gs.state, t.op), -1.0, 1.0));
            }
            grid = ev;
        } else if (a.grid != "uniform" && a.grid != "midpoint") {
            throw InvalidArgument("grid must be uniform or midpoint");
        }
        std::vector<std::pair<std::string, MeasurementKind>> kinds;
        if (a.kind == "sm" || a.kind == "both") {
            kinds.emplace_back("sm", MeasurementKind::SM);
        }
        if (a.kind == "jbm" || a.kind == "both") {
            kinds.emplace_back("jbm", MeasurementKind::JBM);
        }
        if (kinds.empty()) {
            throw InvalidArgument("kind must be sm, jbm, both or sign");
        }
        table << "kind,tau,p,threshold\n";
        for (const auto &[name, kind] : kinds) {
            for (double tau : a.taus) {
                for (double p : a.ps) {
                    const auto m = shot_threshold(kind, {tau, p, grid});
                    table << name << ',' << fmt(tau) << ',' << fmt(p) << ','
                          << (m ? std::to_string(*m) : std::string("exceeds cap"))
                          << '\n';
                }
            }
        }
    }
    std::cout << table.str();
    if (!a.out.empty()) {
        open_out(a.out) << table.str();
    }
    return 0;
}

int cmd_groups(const std::string &path, bool verbose) {
    const Hamiltonian h = load_hamiltonian(path);
    const auto groups = group_qwc_greedy(h);
    std::cout << "terms: " << h.term_count() << "\ngroups: " << groups.size()
              << '\n';
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::cout << "group " << g << ": basis " << groups[g].basis.to_string()
                  << ", size " << groups[g].members.size();
        if (verbose) {
            std::cout << " [";
            for (std::size_t k = 0; k < groups[g].members.size(); ++k) {
                std::cout << (k ? " " : "")
                          << h.terms()[groups[g].members[k]].op.to_string();
            }
            std::cout << ']';
        }
        std::cout << '\n';
    }
    return 0;
}

int cmd_groundstate(const std::string &path, bool dump) {
    const Hamiltonian h = load_hamiltonian(path);
    const GroundState gs = exact_ground_energy(h);
    std::cout << "ground_energy: " << fmt(gs.energy) << '\n';
    if (const auto ne = h.n_electrons()) {
        const auto ref = prepare_reference(h.n_qubits(), static_cast<std::size_t>(*ne));
        std::cout << "hf_energy: " << fmt(exact_energy(ref, h)) << '\n';
    }
    if (const auto fci = h.recorded_value("fci_energy")) {
        std::cout << "recorded_fci_energy: " << fmt(*fci) << '\n'
                  << "difference: " << fmt(gs.energy - *fci, 3) << '\n';
    }
    if (dump) {
        for (std::size_t k = 0; k < gs.state.dimension(); ++k) {
            const Complex a = gs.state[k];
            if (std::abs(a) > 1e-12) {
                std::cout << outcome_string(k, h.n_qubits()) << ' ' << fmt(a.real())
                          << ' ' << fmt(a.imag()) << '\n';
            }
        }
    }
    return 0;
}

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool oracle = false;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> max_iterations;
};

ExperimentConfig resolve(const RunArgs &a) {
    ExperimentConfig cfg = load_config(a.config);
    if (a.seed) {
        cfg.seed_base = *a.seed;
    }
    if (!a.out.empty()) {
        cfg.output_dir = a.out;
    }
    if (a.oracle) {
        cfg.optimizer.oracle = true;
    }
    if (a.trials) {
        cfg.trials = *a.trials;
    }
    if (a.max_iterations) {
        cfg.optimizer.max_iterations = *a.max_iterations;
    }
    cfg.validate();
    return cfg;
}

VqeProblem make_problem(const ExperimentConfig &cfg) {
    Hamiltonian h = load_hamiltonian(cfg.hamiltonian_path);
    const auto ne = h.n_electrons();
    if (!ne) {
        throw InvalidArgument("hamiltonian file lacks n_electrons");
    }
    const std::size_t n = h.n_qubits();
    return {std::move(h), AnsatzCircuit(n, static_cast<std::size_t>(*ne), cfg.depth)};
}

void write_trial_csvs(const TrialResult &t, const fs::path &dir) {
    if (t.jbm) {
        auto f = open_out(dir / ("trial_" + std::to_string(t.seed) + "_jbm.csv"));
        write_log_csv(f, *t.jbm);
    }
    if (t.conventional) {
        auto f = open_out(dir / ("trial_" + std::to_string(t.seed) +
                                 "_conventional.csv"));
        write_log_csv(f, *t.conventional);
    }
}

std::string shots_or_inf(const std::optional<std::uint64_t> &s) {
    return s ? std::to_string(*s) : std::string("inf");
}

int cmd_run(const RunArgs &a) {
    ExperimentConfig cfg = resolve(a);
    cfg.stop_at_hf = false;
    const VqeProblem problem = make_problem(cfg);
    const TrialResult t = run_trial(problem, cfg, cfg.seed_base);
    if (!t.error.empty()) {
        std::cerr << "error: " << t.error << '\n';
        return 1;
    }
    write_trial_csvs(t, cfg.output_dir);
    const double hf = problem.reference_energy();
    auto report = [&](const char *name, const std::optional<IterationLog> &log,
                      const std::optional<std::uint64_t> &beat) {
        if (!log) {
            return;
        }
        std::cout << name << ": iterations " << log->records.size();
        if (!log->records.empty()) {
            const auto &r = log->records.back();
            std::cout << ", final exact energy " << fmt(r.exact_energy)
                      << ", total shots " << r.cum_shots;
        }
        std::cout << ", shots to beat HF " << shots_or_inf(beat) << '\n';
    };
    std::cout << "hf_energy: " << fmt(hf) << '\n';
    report("jbm", t.jbm, t.jbm_shots_to_hf);
    report("conventional", t.conventional, t.conventional_shots_to_hf);
    return 0;
}

int cmd_compare(const RunArgs &a) {
    const ExperimentConfig cfg = resolve(a);
    const VqeProblem problem = make_problem(cfg);
    const fs::path dir = cfg.output_dir;
    const auto results = run_compare(problem, cfg, [&](const TrialResult &t) {
        if (!t.error.empty()) {
            std::cerr << "trial " << t.seed << " failed: " << t.error << '\n';
            return;
        }
        write_trial_csvs(t, dir);
        std::cout << "trial " << t.seed << ": jbm " << shots_or_inf(t.jbm_shots_to_hf)
                  << ", conventional " << shots_or_inf(t.conventional_shots_to_hf)
                  << '\n';
    });
    const CompareSummary s = summarize(results, problem.reference_energy());
    const nlohmann::json j = to_json(s, cfg);
    open_out(dir / "summary.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Joint-Bell-measurement VQE toolkit"};
    app.require_subcommand(1);

    ThresholdArgs ta;
    auto *thr = app.add_subcommand("thresholds", "shot thresholds or sign probabilities");
    thr->add_option("--kind", ta.kind, "sm, jbm, both or sign")
        ->check(CLI::IsMember({"sm", "jbm", "both", "sign"}));
    thr->add_option("--tau", ta.taus, "error tolerances")->delimiter(',');
    thr->add_option("--p", ta.ps, "confidence levels")->delimiter(',');
    thr->add_option("--grid", ta.grid, "uniform (endpoints) or midpoint")
        ->check(CLI::IsMember({"uniform", "midpoint"}));
    thr->add_option("--count", ta.count, "uniform grid size");
    thr->add_option("--hamiltonian", ta.hamiltonian,
                    "use this Hamiltonian's ground-state expectations as the grid");
    thr->add_option("--shots", ta.shots, "odd shot counts for the sign table")
        ->delimiter(',');
    thr->add_option("--expectation", ta.expectations,
                    "expectation values for the sign table")
        ->delimiter(',');
    thr->add_option("--out", ta.out, "also write the table to this file");

    std::string ham;
    bool verbose = false;
    auto *grp = app.add_subcommand("groups", "QWC grouping statistics");
    grp->add_option("hamiltonian", ham, "Hamiltonian file")->required();
    grp->add_flag("--verbose", verbose, "list group members");

    bool dump = false;
    auto *gs = app.add_subcommand("groundstate", "exact ground-state energy");
    gs->add_option("hamiltonian", ham, "Hamiltonian file")->required();
    gs->add_flag("--dump-state", dump, "print nonzero amplitudes");

    RunArgs ra;
    auto add_run_flags = [&](CLI::App *c) {
        c->add_option("--config", ra.config, "experiment config file")->required();
        c->add_option("--seed", ra.seed, "seed (base seed for compare)");
        c->add_option("--out", ra.out, "output directory");
        c->add_flag("--oracle", ra.oracle, "infinite-shot mode");
        c->add_option("--max-iterations", ra.max_iterations, "override iteration cap");
    };
    auto *run = app.add_subcommand("run", "one VQE run per configured method");
    add_run_flags(run);
    auto *cmp = app.add_subcommand("compare", "shots-to-beat-HF comparison");
    add_run_flags(cmp);
    cmp->add_option("--trials", ra.trials, "override trial count");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*thr) {
            return cmd_thresholds(ta);
        }
        if (*grp) {
            return cmd_groups(ham, verbose);
        }
        if (*gs) {
            return cmd_groundstate(ham, dump);
        }
        if (*run) {
            return cmd_run(ra);
        }
        return cmd_compare(ra);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
