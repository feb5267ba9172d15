// Copyright 2026 The ddtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "ddtomo/ddtomo.hpp"
#include "ddtomo/testing/brute_force.hpp"

namespace {

using namespace ddtomo;

struct CommonOpts {
    std::string config_path;
    std::string hamiltonian_file;
    int random_spins = 4;
    std::uint64_t ham_seed = 1;
    std::uint64_t seed = 1;
    double tau = 0.01;
    int shots = 100;
    int timepoints = 50;
    int cycle_stride = 2;
    std::string error_model = "npe";
    double error_mag = 0.0;
    std::string scheme = "environment";
    std::string env_init = "zeros";
    int bootstrap = 1000;
    bool exact_probabilities = false;
    std::string out = "out";
    int jobs = 1;
};

void add_common_options(CLI::App *cmd, CommonOpts &opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (CLI flags override)");
    cmd->add_option("--hamiltonian", opts.hamiltonian_file, "Hamiltonian JSON file");
    cmd->add_option("--random-spins", opts.random_spins,
                    "size of a random instance when no file is given");
    cmd->add_option("--hamiltonian-seed", opts.ham_seed, "seed for the random instance");
    cmd->add_option("--seed", opts.seed, "master seed for pulses, shots and bootstrap");
    cmd->add_option("--tau-j", opts.tau, "pulse spacing tau in units of 1/J, (0, 0.1]");
    cmd->add_option("--shots", opts.shots, "measurement shots per time point");
    cmd->add_option("--timepoints", opts.timepoints, "number of time-grid points");
    cmd->add_option("--cycle-stride", opts.cycle_stride, "XY-8 cycles between grid points");
    cmd->add_option("--error-model", opts.error_model, "npe | sae | rae | rre")
        ->check(CLI::IsMember({"npe", "sae", "rae", "rre"}));
    cmd->add_option("--error-mag", opts.error_mag, "pulse error magnitude");
    cmd->add_option("--scheme", opts.scheme, "local-field scheme")
        ->check(CLI::IsMember({"environment", "global-cancel"}));
    cmd->add_option("--env-init", opts.env_init, "environment initial state")
        ->check(CLI::IsMember({"zeros", "random-product"}));
    cmd->add_option("--bootstrap", opts.bootstrap, "bootstrap resamples (>= 200)");
    cmd->add_flag("--exact-probabilities", opts.exact_probabilities,
                  "skip shot sampling, use exact probabilities");
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--jobs", opts.jobs, "worker threads across pairs/spins");
}

/// Fills fields from the JSON config for keys the user did not pass on the
/// command line.
void apply_config_file(const CLI::App *cmd, CommonOpts &opts) {
    if (opts.config_path.empty()) {
        return;
    }
    std::ifstream in(opts.config_path);
    if (!in) {
        throw ParseError("cannot open config file " + opts.config_path);
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    auto take = [&](const char *flag, const char *key, auto &dst) {
        if (cmd->count(flag) == 0 && doc.contains(key)) {
            dst = doc.at(key).get<std::decay_t<decltype(dst)>>();
        }
    };
    take("--hamiltonian", "hamiltonian", opts.hamiltonian_file);
    take("--random-spins", "random_spins", opts.random_spins);
    take("--hamiltonian-seed", "hamiltonian_seed", opts.ham_seed);
    take("--seed", "seed", opts.seed);
    take("--tau-j", "tau_j", opts.tau);
    take("--shots", "shots", opts.shots);
    take("--timepoints", "timepoints", opts.timepoints);
    take("--cycle-stride", "cycle_stride", opts.cycle_stride);
    take("--error-model", "error_model", opts.error_model);
    take("--error-mag", "error_mag", opts.error_mag);
    take("--scheme", "scheme", opts.scheme);
    take("--env-init", "env_init", opts.env_init);
    take("--bootstrap", "bootstrap", opts.bootstrap);
    take("--out", "out", opts.out);
    take("--jobs", "jobs", opts.jobs);
}

ExperimentConfig to_experiment_config(const CommonOpts &opts) {
    ExperimentConfig cfg;
    cfg.tau = opts.tau;
    cfg.n_shots = opts.shots;
    cfg.n_timepoints = opts.timepoints;
    cfg.cycle_stride = opts.cycle_stride;
    cfg.error = PulseErrorModel{parse_error_kind(opts.error_model), opts.error_mag};
    cfg.field_scheme = opts.scheme == "global-cancel" ? FieldScheme::GlobalCancel
                                                      : FieldScheme::Environment;
    cfg.env_init =
        opts.env_init == "random-product" ? EnvInit::RandomProduct : EnvInit::Zeros;
    cfg.master_seed = opts.seed;
    cfg.bootstrap_resamples = opts.bootstrap;
    cfg.sample_shot_noise = !opts.exact_probabilities;
    cfg.validate();
    return cfg;
}

SpinSystem resolve_system(const CommonOpts &opts) {
    if (!opts.hamiltonian_file.empty()) {
        return load_spin_system(opts.hamiltonian_file);
    }
    return SpinSystem::random_instance(opts.random_spins, opts.ham_seed);
}

/// Runs the selection with a small worker pool; results are merged in
/// selection order so the report is independent of scheduling.
EstimationReport run_selection(const SpinSystem &sys, const ExperimentConfig &cfg,
                               const ScanSelection &selection, int jobs) {
    auto t0 = std::chrono::steady_clock::now();
    Propagator prop(sys, cfg.tau, 1e-10, cfg.propagator_cap);

    struct Task {
        bool is_pair;
        int i, j;
    };
    std::vector<Task> tasks;
    for (auto [i, j] : selection.pairs) {
        tasks.push_back({true, i, j});
    }
    for (int i : selection.spins) {
        tasks.push_back({false, i, 0});
    }

    std::vector<EstimationReport> partials(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1)) {
            const Task &t = tasks[k];
            if (t.is_pair) {
                PairTomographyResult r = run_pair_tomography(sys, prop, cfg, t.i, t.j);
                partials[k].params = std::move(r.params);
                partials[k].curves = std::move(r.curves);
                partials[k].total_pulses = r.total_pulses;
            } else {
                FieldTomographyResult r = run_field_tomography(sys, prop, cfg, t.i);
                partials[k].params = std::move(r.params);
                partials[k].curves = std::move(r.curves);
                partials[k].total_pulses = r.total_pulses;
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    EstimationReport report;
    for (const auto &p : partials) {
        report.params.insert(report.params.end(), p.params.begin(), p.params.end());
        report.curves.insert(report.curves.end(), p.curves.begin(), p.curves.end());
        report.total_pulses += p.total_pulses;
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void print_report(const EstimationReport &report) {
    std::printf("%-12s %12s %12s %10s %s\n", "parameter", "truth", "estimate", "sigma",
                "flag");
    for (const auto &p : report.params) {
        std::printf("%-12s %12.6f %12.6f %10.2e %s\n", p.name.c_str(),
                    p.truth ? *p.truth : 0.0, p.estimate, p.sigma, p.flagged ? "!" : "");
    }
    std::printf("average deviation %.6f (relative %.4f)\n", report.average_deviation(),
                report.average_relative_deviation());
    std::printf("total pulses %zu, wall %.1f s\n", report.total_pulses,
                report.wall_seconds);
}

std::vector<std::pair<int, int>> parse_pairs(const std::vector<std::string> &specs) {
    std::vector<std::pair<int, int>> out;
    for (const auto &s : specs) {
        int i = -1, j = -1;
        if (std::sscanf(s.c_str(), "%d:%d", &i, &j) != 2 || i < 0 || j < 0 || i == j) {
            throw ParseError("bad pair spec '" + s + "', expected i:j");
        }
        out.emplace_back(std::min(i, j), std::max(i, j));
    }
    return out;
}

int run_verify();

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hamiltonian tomography via synchronized dynamical decoupling"};
    app.require_subcommand(1);

    // generate
    auto *gen = app.add_subcommand("generate", "write a random Hamiltonian to a file");
    int gen_n = 4;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "hamiltonian.json";
    gen->add_option("--n-spins", gen_n, "system size")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output file");

    CommonOpts scan_opts, pair_opts, field_opts;
    auto *scan = app.add_subcommand("scan", "estimate all (or selected) couplings and fields");
    add_common_options(scan, scan_opts);
    std::vector<std::string> scan_pairs;
    std::vector<int> scan_spins;
    bool scan_pairs_only = false, scan_fields_only = false;
    scan->add_option("--pairs", scan_pairs, "restrict to pairs, e.g. --pairs 0:1 2:3");
    scan->add_option("--spins", scan_spins, "restrict local fields to these spins");
    scan->add_flag("--pairs-only", scan_pairs_only, "skip local fields");
    scan->add_flag("--fields-only", scan_fields_only, "skip pair couplings");

    auto *pair = app.add_subcommand("pair", "estimate the nine couplings of one pair");
    add_common_options(pair, pair_opts);
    int pair_i = 0, pair_j = 1;
    pair->add_option("-i,--first", pair_i, "first spin")->required();
    pair->add_option("-j,--second", pair_j, "second spin")->required();

    auto *field = app.add_subcommand("field", "estimate one spin's local field vector");
    add_common_options(field, field_opts);
    int field_spin = 0;
    field->add_option("--spin", field_spin, "target spin")->required();
    std::string dump_schedule;
    field->add_option("--dump-schedule", dump_schedule,
                      "write the pulse schedule as JSON to this file");

    auto *verify = app.add_subcommand("verify", "run oracle and scaling self-checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            SpinSystem sys = SpinSystem::random_instance(gen_n, gen_seed);
            save_spin_system(sys, gen_out);
            std::cout << "wrote " << gen_out << " (" << sys.coefficient_count()
                      << " coefficients)\n";
            return 0;
        }
        if (verify->parsed()) {
            return run_verify();
        }

        CommonOpts &opts = scan->parsed() ? scan_opts : pair->parsed() ? pair_opts
                                                                       : field_opts;
        const CLI::App *cmd = scan->parsed() ? scan : pair->parsed() ? pair
                                                                     : field;
        apply_config_file(cmd, opts);
        SpinSystem sys = resolve_system(opts);
        ExperimentConfig cfg = to_experiment_config(opts);

        ScanSelection selection;
        selection.default_all = false;
        if (scan->parsed()) {
            if (!scan_pairs.empty()) {
                selection.pairs = parse_pairs(scan_pairs);
            } else if (!scan_fields_only) {
                for (int i = 0; i < sys.n_spins(); ++i) {
                    for (int j = i + 1; j < sys.n_spins(); ++j) {
                        selection.pairs.emplace_back(i, j);
                    }
                }
            }
            if (!scan_spins.empty()) {
                selection.spins = scan_spins;
            } else if (!scan_pairs_only) {
                for (int i = 0; i < sys.n_spins(); ++i) {
                    selection.spins.push_back(i);
                }
            }
            if (scan_pairs_only) {
                selection.spins.clear();
            }
            if (scan_fields_only) {
                selection.pairs.clear();
            }
        } else if (pair->parsed()) {
            selection.pairs = {{std::min(pair_i, pair_j), std::max(pair_i, pair_j)}};
        } else {
            selection.spins = {field_spin};
            if (!dump_schedule.empty()) {
                PulseSchedule sched =
                    cfg.field_scheme == FieldScheme::Environment
                        ? environment_sequence(field_spin, sys.n_spins(),
                                               cfg.max_cycles(), cfg.tau)
                        : global_cancel_sequence(field_spin, sys.n_spins(),
                                                 cfg.max_cycles(), cfg.tau);
                std::ofstream out(dump_schedule);
                out << schedule_to_json(sched).dump(2) << "\n";
            }
        }

        EstimationReport report = run_selection(sys, cfg, selection, opts.jobs);
        write_report(report, opts.out);
        print_report(report);
        std::cout << "report written to " << opts.out << "\n";
        return 0;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

/// Quick self-checks: the schedule walker against a dense matrix-product
/// oracle, and the remnant-error scaling orders of XY-4 and XY-8.
int run_verify() {
    bool ok = true;

    // Oracle agreement on random small systems with random rotation errors.
    {
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SpinSystem sys = SpinSystem::random_instance(3, seed);
            const double tau = 0.02;
            Propagator prop(sys, tau);
            PulseSchedule sched =
                pair_sequence(0, 2, static_cast<AxisVariant>(seed % 3), 2, tau);
            PulseErrorModel model{ErrorKind::RRE, 0.05};
            Rng rng_a(seed), rng_b(seed);
            QuantumState psi = QuantumState::all_zeros(3);
            psi.amplitudes.setConstant(complex(1.0 / std::sqrt(8.0), 0.0));
            QuantumState out = run_schedule(psi, prop, sched, model, rng_a);
            auto realized = realize_pulses(sched, model, rng_b);
            MatrixXcd u = testing::dense_schedule_unitary(sys, sched, realized);
            worst = std::max(
                worst, testing::pure_state_trace_distance(out.amplitudes,
                                                          u * psi.amplitudes));
        }
        bool pass = worst < 1e-9;
        ok = ok && pass;
        std::printf("[%s] oracle agreement, worst trace distance %.2e (< 1e-9)\n",
                    pass ? "PASS" : "FAIL", worst);
    }

    // Remnant-error scaling: deviation from the surviving effective evolution
    // scales as tau^3 for XY-8 and tau^2 for XY-4 at fixed total time.
    for (CycleForm form : {CycleForm::XY8, CycleForm::XY4}) {
        SpinSystem sys = SpinSystem::random_instance(3, 99);
        // Surviving terms: the diagonal couplings of the driven pair plus
        // everything acting on the undriven spin 2 alone.
        SpinSystem surviving(3);
        for (Axis a : kAxes) {
            surviving.set_coupling(0, 1, a, a, sys.coupling(0, 1, a, a));
            surviving.set_field(2, a, sys.field(2, a));
        }
        const int half_per_cycle = form == CycleForm::XY8 ? 16 : 8;
        const int n_cycles = 4;  // fixed pulse count; only tau varies
        std::vector<double> log_tau, log_dev;
        for (double tau : {0.0025, 0.005, 0.01, 0.02}) {
            double t_total = 0.5 * half_per_cycle * n_cycles * tau;
            Propagator prop(sys, tau);
            PulseSchedule sched =
                pair_sequence(0, 1, AxisVariant::XXYY, n_cycles, tau, form);
            Rng rng(0);
            QuantumState psi = QuantumState::product(
                {ket_vector(Ket::Plus), ket_vector(Ket::PlusI), ket_vector(Ket::Plus)});
            QuantumState out = run_schedule(psi, prop, sched, PulseErrorModel{}, rng);
            MatrixXcd u_eff = testing::expm_series(MatrixXcd(
                -kImag * testing::hamiltonian_by_kron(surviving) * t_total));
            double dev = testing::pure_state_trace_distance(out.amplitudes,
                                                            u_eff * psi.amplitudes);
            log_tau.push_back(std::log(tau));
            log_dev.push_back(std::log(std::max(dev, 1e-300)));
        }
        double n = log_tau.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < log_tau.size(); ++k) {
            sx += log_tau[k];
            sy += log_dev[k];
            sxx += log_tau[k] * log_tau[k];
            sxy += log_tau[k] * log_dev[k];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double target = form == CycleForm::XY8 ? 3.0 : 2.0;
        bool pass = std::abs(slope - target) < 0.4;
        ok = ok && pass;
        std::printf("[%s] %s remnant scaling, slope %.2f (target %.0f +- 0.4)\n",
                    pass ? "PASS" : "FAIL", form == CycleForm::XY8 ? "XY-8" : "XY-4",
                    slope, target);
    }

    std::printf("verify: %s\n", ok ? "all checks passed" : "FAILURES");
    return ok ? 0 : 1;
}

}  // namespace
