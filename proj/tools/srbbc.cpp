// srbbc: compiler from unitary matrices to CNOT + RZ/RY circuits via the
// recursive block basis ansatz.
//
// Subcommands: basis, compile, synth, verify, count, lift, bench.
// Exit codes: 0 success, 1 validation/usage error, 2 non-convergence
// (compile --strict only).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "../vendor/CLI11.hpp"
#include "srbb/assembly.hpp"
#include "srbb/basis.hpp"
#include "srbb/circuit.hpp"
#include "srbb/complex_matrix.hpp"
#include "srbb/optimize.hpp"
#include "srbb/targets.hpp"

namespace {

srbb::CMat load_target(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) return srbb::builtin_target(spec.substr(8));
    return srbb::read_matrix_file(spec);
}

int qubits_of(const srbb::CMat& u) {
    int n = 0;
    while ((1 << n) < u.dim()) ++n;
    if ((1 << n) != u.dim())
        throw std::invalid_argument("target dimension is not a power of two");
    return n;
}

srbb::Optimizer parse_optimizer(const std::string& s) {
    if (s == "nelder-mead") return srbb::Optimizer::NelderMead;
    if (s == "powell") return srbb::Optimizer::Powell;
    if (s == "finite-difference-gradient") return srbb::Optimizer::FiniteDifferenceGradient;
    throw CLI::ValidationError("--optimizer",
                               "must be nelder-mead, powell, or finite-difference-gradient");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srbbc: approximate n-qubit unitaries by layered recursive-block-basis "
                 "circuits (CNOT + RZ/RY)"};
    app.require_subcommand(1);

    // --- basis ---
    auto* cmd_basis = app.add_subcommand("basis", "summarize the basis for n qubits");
    int basis_n = 2;
    std::string basis_out;
    cmd_basis->add_option("--n", basis_n, "qubit count")->required()->check(CLI::Range(1, 8));
    cmd_basis->add_option("--out", basis_out, "write a per-element summary to this file");

    // --- compile ---
    auto* cmd_compile = app.add_subcommand("compile", "fit a layered circuit to a target");
    std::string tgt, report_path, schedule_out, optimizer_name = "nelder-mead";
    int layers = 1, restarts = 32;
    double epsilon = 1e-6, time_budget = 0.0;
    std::uint64_t seed = 1;
    bool phase_invariant = false, strict = false;
    int max_evals = 60000;
    cmd_compile->add_option("--target", tgt, "matrix file or builtin:<name>")->required();
    cmd_compile->add_option("--layers", layers, "maximum layers")->check(CLI::Range(1, 64));
    cmd_compile->add_option("--restarts", restarts)->check(CLI::Range(1, 100000));
    cmd_compile->add_option("--epsilon", epsilon, "target Frobenius error");
    cmd_compile->add_option("--optimizer", optimizer_name,
                            "nelder-mead | powell | finite-difference-gradient");
    cmd_compile->add_option("--seed", seed);
    cmd_compile->add_option("--max-evals", max_evals, "objective evaluations per restart");
    cmd_compile->add_option("--time-budget", time_budget, "wall-clock budget in seconds (0 = off)");
    cmd_compile->add_flag("--phase-invariant", phase_invariant,
                          "minimize distance up to a global phase");
    cmd_compile->add_option("--report", report_path, "write the structured report here");
    cmd_compile->add_option("--schedule-out", schedule_out, "write the angle schedule here");
    cmd_compile->add_flag("--strict", strict, "exit 2 if epsilon is not reached");

    // --- synth ---
    auto* cmd_synth = app.add_subcommand("synth", "schedule file -> circuit file");
    std::string synth_in, synth_out;
    cmd_synth->add_option("--schedule", synth_in)->required();
    cmd_synth->add_option("--out", synth_out, "output circuit file (quantum-assembly text)")
        ->required();

    // --- verify ---
    auto* cmd_verify = app.add_subcommand("verify", "circuit vs matrix Frobenius distance");
    std::string verify_circuit, verify_target;
    double verify_tol = 1e-10;
    cmd_verify->add_option("--circuit", verify_circuit)->required();
    cmd_verify->add_option("--target", verify_target, "matrix file or builtin:<name>")->required();
    cmd_verify->add_option("--tol", verify_tol, "tolerance for the up-to-phase pass flag");

    // --- count ---
    auto* cmd_count = app.add_subcommand("count", "gate counts and scaling-bound check");
    std::string count_circuit;
    int count_n = 0, count_layers = 1;
    cmd_count->add_option("--circuit", count_circuit, "count an existing circuit file");
    cmd_count->add_option("--n", count_n, "or: count a freshly synthesized template");
    cmd_count->add_option("--layers", count_layers)->check(CLI::Range(1, 64));

    // --- lift ---
    auto* cmd_lift = app.add_subcommand("lift", "n-qubit schedule -> (n+1)-qubit template");
    std::string lift_in, lift_out, lift_angles;
    cmd_lift->add_option("--schedule", lift_in, "n-qubit schedule file")->required();
    cmd_lift->add_option("--angles", lift_angles,
                         "(n+1)-qubit schedule providing the lifted angles (default zeros)");
    cmd_lift->add_option("--out", lift_out, "output circuit file")->required();

    // --- bench ---
    auto* cmd_bench = app.add_subcommand("bench", "run the builtin target suite");
    std::string bench_targets, bench_out;
    std::uint64_t bench_seed = 0;
    int bench_layers = 1, bench_restarts = 8, bench_evals = 20000;
    double bench_epsilon = 1e-6;
    bool bench_seed_set = false;
    cmd_bench->add_option("--targets", bench_targets,
                          "comma-separated names (default: every builtin)");
    cmd_bench
        ->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& v) {
                bench_seed = v;
                bench_seed_set = true;
            },
            "rng seed (required)")
        ->required();
    cmd_bench->add_option("--layers", bench_layers)->check(CLI::Range(1, 64));
    cmd_bench->add_option("--restarts", bench_restarts)->check(CLI::Range(1, 100000));
    cmd_bench->add_option("--max-evals", bench_evals);
    cmd_bench->add_option("--epsilon", bench_epsilon);
    cmd_bench->add_option("--out", bench_out, "results file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cmd_basis->parsed()) {
            const srbb::SrbbBasis b = srbb::build_srbb(basis_n);
            std::cout << "n " << b.n << "\ndim " << b.d << "\nelements " << b.elements.size()
                      << "\ndiagonal_slots " << b.diagonal_indices.size() << "\n";
            if (!basis_out.empty()) {
                std::ofstream f(basis_out);
                if (!f) throw std::runtime_error("cannot write " + basis_out);
                for (const auto& e : b.elements) {
                    f << e.index << " ";
                    switch (e.kind) {
                        case srbb::SrbbElement::Kind::Identity: f << "identity"; break;
                        case srbb::SrbbElement::Kind::Diagonal:
                            f << "diagonal mask " << e.z_mask;
                            break;
                        case srbb::SrbbElement::Kind::TwoLevel:
                            f << (e.pauli == srbb::Pauli::X ? "x-type" : "y-type") << " pair ("
                              << e.alpha << "," << e.beta << ")";
                            break;
                    }
                    f << " trace " << e.trace() << "\n";
                }
            }
            return 0;
        }

        if (cmd_compile->parsed()) {
            const srbb::CMat u = load_target(tgt);
            srbb::ApproxConfig cfg;
            cfg.epsilon = epsilon;
            cfg.max_layers = layers;
            cfg.restarts = restarts;
            cfg.optimizer = parse_optimizer(optimizer_name);
            cfg.max_evals = max_evals;
            cfg.seed = seed;
            cfg.phase_invariant = phase_invariant;
            cfg.time_budget_seconds = time_budget;
            const srbb::ApproxReport rep = srbb::approximate(u, cfg);
            std::cout << "converged " << (rep.converged ? 1 : 0) << "\nfinal_error "
                      << rep.final_error << "\nlayers " << rep.schedule.layers.size()
                      << "\nevaluations " << rep.total_evaluations << "\nwall_seconds "
                      << rep.wall_seconds << "\n";
            if (!report_path.empty()) {
                std::ofstream f(report_path);
                if (!f) throw std::runtime_error("cannot write " + report_path);
                srbb::write_report(f, rep);
            }
            if (!schedule_out.empty()) srbb::write_schedule_file(schedule_out, rep.schedule);
            if (strict && !rep.converged) return 2;
            return 0;
        }

        if (cmd_synth->parsed()) {
            const srbb::ThetaSchedule s = srbb::read_schedule_file(synth_in);
            const srbb::SrbbBasis b = srbb::build_srbb(s.n);
            const srbb::Circuit c = srbb::synthesize(b, s);
            srbb::write_qasm_file(synth_out, c);
            const srbb::GateCounts gc = srbb::gate_counts(c);
            std::cout << "n " << c.n << "\ncnot " << gc.cnot << "\nrz " << gc.rz << "\nry "
                      << gc.ry << "\n";
            return 0;
        }

        if (cmd_verify->parsed()) {
            const srbb::Circuit c = srbb::read_qasm_file(verify_circuit);
            const srbb::CMat u = load_target(verify_target);
            if (u.dim() != (1 << c.n))
                throw std::invalid_argument("circuit and target dimensions differ");
            const srbb::CMat got = srbb::evaluate(c);
            const double plain = srbb::frobenius_distance(got, u);
            const double aligned = srbb::phase_aligned_distance(got, u);
            std::cout << "distance " << plain << "\ndistance_up_to_phase " << aligned
                      << "\nup_to_phase_pass " << (aligned <= verify_tol ? 1 : 0) << "\n";
            return 0;
        }

        if (cmd_count->parsed()) {
            srbb::GateCounts gc;
            int n = 0;
            long layer_count = count_layers;
            if (!count_circuit.empty()) {
                const srbb::Circuit c = srbb::read_qasm_file(count_circuit);
                gc = srbb::gate_counts(c);
                n = c.n;
            } else if (count_n >= 1) {
                const srbb::SrbbBasis b = srbb::build_srbb(count_n);
                const srbb::ThetaSchedule s = srbb::ThetaSchedule::zeros(count_n, count_layers);
                gc = srbb::gate_counts(srbb::synthesize(b, s));
                n = count_n;
            } else {
                throw CLI::ValidationError("count", "provide --circuit or --n");
            }
            const long cnot_bound =
                layer_count * (2L * (1L << (2 * n)) + (long)(n - 5) * (1L << n));
            const long rz_bound =
                layer_count * ((3L * (1L << (2 * n))) / 2 - (5L * (1L << n)) / 2 + 1);
            std::cout << "n " << n << "\ncnot " << gc.cnot << "\nrz " << gc.rz << "\nry " << gc.ry
                      << "\ncnot_bound " << cnot_bound << "\nrz_bound " << rz_bound
                      << "\nwithin_bounds " << ((gc.cnot <= cnot_bound && gc.rz <= rz_bound) ? 1 : 0)
                      << "\n";
            return 0;
        }

        if (cmd_lift->parsed()) {
            const srbb::ThetaSchedule from_s = srbb::read_schedule_file(lift_in);
            const srbb::SrbbBasis from_basis = srbb::build_srbb(from_s.n);
            const srbb::Circuit from = srbb::synthesize(from_basis, from_s);
            const srbb::SrbbBasis to_basis = srbb::build_srbb(from_s.n + 1);
            srbb::ThetaSchedule to_s =
                lift_angles.empty() ? srbb::ThetaSchedule::zeros(from_s.n + 1, from_s.L)
                                    : srbb::read_schedule_file(lift_angles);
            const srbb::Circuit lifted = srbb::lift_circuit(from, to_basis, to_s);
            srbb::write_qasm_file(lift_out, lifted);
            const srbb::GateCounts gc = srbb::gate_counts(lifted);
            std::cout << "n " << lifted.n << "\ncnot " << gc.cnot << "\nrz " << gc.rz << "\nry "
                      << gc.ry << "\n";
            return 0;
        }

        if (cmd_bench->parsed()) {
            (void)bench_seed_set;
            std::vector<std::string> names;
            if (bench_targets.empty()) {
                names = srbb::builtin_target_names();
            } else {
                std::istringstream ss(bench_targets);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) names.push_back(tok);
            }
            srbb::ApproxConfig cfg;
            cfg.epsilon = bench_epsilon;
            cfg.max_layers = bench_layers;
            cfg.restarts = bench_restarts;
            cfg.max_evals = bench_evals;
            cfg.seed = bench_seed;
            const auto results = srbb::bench_suite(names, cfg);
            std::ofstream f(bench_out);
            if (!f) throw std::runtime_error("cannot write " + bench_out);
            srbb::write_bench_results(f, results, cfg);
            for (const auto& r : results)
                std::cout << r.target << " "
                          << (r.failure.empty() ? std::to_string(r.final_error)
                                                : "FAILED " + r.failure)
                          << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
