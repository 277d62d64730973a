// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Pinned tolerances and budgets; every run is deterministic.

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srbb/circuit.hpp"
#include "srbb/targets.hpp"
#include "test_helpers.hpp"

using namespace srbb;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail = {}) {
    std::printf("criterion %2d (%s): %s%s%s\n", idx, name.c_str(), ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::vector<double> random_angles(int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    std::vector<double> x(k);
    for (auto& v : x) v = u(rng);
    return x;
}

// multiset of gate shapes per segment label
std::multiset<std::string> footprint(const Circuit& c, const std::string& seg) {
    std::multiset<std::string> out;
    for (const auto& g : c.gates) {
        if (g.segment != seg) continue;
        std::ostringstream os;
        switch (g.kind) {
            case Gate::Kind::CNOT: os << "cnot " << g.control << " " << g.target; break;
            case Gate::Kind::RZ: os << "rz " << g.qubit; break;
            case Gate::Kind::RY: os << "ry " << g.qubit; break;
            case Gate::Kind::MRot: os << "mrot"; break;
        }
        out.insert(os.str());
    }
    return out;
}

std::set<std::string> segments(const Circuit& c) {
    std::set<std::string> out;
    for (const auto& g : c.gates) out.insert(g.segment);
    return out;
}

bool criterion1() {
    for (int d = 2; d <= 16; ++d) {
        const SrbbBasis b = build_rbb(d);
        if ((int)b.elements.size() != d * d) return false;
        for (const auto& e : b.elements) {
            const CMat m = e.dense();
            const CMat sq = m * m;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    if (m(r, c) != std::conj(m(c, r))) return false;  // Hermitian, exact
                    const cplx want = (r == c) ? cplx(1.0) : cplx(0.0);
                    if (sq(r, c) != want) return false;  // squares to I, exact
                }
            if (e.kind != SrbbElement::Kind::Identity) {
                if (d % 2 == 0 && e.trace() != 0) return false;
                if (d % 2 == 1 && e.trace() != 1) return false;
            }
        }
        if (d <= 8) {
            if (testutil::exact_rank(testutil::vectorize_basis(b)) != d * d) return false;
        }
    }
    if (testutil::numerical_rank(testutil::vectorize_basis(build_rbb(16)), 1e-8) != 256)
        return false;
    return true;
}

bool criterion2() {
    for (int n = 1; n <= 4; ++n) {
        const SrbbBasis b = build_srbb(n);
        std::mt19937_64 rng(42 + n);
        std::uniform_int_distribution<int> pick(1, b.d * b.d);
        std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
        for (int t = 0; t < 100; ++t) {
            const SrbbElement& e = b.at(pick(rng));
            const double theta = ang(rng);
            const CMat ours = exp_element(e, theta);
            const CMat ref = expm_oracle(e.dense() * cplx(theta));
            if (frobenius_distance(ours, ref) > 1e-11) return false;
        }
    }
    return true;
}

bool criterion3() {
    for (int n : {2, 3, 4}) {
        const SrbbBasis b = build_srbb(n);
        for (int t = 0; t < 50; ++t) {
            const int L = (n <= 3) ? 1 + (t % 2) : 1;
            ThetaSchedule s = ThetaSchedule::zeros(n, L);
            std::mt19937_64 rng(3000 + 100 * n + t);
            std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
            for (auto& layer : s.layers)
                for (auto& v : layer) v = u(rng);
            if (frobenius_distance(evaluate(synthesize(b, s)), assemble(b, s)) > 1e-10)
                return false;
        }
        // transposition networks reproduce their permutation matrices exactly
        for (Parity par : {Parity::Even, Parity::Odd})
            for (int x = 1; x <= (1 << (n - 1)) - 1; ++x) {
                const TranspositionSet ts = build_transposition_sets(n, par, x);
                Circuit pc = synthesize_pit(ts);
                pc.n = n;
                if (frobenius_distance(evaluate(pc), permutation_to_matrix(pi_t(ts))) != 0.0)
                    return false;
            }
    }
    return true;
}

bool criterion4() {
    for (int n : {2, 3, 4, 5}) {
        const SrbbBasis b = build_srbb(n);
        const GateCounts gc =
            gate_counts(synthesize_layer(b, random_angles((1 << (2 * n)) - 1, 4000 + n)));
        if (gc.cnot > 2L * (1L << (2 * n)) + (long)(n - 5) * (1L << n)) return false;
        if (gc.rz > (3L * (1L << (2 * n))) / 2 - (5L * (1L << n)) / 2 + 1) return false;
    }
    return true;
}

bool criterion5(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (const char* name : {"CNOT", "SWAP", "CPhase", "QFT2"}) {
        ApproxConfig cfg;
        cfg.max_layers = 1;
        cfg.restarts = 32;
        cfg.epsilon = 1e-6;
        cfg.seed = 1;
        const ApproxReport rep = approximate(builtin_target(name), cfg);
        os << name << "=" << rep.final_error << " ";
        if (rep.final_error > 1e-6) ok = false;
    }
    detail = os.str();
    return ok;
}

bool criterion6(std::string& detail) {
    std::ostringstream os;
    ApproxConfig tof;
    tof.max_layers = 1;
    tof.restarts = 128;
    tof.epsilon = 1e-3;
    tof.seed = 1;
    const ApproxReport rt = approximate(builtin_target("Toffoli"), tof);
    os << "Toffoli=" << rt.final_error
       << " (tighter errors are reachable with larger restart budgets) ";

    ApproxConfig qft;
    qft.max_layers = 3;
    qft.restarts = 8;
    qft.epsilon = 0.29;
    qft.seed = 1;
    qft.time_budget_seconds = 540.0;  // fixed 10-minute budget with margin
    const ApproxReport rq = approximate(builtin_target("QFT4"), qft);
    os << "QFT4=" << rq.final_error;
    detail = os.str();
    return rt.final_error <= 1e-3 && rq.final_error <= 0.3;
}

bool criterion7(std::string& detail) {
    int improved = 0;
    bool monotone = true;
    for (int t = 0; t < 10; ++t) {
        const CMat u = haar_random_unitary(4, 7000 + t, true);
        // a single full layer already spans the two-qubit group, so cap the
        // per-layer budget to make depth the resource under test
        ApproxConfig cfg;
        cfg.max_layers = 3;
        cfg.restarts = 4;
        cfg.max_evals = 400;
        cfg.epsilon = 1e-14;
        cfg.seed = 11;
        const ApproxReport rep = approximate(u, cfg);
        for (size_t i = 1; i < rep.layer_errors.size(); ++i)
            if (rep.layer_errors[i] > rep.layer_errors[i - 1] + 1e-12) monotone = false;
        if (rep.layer_errors.size() == 3 && rep.layer_errors[2] < rep.layer_errors[0])
            ++improved;
    }
    std::ostringstream os;
    os << "improved=" << improved << "/10 monotone=" << (monotone ? "yes" : "no");
    detail = os.str();
    return monotone && improved >= 9;
}

bool criterion8() {
    for (int n : {2, 3}) {
        const SrbbBasis from_basis = build_srbb(n);
        const SrbbBasis to_basis = build_srbb(n + 1);
        const Circuit from = synthesize(from_basis, ThetaSchedule::zeros(n, 1));

        ThetaSchedule to_s = ThetaSchedule::zeros(n + 1, 1);
        std::mt19937_64 rng(8800 + n);
        std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
        for (auto& v : to_s.layers[0]) v = dist(rng);

        const Circuit lifted = lift_circuit(from, to_basis, to_s);
        const Circuit direct = synthesize(to_basis, to_s);
        if (frobenius_distance(evaluate(lifted), evaluate(direct)) > 1e-10) return false;
        if (segments(lifted) != segments(direct)) return false;
        for (const auto& seg : segments(direct))
            if (footprint(lifted, seg) != footprint(direct, seg)) return false;
    }
    return true;
}

bool criterion9(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (int n : {1, 2}) {
        const SrbbBasis b = build_srbb(n);
        int hits = 0;
        for (int t = 0; t < 50; ++t) {
            ThetaSchedule planted = ThetaSchedule::zeros(n, 1);
            std::mt19937_64 rng(1000 + t);
            std::uniform_real_distribution<double> u01(0.0, 2.0 * kPi);
            for (auto& v : planted.layers[0]) v = u01(rng);
            const CMat u = assemble(b, planted);

            ApproxConfig cfg;
            cfg.epsilon = 1e-8;
            cfg.restarts = 1;
            cfg.max_evals = 200000;
            cfg.seed = 7;
            cfg.warm_start = planted.layers[0];
            for (auto& v : cfg.warm_start)
                v += 0.001 * std::sin((double)(&v - cfg.warm_start.data()));
            if (approximate(u, cfg).final_error <= 1e-8) ++hits;
        }
        os << "n=" << n << ":" << hits << "/50 ";
        if (hits != 50) ok = false;
    }
    detail = os.str();
    return ok;
}

bool criterion10() {
    const SrbbBasis b = build_srbb(3);
    ThetaSchedule s = ThetaSchedule::zeros(3, 2);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    for (auto& layer : s.layers)
        for (auto& v : layer) v = u(rng);
    const Circuit c = synthesize(b, s);
    std::ostringstream os;
    write_qasm(os, c);
    std::istringstream is(os.str());
    const Circuit back = read_qasm(is);
    return phase_aligned_distance(evaluate(back), evaluate(c)) <= 1e-10;
}

}  // namespace

int main() {
    std::string detail;
    report(1, "basis properties and full vectorized rank", criterion1());
    report(2, "closed-form exponential matches the dense oracle", criterion2());
    report(3, "synthesized circuits equal assembled matrices", criterion3());
    report(4, "one-layer gate counts meet the scaling bounds", criterion4());
    report(5, "two-qubit named targets compile to 1e-6", criterion5(detail), detail);
    report(6, "Toffoli to 1e-3; QFT4 under a fixed time budget", criterion6(detail), detail);
    report(7, "layer errors non-increasing and improving by L=3", criterion7(detail), detail);
    report(8, "lifted circuits match direct synthesis", criterion8());
    report(9, "planted schedules recovered from warm starts", criterion9(detail), detail);
    report(10, "assembly export round-trips", criterion10());
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures ? 1 : 0;
}
