#pragma once

// Built-in target unitaries (textbook gate matrices, QFT/Grover families,
// Haar samples) and the benchmark harness.
//
// Conventions (qubit 1 = most significant):
//   CNOT      control 1, target 2        CNOT21   control 2, target 1
//   XNOR      anti-controlled X: flips qubit 2 when qubit 1 is |0>
//   CPhase    controlled-Z: diag(1,1,1,-1)
//   XX..ZY    Pauli tensor products sigma_a (x) sigma_b
//   XXplusYY  exp(i*pi*(XX+YY)/8)
//   QFT_n     entries omega^{jk}/sqrt(d), omega = e^{2 pi i / d}
//   Grover_n  (2|s><s| - I) * (I - 2|1..1><1..1|), s = uniform superposition
//   Peres     Toffoli followed by CNOT(1 -> 2)
//   haar(n,s) Haar-random unitary, deterministic in the seed

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srbb/circuit.hpp"
#include "srbb/complex_matrix.hpp"
#include "srbb/optimize.hpp"

namespace srbb {

namespace detail {

// unitary from a classical bijection on n-bit states (qubit 1 = MSB)
inline CMat truth_table_unitary(int n, const std::function<int(int)>& f) {
    const int d = 1 << n;
    CMat m(d);
    std::vector<bool> seen(d, false);
    for (int s = 0; s < d; ++s) {
        const int t = f(s);
        if (t < 0 || t >= d || seen[t]) throw std::logic_error("truth table is not a bijection");
        seen[t] = true;
        m(t, s) = 1.0;
    }
    return m;
}

inline int bit_of(int s, int n, int q) { return (s >> (n - q)) & 1; }
inline int flip(int s, int n, int q) { return s ^ (1 << (n - q)); }

inline CMat pauli_tensor(char a, char b) {
    auto single = [](char p) {
        CMat m(2);
        switch (p) {
            case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
            case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
            case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
            default: throw std::logic_error("bad pauli");
        }
        return m;
    };
    const CMat pa = single(a), pb = single(b);
    CMat m(4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = pa(r >> 1, c >> 1) * pb(r & 1, c & 1);
    return m;
}

}  // namespace detail

inline CMat qft_matrix(int n) {
    const int d = 1 << n;
    CMat m(d);
    const double inv = 1.0 / std::sqrt((double)d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            m(j, k) = inv * std::exp(cplx(0, 2.0 * kPi * j * k / d));
    return m;
}

inline CMat grover_matrix(int n) {
    const int d = 1 << n;
    // oracle flips |1..1>; diffusion reflects about the uniform superposition
    CMat oracle = CMat::identity(d);
    oracle(d - 1, d - 1) = -1.0;
    CMat diff(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) diff(r, c) = 2.0 / d - (r == c ? 1.0 : 0.0);
    return diff * oracle;
}

inline CMat builtin_target(const std::string& name) {
    using detail::bit_of;
    using detail::flip;
    using detail::truth_table_unitary;

    if (name.rfind("haar(", 0) == 0 && name.back() == ')') {
        std::istringstream ss(name.substr(5, name.size() - 6));
        int n = 0;
        char comma = 0;
        unsigned long long seed = 0;
        if (!(ss >> n >> comma >> seed) || comma != ',' || n < 1 || n > 10)
            throw std::invalid_argument("bad haar target spec: " + name);
        std::string rest;
        if (ss >> rest) throw std::invalid_argument("bad haar target spec: " + name);
        return haar_random_unitary(1 << n, seed);
    }

    if (name == "CNOT")
        return truth_table_unitary(2, [](int s) { return bit_of(s, 2, 1) ? flip(s, 2, 2) : s; });
    if (name == "CNOT21")
        return truth_table_unitary(2, [](int s) { return bit_of(s, 2, 2) ? flip(s, 2, 1) : s; });
    if (name == "SWAP")
        return truth_table_unitary(2, [](int s) { return ((s & 1) << 1) | (s >> 1); });
    if (name == "DCNOT")
        return truth_table_unitary(2, [](int s) {
            if (bit_of(s, 2, 1)) s = flip(s, 2, 2);
            if (bit_of(s, 2, 2)) s = flip(s, 2, 1);
            return s;
        });
    if (name == "XNOR")
        return truth_table_unitary(2, [](int s) { return bit_of(s, 2, 1) ? s : flip(s, 2, 2); });
    if (name == "iSWAP" || name == "fSWAP" || name == "sqrtSWAP" || name == "sqrtiSWAP" ||
        name == "XXplusYY") {
        CMat m = CMat::identity(4);
        if (name == "iSWAP") {
            m(1, 1) = m(2, 2) = 0;
            m(1, 2) = m(2, 1) = cplx(0, 1);
        } else if (name == "fSWAP") {
            m(1, 1) = m(2, 2) = 0;
            m(1, 2) = m(2, 1) = 1;
            m(3, 3) = -1;
        } else if (name == "sqrtSWAP") {
            m(1, 1) = m(2, 2) = cplx(0.5, 0.5);
            m(1, 2) = m(2, 1) = cplx(0.5, -0.5);
        } else {  // sqrtiSWAP and XXplusYY coincide under these conventions
            const double r = 1.0 / std::sqrt(2.0);
            m(1, 1) = m(2, 2) = r;
            m(1, 2) = m(2, 1) = cplx(0, r);
        }
        return m;
    }
    if (name == "CPhase") {
        CMat m = CMat::identity(4);
        m(3, 3) = -1;
        return m;
    }
    if (name.size() == 2 && std::string("XYZ").find(name[0]) != std::string::npos &&
        std::string("XYZ").find(name[1]) != std::string::npos)
        return detail::pauli_tensor(name[0], name[1]);
    if (name == "QFT2") return qft_matrix(2);
    if (name == "QFT3") return qft_matrix(3);
    if (name == "QFT4") return qft_matrix(4);
    if (name == "Grover2") return grover_matrix(2);
    if (name == "Grover3") return grover_matrix(3);
    if (name == "Grover4") return grover_matrix(4);
    if (name == "Toffoli")
        return truth_table_unitary(3, [](int s) {
            return (bit_of(s, 3, 1) && bit_of(s, 3, 2)) ? flip(s, 3, 3) : s;
        });
    if (name == "Fredkin")
        return truth_table_unitary(3, [](int s) {
            if (!bit_of(s, 3, 1)) return s;
            const int b = bit_of(s, 3, 2), c = bit_of(s, 3, 3);
            return (s & 4) | (c << 1) | b;
        });
    if (name == "Peres")
        return truth_table_unitary(3, [](int s) {
            if (bit_of(s, 3, 1) && bit_of(s, 3, 2)) s = flip(s, 3, 3);
            if (bit_of(s, 3, 1)) s = flip(s, 3, 2);
            return s;
        });
    if (name == "CCCX")
        return truth_table_unitary(4, [](int s) {
            return (bit_of(s, 4, 1) && bit_of(s, 4, 2) && bit_of(s, 4, 3)) ? flip(s, 4, 4) : s;
        });
    throw std::invalid_argument("unknown builtin target: " + name);
}

inline const std::vector<std::string>& builtin_target_names() {
    static const std::vector<std::string> names = {
        "CNOT", "CNOT21", "SWAP",    "iSWAP",    "fSWAP",   "DCNOT",   "XNOR",
        "CPhase", "sqrtSWAP", "sqrtiSWAP", "XX",  "YY",      "ZZ",      "XZ",
        "ZX",   "ZY",     "XXplusYY", "QFT2",    "Grover2", "Toffoli", "Fredkin",
        "Peres", "QFT3",  "Grover3",  "CCCX",    "QFT4",    "Grover4"};
    return names;
}

// --- benchmark harness ---

struct BenchResult {
    std::string target;
    int n = 0;
    int layers = 0;
    double final_error = 0.0;
    double wall_seconds = 0.0;
    long cnot = 0, rz = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    std::string failure;  // nonempty if the target errored; suite continues
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

inline std::vector<BenchResult> bench_suite(const std::vector<std::string>& names,
                                            const ApproxConfig& cfg) {
    std::vector<BenchResult> out;
    for (const auto& name : names) {
        BenchResult r;
        r.target = name;
        r.seed = cfg.seed;
        r.layers = cfg.max_layers;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const CMat u = builtin_target(name);
            int n = 0;
            while ((1 << n) < u.dim()) ++n;
            r.n = n;
            const ApproxReport rep = approximate(u, cfg);
            r.final_error = rep.final_error;
            r.converged = rep.converged;
            const SrbbBasis basis = build_srbb(n);
            const GateCounts gc = gate_counts(synthesize(basis, rep.schedule));
            r.cnot = gc.cnot;
            r.rz = gc.rz;
            r.layers = (int)rep.schedule.layers.size();
        } catch (const std::exception& e) {
            r.failure = e.what();
        }
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

// Results file: one record per line, fixed field order, header with a config
// hash.  Wall time is intentionally excluded so reruns are bitwise identical.
inline void write_bench_results(std::ostream& os, const std::vector<BenchResult>& results,
                                const ApproxConfig& cfg) {
    std::ostringstream key;
    key << cfg.epsilon << "|" << cfg.max_layers << "|" << cfg.restarts << "|"
        << (int)cfg.optimizer << "|" << cfg.max_evals << "|" << cfg.seed << "|"
        << cfg.phase_invariant;
    for (const auto& r : results) key << "|" << r.target;
    os << "# config_hash " << std::hex << detail::fnv1a(key.str()) << std::dec << "\n";
    os << "# target n layers converged error cnot rz seed\n";
    char buf[64];
    for (const auto& r : results) {
        if (!r.failure.empty()) {
            os << r.target << " FAILED " << r.failure << "\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.17g", r.final_error);
        os << r.target << " " << r.n << " " << r.layers << " " << (r.converged ? 1 : 0) << " "
           << buf << " " << r.cnot << " " << r.rz << " " << r.seed << "\n";
    }
}

}  // namespace srbb
