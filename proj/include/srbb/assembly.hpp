#pragma once

// Parametric unitary assembly: structural exponentials of basis elements,
// the even/odd transposition partitions and their products, the grouped
// block-diagonal factors, and the zeta/psi/phi layer decomposition.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srbb/basis.hpp"
#include "srbb/complex_matrix.hpp"

namespace srbb {

// exp(i*theta*B) = cos(theta) I + i sin(theta) B, evaluated from the sign
// structure without densifying B.
inline CMat exp_element(const SrbbElement& e, double theta) {
    const int d = e.dim();
    const double c = std::cos(theta), s = std::sin(theta);
    CMat m(d);
    switch (e.kind) {
        case SrbbElement::Kind::Identity:
            for (int p = 0; p < d; ++p) m(p, p) = cplx(c, s);
            break;
        case SrbbElement::Kind::Diagonal:
            for (int p = 0; p < d; ++p) m(p, p) = cplx(c, s * e.signs[p]);
            break;
        case SrbbElement::Kind::TwoLevel: {
            for (int p = 0; p < d; ++p)
                m(p, p) = (e.signs[p] == 0) ? cplx(c, 0) : cplx(c, s * e.signs[p]);
            const int a = e.alpha - 1, b = e.beta - 1;
            if (e.pauli == Pauli::X) {
                m(a, b) = cplx(0, s);
                m(b, a) = cplx(0, s);
            } else {
                m(a, b) = cplx(s, 0);
                m(b, a) = cplx(-s, 0);
            }
            break;
        }
    }
    return m;
}

// In-place update M <- exp(i*theta*B) * M, touching only the affected rows.
inline void apply_exp_element_left(const SrbbElement& e, double theta, CMat& m) {
    const int d = e.dim();
    const double c = std::cos(theta), s = std::sin(theta);
    if (e.kind == SrbbElement::Kind::TwoLevel) {
        const int a = e.alpha - 1, b = e.beta - 1;
        for (int p = 0; p < d; ++p) {
            if (p == a || p == b) continue;
            const cplx ph(c, s * e.signs[p]);
            for (int col = 0; col < d; ++col) m(p, col) *= ph;
        }
        const cplx offa = (e.pauli == Pauli::X) ? cplx(0, s) : cplx(s, 0);
        const cplx offb = (e.pauli == Pauli::X) ? cplx(0, s) : cplx(-s, 0);
        for (int col = 0; col < d; ++col) {
            const cplx ra = m(a, col), rb = m(b, col);
            m(a, col) = c * ra + offa * rb;
            m(b, col) = c * rb + offb * ra;
        }
    } else {
        for (int p = 0; p < d; ++p) {
            const cplx ph(c, e.kind == SrbbElement::Kind::Identity ? s : s * e.signs[p]);
            for (int col = 0; col < d; ++col) m(p, col) *= ph;
        }
    }
}

enum class Parity { Even, Odd };

struct TranspositionSet {
    int n = 0;
    Parity parity = Parity::Even;
    int x = 0;                                  // 1..2^{n-1}-1
    std::vector<std::pair<int, int>> pairs;     // disjoint (alpha < beta), 1-based
};

// Pairs of coordinates whose indices differ by the XOR mask x: even parity
// couples even coordinates 2c+2 and 2(c^x)+2; odd parity couples the even
// coordinate 2c+2 with the odd coordinate 2(c^x)+1.
inline TranspositionSet build_transposition_sets(int n, Parity parity, int x) {
    if (n < 2) throw std::invalid_argument("build_transposition_sets: n must be >= 2");
    if (x < 1 || x > (1 << (n - 1)) - 1)
        throw std::invalid_argument("build_transposition_sets: x out of range");
    TranspositionSet ts{n, parity, x, {}};
    for (int c = 0; c < (1 << (n - 1)); ++c) {
        const int cc = c ^ x;
        if (c > cc) continue;
        const int a = 2 * c + 2;
        const int b = (parity == Parity::Even) ? 2 * cc + 2 : 2 * cc + 1;
        ts.pairs.emplace_back(a, b);
    }
    return ts;
}

inline Permutation pi_t(const TranspositionSet& ts) {
    Permutation p(1 << ts.n);
    for (const auto& [a, b] : ts.pairs) p.swap_points(a, b);
    return p;
}

namespace detail {

inline void apply_permutation_left(const Permutation& p, CMat& m) {
    // rows r and p(r) swap; p is an involution here so a single pass works
    const int d = m.dim();
    for (int r = 1; r <= d; ++r) {
        const int img = p(r);
        if (img <= r) continue;
        for (int col = 0; col < d; ++col) std::swap(m(r - 1, col), m(img - 1, col));
    }
}

inline void apply_permutation_right(const Permutation& p, CMat& m) {
    const int d = m.dim();
    for (int c = 1; c <= d; ++c) {
        const int img = p(c);
        if (img <= c) continue;
        for (int row = 0; row < d; ++row) std::swap(m(row, c - 1), m(row, img - 1));
    }
}

}  // namespace detail

// The four basis indices whose exponentials sit inside the grouped factor for
// one transposition, in product order.
inline std::vector<int> m_factor_indices(const TranspositionSet& ts,
                                         std::pair<int, int> pr) {
    const auto [a, b] = pr;
    if (ts.parity == Parity::Even)
        return {h_index(b - 1, a), f_index(b - 1, a), h_index(b, a - 1), f_index(b, a - 1)};
    return {h_index(b, a - 1), f_index(b, a - 1), h_index(b + 1, a), f_index(b + 1, a)};
}

// Product of the four exponentials per transposition.  The factor couples
// the cross coordinate pairs of its transposition set; conjugating by the
// pi_t permutation maps it onto adjacent 2x2 blocks (a multiplexed-ZYZ-type
// matrix), which is how the circuit realization lowers it.
inline CMat build_m_factor(const SrbbBasis& basis, const TranspositionSet& ts,
                           const std::vector<double>& angles) {
    if (angles.size() != 4 * ts.pairs.size())
        throw std::invalid_argument("build_m_factor: need 4 angles per transposition");
    CMat m = CMat::identity(basis.d);
    size_t k = angles.size();
    for (auto it = ts.pairs.rbegin(); it != ts.pairs.rend(); ++it) {
        const auto idx = m_factor_indices(ts, *it);
        for (int q = 3; q >= 0; --q)
            apply_exp_element_left(basis.at(idx[q]), angles[--k], m);
    }
    return m;
}

inline int zeta_angle_count(int n) { return (1 << n) - 1; }
inline int psi_angle_count(int n) {
    return (1 << n) + ((1 << (n - 1)) - 1) * (1 << n) * (n >= 2 ? 1 : 0);
}
inline int phi_angle_count(int n) {
    return n >= 2 ? ((1 << (n - 1)) - 1) * (1 << n) : 0;
}

// Diagonal factor: product of exponentials of all nontrivial Z-strings,
// ascending chi (= ascending slot index l^2-1).
inline CMat build_zeta(const SrbbBasis& basis, const std::vector<double>& angles) {
    const int d = basis.d;
    if ((int)angles.size() != d - 1)
        throw std::invalid_argument("build_zeta: need 2^n - 1 angles");
    CMat m = CMat::identity(d);
    for (int l = d; l >= 2; --l)
        apply_exp_element_left(basis.at(l * l - 1), angles[l - 2], m);
    return m;
}

// First factor of psi: per adjacent pair (2j-1, 2j), the X- then Y-type
// exponentials at indices (2j-1)^2 and 4j^2-2j.
inline CMat build_psi(const SrbbBasis& basis, const std::vector<double>& angles) {
    const int n = basis.n;
    if (n < 1) throw std::invalid_argument("build_psi: basis is not qubit-sized");
    if ((int)angles.size() != psi_angle_count(n))
        throw std::invalid_argument("build_psi: angle count mismatch");
    const int half = 1 << (n - 1);
    CMat m = CMat::identity(basis.d);
    size_t k = angles.size();
    for (int x = half - 1; x >= 1; --x) {
        const TranspositionSet ts = build_transposition_sets(n, Parity::Even, x);
        const size_t cnt = 4 * ts.pairs.size();
        k -= cnt;
        const std::vector<double> sub(angles.begin() + k, angles.begin() + k + cnt);
        m = build_m_factor(basis, ts, sub) * m;
    }
    for (int j = half; j >= 1; --j) {
        apply_exp_element_left(basis.at(4 * j * j - 2 * j), angles[2 * j - 1], m);
        apply_exp_element_left(basis.at((2 * j - 1) * (2 * j - 1)), angles[2 * j - 2], m);
    }
    return m;
}

inline CMat build_phi(const SrbbBasis& basis, const std::vector<double>& angles) {
    const int n = basis.n;
    if (n < 1) throw std::invalid_argument("build_phi: basis is not qubit-sized");
    if ((int)angles.size() != phi_angle_count(n))
        throw std::invalid_argument("build_phi: angle count mismatch");
    CMat m = CMat::identity(basis.d);
    size_t k = angles.size();
    for (int x = (1 << (n - 1)) - 1; x >= 1; --x) {
        const TranspositionSet ts = build_transposition_sets(n, Parity::Odd, x);
        const size_t cnt = 4 * ts.pairs.size();
        k -= cnt;
        const std::vector<double> sub(angles.begin() + k, angles.begin() + k + cnt);
        m = build_m_factor(basis, ts, sub) * m;
    }
    return m;
}

struct ThetaSchedule {
    int n = 0;
    int L = 1;
    // layers[l] has length 2^{2n}-1, laid out zeta | psi | phi.
    std::vector<std::vector<double>> layers;
    // flat position -> basis index j, identical for every layer
    std::vector<int> index_map;

    int angles_per_layer() const { return (1 << (2 * n)) - 1; }

    static ThetaSchedule zeros(int n, int L) {
        if (n < 1 || L < 1) throw std::invalid_argument("ThetaSchedule: n, L must be >= 1");
        ThetaSchedule s;
        s.n = n;
        s.L = L;
        s.layers.assign(L, std::vector<double>(((size_t)1 << (2 * n)) - 1, 0.0));
        s.index_map = build_index_map(n);
        if ((int)s.index_map.size() != s.angles_per_layer())
            throw std::logic_error("ThetaSchedule: partition sizes do not sum to 2^{2n}-1");
        return s;
    }

    static std::vector<int> build_index_map(int n) {
        std::vector<int> map;
        const int d = 1 << n, half = 1 << (n - 1);
        for (int l = 2; l <= d; ++l) map.push_back(l * l - 1);
        for (int j = 1; j <= half; ++j) {
            map.push_back((2 * j - 1) * (2 * j - 1));
            map.push_back(4 * j * j - 2 * j);
        }
        for (Parity par : {Parity::Even, Parity::Odd})
            for (int x = 1; x <= half - 1; ++x) {
                const TranspositionSet ts = build_transposition_sets(n, par, x);
                for (const auto& pr : ts.pairs)
                    for (int idx : m_factor_indices(ts, pr)) map.push_back(idx);
            }
        return map;
    }
};

inline CMat assemble_layer(const SrbbBasis& basis, const std::vector<double>& theta) {
    const int n = basis.n;
    const int zc = zeta_angle_count(n), pc = psi_angle_count(n), fc = phi_angle_count(n);
    if ((int)theta.size() != zc + pc + fc)
        throw std::invalid_argument("assemble_layer: angle count mismatch");
    const std::vector<double> za(theta.begin(), theta.begin() + zc);
    const std::vector<double> pa(theta.begin() + zc, theta.begin() + zc + pc);
    const std::vector<double> fa(theta.begin() + zc + pc, theta.end());
    if (fc == 0) return build_zeta(basis, za) * build_psi(basis, pa);
    return build_zeta(basis, za) * build_psi(basis, pa) * build_phi(basis, fa);
}

inline CMat assemble(const SrbbBasis& basis, const ThetaSchedule& s) {
    CMat m = CMat::identity(basis.d);
    for (const auto& layer : s.layers) m = m * assemble_layer(basis, layer);
    return m;
}

// --- schedule file: bit-exact text serialization ---

inline void write_schedule(std::ostream& os, const ThetaSchedule& s) {
    os << "n " << s.n << "\nL " << s.L << "\nindex_map";
    for (int j : s.index_map) os << " " << j;
    os << "\n";
    char buf[64];
    for (const auto& layer : s.layers) {
        os << "layer";
        for (double v : layer) { std::snprintf(buf, sizeof buf, " %a", v); os << buf; }
        os << "\n";
    }
}

inline ThetaSchedule read_schedule(std::istream& is) {
    ThetaSchedule s;
    s.L = 0;
    std::string line;
    bool have_n = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n") { ls >> s.n; have_n = true; }
        else if (key == "L") { int ignored; ls >> ignored; }
        else if (key == "index_map") {
            int j;
            while (ls >> j) s.index_map.push_back(j);
        } else if (key == "layer") {
            std::vector<double> layer;
            std::string tok;
            while (ls >> tok) {
                char* end = nullptr;
                const double v = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0')
                    throw std::runtime_error("schedule file: bad angle '" + tok + "'");
                layer.push_back(v);
            }
            s.layers.push_back(std::move(layer));
        } else {
            throw std::runtime_error("schedule file: unknown field '" + key + "'");
        }
    }
    if (!have_n || s.layers.empty())
        throw std::runtime_error("schedule file: missing n or layers");
    s.L = (int)s.layers.size();
    const size_t want = ((size_t)1 << (2 * s.n)) - 1;
    for (const auto& layer : s.layers)
        if (layer.size() != want)
            throw std::runtime_error("schedule file: layer length mismatch");
    if (s.index_map.empty()) s.index_map = ThetaSchedule::build_index_map(s.n);
    if (s.index_map.size() != want)
        throw std::runtime_error("schedule file: index_map length mismatch");
    return s;
}

inline ThetaSchedule read_schedule_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open schedule file: " + path);
    return read_schedule(f);
}

inline void write_schedule_file(const std::string& path, const ThetaSchedule& s) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write schedule file: " + path);
    write_schedule(f, s);
}

}  // namespace srbb
