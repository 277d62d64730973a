#pragma once

// Gate-level IR and lowering: multiplexed rotations, diagonal staircases,
// transposition CNOT networks, block-diagonal cores, full-layer synthesis,
// n -> n+1 lifts, gate counting, and quantum-assembly text export.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srbb/assembly.hpp"
#include "srbb/basis.hpp"
#include "srbb/complex_matrix.hpp"

namespace srbb {

struct Gate {
    enum class Kind { CNOT, RZ, RY, MRot };
    Kind kind = Kind::CNOT;

    int control = 0, target = 0;  // CNOT (1-based qubits)
    int qubit = 0;                // RZ / RY
    double angle = 0.0;

    // MRot macro: block-diagonal of 2^{#controls} rotations on `target`,
    // selected by the control values (first control = most significant).
    char axis = 'Z';
    std::vector<int> controls;
    std::vector<bool> open_controls;  // true = triggers on |0>; normalized away on lowering
    std::vector<double> angles;

    std::string segment;

    static Gate cnot(int c, int t, std::string seg = {}) {
        Gate g;
        g.kind = Kind::CNOT;
        g.control = c;
        g.target = t;
        g.segment = std::move(seg);
        if (c == t || c < 1 || t < 1) throw std::invalid_argument("cnot: bad qubits");
        return g;
    }
    static Gate rz(int q, double a, std::string seg = {}) {
        Gate g;
        g.kind = Kind::RZ;
        g.qubit = q;
        g.angle = a;
        g.segment = std::move(seg);
        return g;
    }
    static Gate ry(int q, double a, std::string seg = {}) {
        Gate g;
        g.kind = Kind::RY;
        g.qubit = q;
        g.angle = a;
        g.segment = std::move(seg);
        return g;
    }
    static Gate mrot(char axis, std::vector<int> controls, int target,
                     std::vector<double> angles, std::string seg = {}) {
        Gate g;
        g.kind = Kind::MRot;
        g.axis = axis;
        g.controls = std::move(controls);
        g.open_controls.assign(g.controls.size(), false);
        g.target = target;
        g.angles = std::move(angles);
        g.segment = std::move(seg);
        if (g.angles.size() != (size_t)1 << g.controls.size())
            throw std::invalid_argument("mrot: need 2^{#controls} angles");
        for (int c : g.controls)
            if (c == target) throw std::invalid_argument("mrot: control equals target");
        return g;
    }
};

struct Circuit {
    int n = 0;
    std::vector<Gate> gates;  // leftmost acts first

    void append(const Circuit& other) {
        gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    }
};

struct GateCounts {
    long cnot = 0, rz = 0, ry = 0;
};

inline GateCounts gate_counts(const Circuit& c) {
    GateCounts g;
    for (const auto& gate : c.gates) switch (gate.kind) {
            case Gate::Kind::CNOT: ++g.cnot; break;
            case Gate::Kind::RZ: ++g.rz; break;
            case Gate::Kind::RY: ++g.ry; break;
            case Gate::Kind::MRot:
                throw std::runtime_error("gate_counts: macro gate present; lower first");
        }
    return g;
}

// --- evaluation (qubit 1 = most significant state bit) ---

namespace detail {

inline int qubit_mask(int n, int q) { return 1 << (n - q); }

inline void apply_gate(const Gate& g, int n, CMat& m) {
    const int d = m.dim();
    switch (g.kind) {
        case Gate::Kind::CNOT: {
            const int cm = qubit_mask(n, g.control), tm = qubit_mask(n, g.target);
            for (int s = 0; s < d; ++s) {
                if (!(s & cm) || (s & tm)) continue;
                const int t = s | tm;
                for (int col = 0; col < d; ++col) std::swap(m(s, col), m(t, col));
            }
            break;
        }
        case Gate::Kind::RZ: {
            const int qm = qubit_mask(n, g.qubit);
            const cplx p0 = std::exp(cplx(0, g.angle)), p1 = std::conj(p0);
            for (int s = 0; s < d; ++s) {
                const cplx p = (s & qm) ? p1 : p0;
                for (int col = 0; col < d; ++col) m(s, col) *= p;
            }
            break;
        }
        case Gate::Kind::RY: {
            const int qm = qubit_mask(n, g.qubit);
            const double c = std::cos(g.angle), sn = std::sin(g.angle);
            for (int s = 0; s < d; ++s) {
                if (s & qm) continue;
                const int t = s | qm;
                for (int col = 0; col < d; ++col) {
                    const cplx r0 = m(s, col), r1 = m(t, col);
                    m(s, col) = c * r0 + sn * r1;
                    m(t, col) = -sn * r0 + c * r1;
                }
            }
            break;
        }
        case Gate::Kind::MRot: {
            const int k = (int)g.controls.size();
            const int qm = qubit_mask(n, g.target);
            for (int s = 0; s < d; ++s) {
                if (s & qm) continue;
                int idx = 0;
                for (int j = 0; j < k; ++j) {
                    bool bit = (s & qubit_mask(n, g.controls[j])) != 0;
                    if (g.open_controls[j]) bit = !bit;
                    idx = (idx << 1) | (bit ? 1 : 0);
                }
                const double a = g.angles[idx];
                const int t = s | qm;
                if (g.axis == 'Z') {
                    const cplx p = std::exp(cplx(0, a));
                    for (int col = 0; col < d; ++col) {
                        m(s, col) *= p;
                        m(t, col) *= std::conj(p);
                    }
                } else {
                    const double c = std::cos(a), sn = std::sin(a);
                    for (int col = 0; col < d; ++col) {
                        const cplx r0 = m(s, col), r1 = m(t, col);
                        m(s, col) = c * r0 + sn * r1;
                        m(t, col) = -sn * r0 + c * r1;
                    }
                }
            }
            break;
        }
    }
}

}  // namespace detail

inline CMat evaluate(const Circuit& c) {
    CMat m = CMat::identity(1 << c.n);
    for (const auto& g : c.gates) detail::apply_gate(g, c.n, m);
    return m;
}

// --- multiplexed-rotation lowering ---
//
// The skeleton alternates rotation slots and CNOTs whose control follows the
// binary ruler sequence; the block angles are recovered from the slot parity
// masks by a scaled Walsh transform (exactly 2^{#controls} CNOTs/rotations).

namespace detail {

// binary ruler: position of the lowest set bit of i, with the final entry
// promoted to the top control so the CNOT parity closes to zero
inline int ruler_bit(int i, int k) { return (i == (1 << k)) ? k - 1 : __builtin_ctz(i); }

inline std::vector<double> solve_skeleton_angles(const std::vector<int>& slot_masks,
                                                 const std::vector<double>& psi) {
    const size_t cnt = slot_masks.size();
    std::vector<double> a(cnt, 0.0);
    for (size_t i = 0; i < cnt; ++i) {
        double s = 0.0;
        for (size_t v = 0; v < cnt; ++v)
            s += (__builtin_popcount((unsigned)(v & (size_t)slot_masks[i])) & 1) ? -psi[v]
                                                                                 : psi[v];
        a[i] = s / (double)cnt;
    }
    return a;
}

}  // namespace detail

// Lower a multiplexed rotation to CNOTs + rotations.  `mirrored` flips the
// skeleton (CNOT before rotation) so that adjacent factors can cancel a CNOT
// pair at their junction; both orientations realize the same unitary.
inline std::vector<Gate> lower_multiplexed(const Gate& g, bool mirrored = false) {
    if (g.kind != Gate::Kind::MRot) throw std::invalid_argument("lower_multiplexed: not a macro");
    if (g.axis != 'Z' && g.axis != 'Y')
        throw std::invalid_argument("lower_multiplexed: axis must be Z or Y");

    // normalize open controls: inverting a control permutes the angle table
    std::vector<double> psi = g.angles;
    const int k = (int)g.controls.size();
    for (int j = 0; j < k; ++j) {
        if (!g.open_controls[j]) continue;
        const int bit = 1 << (k - 1 - j);
        for (int v = 0; v < (1 << k); ++v)
            if (!(v & bit)) std::swap(psi[v], psi[v | bit]);
    }

    auto rot = [&](double a) {
        return g.axis == 'Z' ? Gate::rz(g.target, a, g.segment) : Gate::ry(g.target, a, g.segment);
    };
    if (k == 0) return {rot(psi[0])};

    // skeleton CNOT controls; mask = parity pattern seen by each rotation slot
    std::vector<Gate> out;
    std::vector<int> slot_masks;
    const int cnt = 1 << k;
    if (!mirrored) {
        int mask = 0;
        for (int i = 1; i <= cnt; ++i) {
            slot_masks.push_back(mask);
            out.push_back(rot(0.0));
            const int b = detail::ruler_bit(i, k);
            out.push_back(Gate::cnot(g.controls[k - 1 - b], g.target, g.segment));
            mask ^= 1 << b;
        }
    } else {
        int mask = 0;
        for (int i = cnt; i >= 1; --i) {
            const int b = detail::ruler_bit(i, k);
            out.push_back(Gate::cnot(g.controls[k - 1 - b], g.target, g.segment));
            mask ^= 1 << b;
            slot_masks.push_back(mask);
            out.push_back(rot(0.0));
        }
    }
    const std::vector<double> a = detail::solve_skeleton_angles(slot_masks, psi);
    size_t slot = 0;
    for (auto& gate : out)
        if (gate.kind != Gate::Kind::CNOT) gate.angle = a[slot++];
    return out;
}

inline Circuit lower(const Circuit& c) {
    Circuit out;
    out.n = c.n;
    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::MRot) {
            const auto sub = lower_multiplexed(g);
            out.gates.insert(out.gates.end(), sub.begin(), sub.end());
        } else {
            out.gates.push_back(g);
        }
    }
    return out;
}

// --- diagonal staircases: exp(i*theta*Z-string) per nontrivial string ---

namespace detail {

inline std::vector<int> string_qubits(int n, int z_mask) {
    std::vector<int> qs;
    for (int q = 1; q <= n; ++q)
        if (z_mask & qubit_mask(n, q)) qs.push_back(q);
    return qs;
}

inline void emit_staircase(std::vector<Gate>& out, int n, int z_mask, double theta,
                           const std::string& seg) {
    const std::vector<int> qs = string_qubits(n, z_mask);
    const int deep = qs.back();
    for (size_t i = 0; i + 1 < qs.size(); ++i) out.push_back(Gate::cnot(qs[i], deep, seg));
    out.push_back(Gate::rz(deep, theta, seg));
    for (size_t i = qs.size() - 1; i-- > 0;) out.push_back(Gate::cnot(qs[i], deep, seg));
}

}  // namespace detail

// zeta factor: one staircase per Z-string, ascending slot order.
inline Circuit synthesize_diagonal(int n, const std::vector<double>& zeta_angles,
                                   const std::string& seg = "zeta") {
    if ((int)zeta_angles.size() != (1 << n) - 1)
        throw std::invalid_argument("synthesize_diagonal: need 2^n - 1 angles");
    Circuit c;
    c.n = n;
    for (int l = 2; l <= (1 << n); ++l)
        detail::emit_staircase(c.gates, n, detail::chi_to_state_mask(l - 1, n),
                               zeta_angles[l - 2], seg);
    return c;
}

// --- transposition-product CNOT networks ---

inline std::vector<int> pit_lambda(int n, int x) {
    // qubit i is targeted iff bit i of the binary string x_1..x_{n-1} is set
    std::vector<int> lam;
    for (int i = 1; i <= n - 1; ++i)
        if (x & (1 << (n - 1 - i))) lam.push_back(i);
    return lam;
}

inline Circuit synthesize_pit(const TranspositionSet& ts) {
    Circuit c;
    c.n = ts.n;
    const std::string seg = "piT." + std::string(ts.parity == Parity::Even ? "e" : "o") + "." +
                            std::to_string(ts.x);
    const std::vector<int> lam = pit_lambda(ts.n, ts.x);
    if (ts.parity == Parity::Even) {
        for (int i : lam) c.gates.push_back(Gate::cnot(ts.n, i, seg));
    } else {
        const int m1 = lam.front();
        c.gates.push_back(Gate::cnot(m1, ts.n, seg));
        for (int i : lam) c.gates.push_back(Gate::cnot(ts.n, i, seg));
        c.gates.push_back(Gate::cnot(m1, ts.n, seg));
    }
    return c;
}

// --- block-diagonal synthesis ---

inline std::vector<Gate> lift_multiplexed(const Gate& g, const std::vector<double>& psi,
                                          bool mirrored);

namespace detail {

struct BlockZyz {
    double alpha = 0, gamma = 0, beta = 0;  // SU(2) Euler angles
    double delta = 0;                       // U(2) phase: B = e^{i delta} * SU(2)
};

inline BlockZyz decompose_block(const CMat& b2) {
    BlockZyz r;
    const cplx det = b2(0, 0) * b2(1, 1) - b2(0, 1) * b2(1, 0);
    r.delta = 0.5 * std::arg(det);
    // wrap into (-pi/2, pi/2] so per-block phases stay small and summable
    if (r.delta <= -kPi / 2) r.delta += kPi;
    if (r.delta > kPi / 2) r.delta -= kPi;
    const cplx ph = std::exp(cplx(0, -r.delta));
    const cplx a = ph * b2(0, 0), b = ph * b2(0, 1);
    r.gamma = std::atan2(std::abs(b), std::abs(a));
    if (std::abs(a) < 1e-14) {
        r.alpha = 0.5 * std::arg(b);
        r.beta = -r.alpha;
    } else if (std::abs(b) < 1e-14) {
        r.alpha = std::arg(a);
        r.beta = 0.0;
    } else {
        r.alpha = 0.5 * (std::arg(a) + std::arg(b));
        r.beta = 0.5 * (std::arg(a) - std::arg(b));
    }
    return r;
}

// Remove identical adjacent CNOT pairs.  A single stack pass reaches the
// fixpoint of pair cancellation; rotations and differing CNOTs are barriers.
inline void cancel_adjacent_cnots(std::vector<Gate>& gs) {
    std::vector<Gate> out;
    out.reserve(gs.size());
    for (auto& g : gs) {
        if (!out.empty() && g.kind == Gate::Kind::CNOT && out.back().kind == Gate::Kind::CNOT &&
            out.back().control == g.control && out.back().target == g.target)
            out.pop_back();
        else
            out.push_back(std::move(g));
    }
    gs = std::move(out);
}

// Three multiplexed rotations Z(beta) -> Y(gamma) -> Z(alpha): 3*2^{n-1}
// CNOTs, 2^n RZ, 2^{n-1} RY before peephole cancellation.  The default
// orientation pairs a normal Z with a mirrored Y so one CNOT pair cancels at
// their junction; `mirrored_outer` flips every orientation so the outer Z
// multiplexers start/end with CNOT(1, n) and cancel against surrounding
// networks instead.  With `lifted_skeleton` the multiplexers come from the
// one-qubit-fewer template via the lift rule; gate multiset and unitary are
// unchanged.
inline void emit_su_block_core(std::vector<Gate>& out, int n,
                               const std::vector<BlockZyz>& blocks, const std::string& seg,
                               bool lifted_skeleton = false, bool mirrored_outer = false) {
    std::vector<double> al, ga, be;
    for (const auto& b : blocks) {
        al.push_back(b.alpha);
        ga.push_back(b.gamma);
        be.push_back(b.beta);
    }
    std::vector<Gate> zb, yg, za;
    if (!lifted_skeleton) {
        std::vector<int> controls;
        for (int q = 1; q <= n - 1; ++q) controls.push_back(q);
        zb = lower_multiplexed(Gate::mrot('Z', controls, n, be, seg), mirrored_outer);
        yg = lower_multiplexed(Gate::mrot('Y', controls, n, ga, seg), !mirrored_outer);
        za = lower_multiplexed(Gate::mrot('Z', controls, n, al, seg), mirrored_outer);
    } else {
        std::vector<int> sub_controls;
        for (int q = 1; q <= n - 2; ++q) sub_controls.push_back(q);
        const std::vector<double> zero((size_t)1 << (n - 2), 0.0);
        const Gate gz = Gate::mrot('Z', sub_controls, n - 1, zero, seg);
        const Gate gy = Gate::mrot('Y', sub_controls, n - 1, zero, seg);
        zb = lift_multiplexed(gz, be, mirrored_outer);
        yg = lift_multiplexed(gy, ga, !mirrored_outer);
        za = lift_multiplexed(gz, al, mirrored_outer);
    }
    out.insert(out.end(), zb.begin(), zb.end());
    out.insert(out.end(), yg.begin(), yg.end());
    out.insert(out.end(), za.begin(), za.end());
}

inline std::vector<CMat> extract_adjacent_blocks(const CMat& m, double tol = 1e-10) {
    const int d = m.dim();
    std::vector<CMat> blocks;
    for (int b = 0; b < d / 2; ++b) {
        CMat blk(2);
        blk(0, 0) = m(2 * b, 2 * b);
        blk(0, 1) = m(2 * b, 2 * b + 1);
        blk(1, 0) = m(2 * b + 1, 2 * b);
        blk(1, 1) = m(2 * b + 1, 2 * b + 1);
        blocks.push_back(blk);
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (r / 2 != c / 2 && std::abs(m(r, c)) > tol)
                throw std::runtime_error("matrix is not block-diagonal on adjacent pairs");
    return blocks;
}

// Diagonal phases per adjacent block, as a cascade of multiplexed Z rotations
// on qubits 1..n-1 (2^{n-1}-2 CNOTs); requires sum(delta) = 0.
inline void emit_block_phase_diagonal(std::vector<Gate>& out, int n, std::vector<double> delta,
                                      const std::string& seg) {
    int k = n - 1;  // delta has 2^k entries indexed by the top-qubit pattern
    while (k >= 1) {
        std::vector<double> psi((size_t)1 << (k - 1)), rest((size_t)1 << (k - 1));
        for (int b = 0; b < (1 << (k - 1)); ++b) {
            psi[b] = 0.5 * (delta[2 * b] - delta[2 * b + 1]);
            rest[b] = 0.5 * (delta[2 * b] + delta[2 * b + 1]);
        }
        std::vector<int> controls;
        for (int q = 1; q <= k - 1; ++q) controls.push_back(q);
        const auto sub = lower_multiplexed(Gate::mrot('Z', controls, k, psi, seg));
        out.insert(out.end(), sub.begin(), sub.end());
        delta = std::move(rest);
        --k;
    }
}

}  // namespace detail

// Circuit for an arbitrary block-diagonal special unitary with 2x2 blocks on
// the adjacent coordinate pairs; CNOT count <= 5*2^{n-1} - 6 for n >= 2.
inline Circuit synthesize_block_diagonal(int n, const std::vector<CMat>& blocks,
                                         const std::string& seg = "blockdiag") {
    if ((int)blocks.size() != 1 << (n - 1))
        throw std::invalid_argument("synthesize_block_diagonal: need 2^{n-1} blocks");
    std::vector<detail::BlockZyz> z;
    std::vector<double> delta;
    double dsum = 0.0;
    for (const auto& b : blocks) {
        z.push_back(detail::decompose_block(b));
        dsum += z.back().delta;
        delta.push_back(z.back().delta);
    }
    const long m = std::lround(dsum / kPi);
    if (std::abs(dsum - kPi * (double)m) > 1e-8)
        throw std::invalid_argument("synthesize_block_diagonal: blocks are not special unitary");
    // shift the phase excess pi*m into block 1's SU part as a sign
    delta[0] -= kPi * (double)m;
    if (m % 2 != 0) {
        z[0].alpha += kPi;  // R_Z(alpha+pi) R_Y R_Z = -R_Z(alpha) R_Y R_Z
    }
    const double mean = (dsum - kPi * (double)m) / (double)delta.size();
    for (auto& v : delta) v -= mean;  // exact-zero sum; drift is a global phase < 1e-12

    Circuit c;
    c.n = n;
    detail::emit_su_block_core(c.gates, n, z, seg);
    if (n >= 2) detail::emit_block_phase_diagonal(c.gates, n, delta, seg);
    else if (std::abs(delta[0]) > 1e-12)
        throw std::invalid_argument("synthesize_block_diagonal: n=1 block must be special");
    detail::cancel_adjacent_cnots(c.gates);
    return c;
}

// --- full layer synthesis ---
//
// Every factor of a layer is block-diagonal with U(2) blocks on adjacent
// pairs after conjugation by its own transposition network (the adjacent-pair
// first factor of psi needs no network).  Each factor becomes a sandwich
// [network][three multiplexed rotations][network].  The per-block U(1) phases
// are pushed leftward toward zeta: processing factors in reverse matrix
// order, each factor is first conjugated by the diagonal accumulated so far
// (which preserves its block pattern and per-block determinant), and its own
// phase diagonal joins the accumulator.  The final diagonal is absorbed into
// the zeta angles through its Walsh spectrum over all Z-strings; the constant
// term is a vanishing global phase because each factor's phases are centered.

namespace detail {

inline CMat first_factor_dense(const SrbbBasis& basis, const std::vector<double>& pa) {
    CMat m = CMat::identity(basis.d);
    const int half = 1 << (basis.n - 1);
    for (int j = half; j >= 1; --j) {
        apply_exp_element_left(basis.at(4 * j * j - 2 * j), pa[2 * j - 1], m);
        apply_exp_element_left(basis.at((2 * j - 1) * (2 * j - 1)), pa[2 * j - 2], m);
    }
    return m;
}

}  // namespace detail

inline Circuit synthesize_layer(const SrbbBasis& basis, const std::vector<double>& theta,
                                bool lifted_skeleton = false) {
    const int n = basis.n;
    if (n < 1) throw std::invalid_argument("synthesize_layer: basis is not qubit-sized");
    if (lifted_skeleton && n < 2)
        throw std::invalid_argument("synthesize_layer: lifted skeleton needs n >= 2");
    const int zc = zeta_angle_count(n), pc = psi_angle_count(n), fc = phi_angle_count(n);
    if ((int)theta.size() != zc + pc + fc)
        throw std::invalid_argument("synthesize_layer: angle count mismatch");
    const std::vector<double> za(theta.begin(), theta.begin() + zc);
    const std::vector<double> pa(theta.begin() + zc, theta.begin() + zc + pc);
    const std::vector<double> fa(theta.begin() + zc + pc, theta.end());
    const int half = 1 << (n - 1);
    const int d = 1 << n;

    // factors in matrix order: psi.first, psi.x ascending, phi.x ascending
    struct Cluster {
        CMat dense;
        std::string seg;
        std::vector<TranspositionSet> ts;  // empty for the first factor
        bool mirrored_outer = false;
    };
    std::vector<Cluster> clusters;
    clusters.push_back({detail::first_factor_dense(basis, pa), "psi.first", {}, false});
    size_t off = 1 << n;
    for (int x = 1; x <= half - 1; ++x) {
        TranspositionSet ts = build_transposition_sets(n, Parity::Even, x);
        const size_t cnt = 4 * ts.pairs.size();
        clusters.push_back({build_m_factor(basis, ts, {pa.begin() + off, pa.begin() + off + cnt}),
                            "psi." + std::to_string(x),
                            {std::move(ts)},
                            false});
        off += cnt;
    }
    off = 0;
    for (int x = 1; x <= half - 1; ++x) {
        TranspositionSet ts = build_transposition_sets(n, Parity::Odd, x);
        const size_t cnt = 4 * ts.pairs.size();
        // the odd network wraps CNOTs around qubit n controlled on its lowest
        // targeted qubit; when that is qubit 1 the mirrored core orientation
        // lets the outer multiplexer CNOTs cancel against the wrap
        const bool mirror = pit_lambda(n, x).front() == 1;
        clusters.push_back({build_m_factor(basis, ts, {fa.begin() + off, fa.begin() + off + cnt}),
                            "phi." + std::to_string(x),
                            {std::move(ts)},
                            mirror});
        off += cnt;
    }

    // process and emit in reverse matrix order (= gate order), pushing each
    // factor's phase diagonal into the accumulator it is conjugated by
    std::vector<double> phase(d, 0.0);  // arg of the accumulated diagonal
    Circuit c;
    c.n = n;
    for (size_t i = clusters.size(); i-- > 0;) {
        const Cluster& cl = clusters[i];
        CMat m = cl.dense;
        for (int r = 0; r < d; ++r)
            for (int col = 0; col < d; ++col)
                if (phase[r] != phase[col]) m(r, col) *= std::exp(cplx(0, phase[col] - phase[r]));
        Permutation p(d);
        if (!cl.ts.empty()) {
            p = pi_t(cl.ts.front());
            detail::apply_permutation_left(p, m);
            detail::apply_permutation_right(p, m);
        }
        const auto blocks = detail::extract_adjacent_blocks(m);
        std::vector<detail::BlockZyz> zyz;
        double dsum = 0.0;
        for (const auto& b : blocks) {
            zyz.push_back(detail::decompose_block(b));
            dsum += zyz.back().delta;
        }
        // the factor is special unitary, so the phases sum to a multiple of
        // pi; fold the excess into block 1 as a sign on its SU part
        const long mshift = std::lround(dsum / kPi);
        zyz[0].delta -= kPi * (double)mshift;
        if (mshift % 2 != 0) zyz[0].alpha += kPi;
        for (int s = 0; s < d; ++s) phase[s] += zyz[(p(s + 1) - 1) / 2].delta;

        if (!cl.ts.empty()) c.append(synthesize_pit(cl.ts.front()));
        detail::emit_su_block_core(c.gates, n, zyz, cl.seg, lifted_skeleton, cl.mirrored_outer);
        if (!cl.ts.empty()) c.append(synthesize_pit(cl.ts.front()));
    }

    // absorb the accumulated diagonal into zeta via its Walsh coefficients
    std::vector<double> zeta_adjusted = za;
    std::map<int, int> mask_to_slot;  // state mask -> zeta angle position
    for (int l = 2; l <= d; ++l) mask_to_slot[detail::chi_to_state_mask(l - 1, n)] = l - 2;
    for (int mask = 1; mask < d; ++mask) {
        double coeff = 0.0;
        for (int s = 0; s < d; ++s)
            coeff += (__builtin_popcount((unsigned)(s & mask)) & 1) ? -phase[s] : phase[s];
        zeta_adjusted[mask_to_slot.at(mask)] += coeff / (double)d;
    }
    c.append(synthesize_diagonal(n, zeta_adjusted));
    detail::cancel_adjacent_cnots(c.gates);
    return c;
}

inline Circuit synthesize(const SrbbBasis& basis, const ThetaSchedule& s) {
    Circuit c;
    c.n = s.n;
    // matrix = layer_1 * ... * layer_L, so layer_L's gates act first
    for (size_t l = s.layers.size(); l-- > 0;) {
        Circuit layer = synthesize_layer(basis, s.layers[l]);
        for (auto& g : layer.gates)
            g.segment = "L" + std::to_string(l + 1) + "." + g.segment;
        c.append(layer);
    }
    return c;
}

// --- n -> n+1 lifts ---

namespace detail {

inline Gate pad_gate(const Gate& g) {
    Gate out = g;
    if (out.kind == Gate::Kind::CNOT) {
        ++out.control;
        ++out.target;
    } else if (out.kind == Gate::Kind::RZ || out.kind == Gate::Kind::RY) {
        ++out.qubit;
    } else {
        for (auto& c : out.controls) ++c;
        ++out.target;
    }
    return out;
}

}  // namespace detail

// Transposition-network lift: pad with a fresh top qubit; when the lifted
// index y addresses the new qubit, add the extra CNOT(s) on it.
inline Circuit lift_pit(const Circuit& pit, Parity parity, int y) {
    Circuit out;
    out.n = pit.n + 1;
    const int n1 = out.n;
    const int top_bit = 1 << (pit.n - 1);
    const std::string seg = "piT." + std::string(parity == Parity::Even ? "e" : "o") + "." +
                            std::to_string(y);
    std::vector<Gate> padded;
    for (const auto& g : pit.gates) {
        Gate p = detail::pad_gate(g);
        p.segment = seg;
        padded.push_back(p);
    }
    if (parity == Parity::Even) {
        if (y & top_bit) out.gates.push_back(Gate::cnot(n1, 1, seg));
        out.gates.insert(out.gates.end(), padded.begin(), padded.end());
    } else {
        if (y & top_bit) {
            // the inner network addresses the new minimum target: rebuild the
            // wrap from the even-parity padded body
            std::vector<Gate> body;
            for (const auto& g : padded)  // strip the old wrap CNOTs (control < n1)
                if (g.control == n1) body.push_back(g);
            out.gates.push_back(Gate::cnot(1, n1, seg));
            out.gates.push_back(Gate::cnot(n1, 1, seg));
            out.gates.insert(out.gates.end(), body.begin(), body.end());
            out.gates.push_back(Gate::cnot(1, n1, seg));
        } else {
            out.gates = padded;
        }
    }
    return out;
}

// Multiplexed-rotation lift: two padded copies of the n-qubit skeleton around
// CNOTs on the fresh top control, with the redundant junction pair removed;
// angles are re-solved against the 2^n-entry target so the unitary is exact.
inline std::vector<Gate> lift_multiplexed(const Gate& g, const std::vector<double>& psi,
                                          bool mirrored = false) {
    if (g.kind != Gate::Kind::MRot) throw std::invalid_argument("lift_multiplexed: not a macro");
    const int k = (int)g.controls.size();
    if ((int)psi.size() != 1 << (k + 1))
        throw std::invalid_argument("lift_multiplexed: need 2^{k+1} target angles");

    Gate padded = detail::pad_gate(g);
    const int n1 = padded.target;  // lifted target qubit
    std::vector<Gate> first = lower_multiplexed(padded, false);
    std::vector<Gate> second = lower_multiplexed(padded, true);
    std::vector<Gate> out;
    if (k >= 1) {
        first.pop_back();         // trailing CNOT(2, t) of the first copy
        second.erase(second.begin());  // leading CNOT(2, t) of the mirror: they
                                       // commute with CNOT(1, t) and cancel
    }
    out.insert(out.end(), first.begin(), first.end());
    out.push_back(Gate::cnot(1, n1, g.segment));
    out.insert(out.end(), second.begin(), second.end());
    out.push_back(Gate::cnot(1, n1, g.segment));
    if (mirrored) std::reverse(out.begin(), out.end());

    // re-solve rotation angles from the actual slot parity masks
    std::vector<int> slot_masks;
    std::vector<size_t> slot_pos;
    int mask = 0;
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i].kind == Gate::Kind::CNOT) {
            const int ctl = out[i].control;       // lifted controls are 1..k+1
            mask ^= 1 << (k + 1 - ctl);           // control 1 = most significant
        } else {
            slot_masks.push_back(mask);
            slot_pos.push_back(i);
        }
    }
    const std::vector<double> a = detail::solve_skeleton_angles(slot_masks, psi);
    for (size_t i = 0; i < slot_pos.size(); ++i) out[slot_pos[i]].angle = a[i];
    return out;
}

// Full-circuit lift: build the (n+1)-qubit layer circuits from the n-qubit
// template's skeletons, carrying the angles of the (n+1)-qubit schedule.
// Per segment the gate multiset equals direct synthesis at n+1.
inline Circuit lift_circuit(const Circuit& from, const SrbbBasis& lifted_basis,
                            const ThetaSchedule& s) {
    if (lifted_basis.n != from.n + 1)
        throw std::invalid_argument("lift_circuit: basis must be one qubit larger");
    if (s.n != lifted_basis.n) throw std::invalid_argument("lift_circuit: schedule size mismatch");
    bool has_segments = false;
    for (const auto& g : from.gates)
        if (!g.segment.empty()) { has_segments = true; break; }
    if (!from.gates.empty() && !has_segments)
        throw std::invalid_argument("lift_circuit: input circuit lacks segment metadata");
    Circuit c;
    c.n = s.n;
    for (size_t l = s.layers.size(); l-- > 0;) {
        Circuit layer = synthesize_layer(lifted_basis, s.layers[l], true);
        for (auto& g : layer.gates)
            g.segment = "L" + std::to_string(l + 1) + "." + g.segment;
        c.append(layer);
    }
    return c;
}

// --- quantum-assembly text (OpenQASM 2.0 subset: cx, rz, ry) ---

inline void write_qasm(std::ostream& os, const Circuit& c) {
    os << "OPENQASM 2.0;\n";
    os << "include \"qelib1.inc\";\n";
    os << "// Rotation convention: this file's rz(lambda) realizes\n";
    os << "// RZ(theta) = diag(e^{i theta}, e^{-i theta}) with lambda = -2*theta,\n";
    os << "// and ry(lambda) realizes RY(theta) = [[cos,sin],[-sin,cos]](theta)\n";
    os << "// with lambda = -2*theta; qubit q[0] is the most significant.\n";
    os << "qreg q[" << c.n << "];\n";
    char buf[64];
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case Gate::Kind::CNOT:
                os << "cx q[" << g.control - 1 << "],q[" << g.target - 1 << "];\n";
                break;
            case Gate::Kind::RZ:
            case Gate::Kind::RY:
                std::snprintf(buf, sizeof buf, "%.17g", -2.0 * g.angle);
                os << (g.kind == Gate::Kind::RZ ? "rz(" : "ry(") << buf << ") q["
                   << g.qubit - 1 << "];\n";
                break;
            case Gate::Kind::MRot:
                throw std::runtime_error("write_qasm: macro gate present; lower first");
        }
    }
}

inline Circuit read_qasm(std::istream& is) {
    Circuit c;
    std::string line;
    bool have_qreg = false;
    auto fail = [](const std::string& l) -> void {
        throw std::runtime_error("qasm: cannot parse line '" + l + "'");
    };
    while (std::getline(is, line)) {
        // strip comments and whitespace
        const size_t cpos = line.find("//");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        std::string t;
        for (char ch : line)
            if (!std::isspace((unsigned char)ch)) t += ch;
        if (t.empty()) continue;
        if (t == "OPENQASM2.0;" || t == "include\"qelib1.inc\";") continue;
        if (t.rfind("qregq[", 0) == 0) {
            const size_t e = t.find(']');
            if (e == std::string::npos || t.substr(e) != "];") fail(line);
            c.n = std::stoi(t.substr(6, e - 6));
            have_qreg = true;
            continue;
        }
        if (!have_qreg) fail(line);
        auto qubit_at = [&](size_t pos, size_t& end) {
            if (t.compare(pos, 2, "q[") != 0) fail(line);
            const size_t e = t.find(']', pos);
            if (e == std::string::npos) fail(line);
            end = e + 1;
            const int q = std::stoi(t.substr(pos + 2, e - pos - 2)) + 1;
            if (q < 1 || q > c.n) fail(line);
            return q;
        };
        if (t.rfind("cx", 0) == 0) {
            size_t p = 2, e = 0;
            const int ctl = qubit_at(p, e);
            if (t[e] != ',') fail(line);
            const int tgt = qubit_at(e + 1, e);
            if (t.substr(e) != ";") fail(line);
            c.gates.push_back(Gate::cnot(ctl, tgt));
        } else if (t.rfind("rz(", 0) == 0 || t.rfind("ry(", 0) == 0) {
            const bool is_z = t[1] == 'z';
            const size_t close = t.find(')');
            if (close == std::string::npos) fail(line);
            const std::string num = t.substr(3, close - 3);
            char* end = nullptr;
            const double lambda = std::strtod(num.c_str(), &end);
            if (end == num.c_str() || *end != '\0') fail(line);
            size_t e = 0;
            const int q = qubit_at(close + 1, e);
            if (t.substr(e) != ";") fail(line);
            const double theta = -0.5 * lambda;
            c.gates.push_back(is_z ? Gate::rz(q, theta) : Gate::ry(q, theta));
        } else {
            fail(line);
        }
    }
    if (!have_qreg) throw std::runtime_error("qasm: missing qreg declaration");
    return c;
}

inline void write_qasm_file(const std::string& path, const Circuit& c) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write qasm file: " + path);
    write_qasm(f, c);
}

inline Circuit read_qasm_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open qasm file: " + path);
    return read_qasm(f);
}

// Frobenius distance minimized over a global phase (both inputs unitary):
// align b to a by the optimal phase arg(tr(b^dagger a)), then subtract.
inline double phase_aligned_distance(const CMat& a, const CMat& b) {
    const cplx t = (b.adjoint() * a).trace();
    const cplx phase = (std::abs(t) < 1e-300) ? cplx(1, 0) : std::exp(cplx(0, std::arg(t)));
    return frobenius_distance(a, b * phase);
}

}  // namespace srbb
