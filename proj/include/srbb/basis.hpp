#pragma once

// Recursive block basis (RBB) of Hermitian unitary matrices for any d >= 2,
// and its qubit specialization (SRBB, d = 2^n) where the diagonal slots hold
// I/Z Kronecker strings.  Elements are stored structurally (sign vectors and
// coupled coordinate pairs) and densified on demand.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srbb/complex_matrix.hpp"

namespace srbb {

enum class Pauli { X, Y };

struct SrbbElement {
    enum class Kind { Diagonal, TwoLevel, Identity };

    int index = 0;  // 1-based position in the ordered basis
    Kind kind = Kind::Identity;

    // Diagonal: length-d vector over {+1,-1}.
    // TwoLevel: length-d vector over {+1,-1,0} with zeros exactly at alpha, beta.
    std::vector<int> signs;

    int alpha = 0, beta = 0;  // 1-based coupled pair, TwoLevel only (alpha < beta)
    Pauli pauli = Pauli::X;   // TwoLevel only

    // SRBB diagonals: mask over 0-based state bits; bit set means a sign flip
    // when that state bit is 1.  -1 for RBB diagonals that are not Z-strings.
    int z_mask = -1;

    int dim() const { return static_cast<int>(signs.size()); }

    CMat dense() const {
        const int d = dim();
        CMat m(d);
        if (kind == Kind::Identity) return CMat::identity(d);
        for (int p = 0; p < d; ++p) m(p, p) = static_cast<double>(signs[p]);
        if (kind == Kind::TwoLevel) {
            if (pauli == Pauli::X) {
                m(alpha - 1, beta - 1) = 1.0;
                m(beta - 1, alpha - 1) = 1.0;
            } else {
                m(alpha - 1, beta - 1) = cplx(0.0, -1.0);
                m(beta - 1, alpha - 1) = cplx(0.0, 1.0);
            }
        }
        return m;
    }

    int trace() const {
        if (kind == Kind::Identity) return dim();
        int t = 0;
        for (int s : signs) t += s;
        return t;
    }
};

// Index functions tying non-diagonal basis indices to coordinate pairs:
// h couples (p, q) with an X-type block, f with a Y-type block, 1 <= p < q.
inline int h_index(int q, int k) {
    if (q < 2) throw std::invalid_argument("h_index: q must be >= 2");
    int r = k % (q - 1);
    if (r < 0) r += q - 1;
    return (q - 1) * (q - 1) + r;
}

inline int f_index(int q, int k) {
    return h_index(q, k) + (q - 1);
}

using PairMap = std::map<std::pair<int, int>, std::pair<int, int>>;

struct SrbbBasis {
    int d = 0;
    int n = -1;                          // qubit count when d = 2^n, else -1
    std::vector<SrbbElement> elements;   // elements[j-1] has index j
    std::vector<int> diagonal_indices;   // J = {l^2-1 : 2 <= l <= d} + {d^2}
    PairMap pair_map;                    // (alpha,beta) -> (jX, jY)

    const SrbbElement& at(int j) const { return elements[j - 1]; }
};

// chi of an I/Z string: bit i-1 set iff factor i (leftmost = 1) is Z.
inline int chi_index(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("chi_index: empty string");
    int v = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 'Z') v |= 1 << i;
        else if (s[i] != 'I') throw std::invalid_argument("chi_index: symbols must be I or Z");
    }
    return v;
}

namespace detail {

// chi counts Kronecker factors from the left; the leftmost factor is the
// most significant state bit, so the state-bit mask is chi bit-reversed.
inline int chi_to_state_mask(int chi, int n) {
    int mask = 0;
    for (int i = 0; i < n; ++i)
        if (chi & (1 << i)) mask |= 1 << (n - 1 - i);
    return mask;
}

inline std::vector<int> z_string_signs(int state_mask, int dim) {
    std::vector<int> s(dim);
    for (int st = 0; st < dim; ++st)
        s[st] = (__builtin_popcount(st & state_mask) & 1) ? -1 : 1;
    return s;
}

}  // namespace detail

inline SrbbBasis build_rbb(int d) {
    if (d < 2) throw std::invalid_argument("build_rbb: d must be >= 2");

    std::vector<SrbbElement> el(4);
    el[0] = {1, SrbbElement::Kind::TwoLevel, {0, 0}, 1, 2, Pauli::X, -1};
    el[1] = {2, SrbbElement::Kind::TwoLevel, {0, 0}, 1, 2, Pauli::Y, -1};
    el[2] = {3, SrbbElement::Kind::Diagonal, {1, -1}, 0, 0, Pauli::X, -1};
    el[3] = {4, SrbbElement::Kind::Identity, {1, 1}, 0, 0, Pauli::X, -1};

    for (int m = 3; m <= d; ++m) {
        std::vector<SrbbElement> nx(static_cast<size_t>(m) * m);
        const int corner = (m % 2 == 0) ? -1 : 1;  // (-1)^{m-1}

        // Embed levels 1..(m-1)^2-1 with the alternating-sign corner.
        for (int j = 1; j <= (m - 1) * (m - 1) - 1; ++j) {
            SrbbElement e = el[j - 1];
            e.signs.push_back(corner);
            nx[j - 1] = e;
        }

        // Two-level blocks coupling (alpha, m).  The slot k = 1 takes the
        // unconjugated block on the trailing pair (m-1, m); slots k >= 2 take
        // the pair (k-1, m), so the index (m-1)^2 + (p mod (m-1)) couples
        // (p, m) for every p < m, matching h_index/f_index.
        for (int k = 1; k <= m - 1; ++k) {
            const int a = (k == 1) ? m - 1 : k - 1;
            std::vector<int> diag(m, 0);
            for (int p = 1; p <= m; ++p) {
                if (p == a || p == m) continue;
                if (p == m - 1) diag[p - 1] = (a % 2 == 1) ? 1 : -1;  // (-1)^{a-1}
                else diag[p - 1] = (p % 2 == 1) ? 1 : -1;
            }
            const int jx = (m - 1) * (m - 1) + (k - 1);
            const int jy = jx + (m - 1);
            nx[jx - 1] = {jx, SrbbElement::Kind::TwoLevel, diag, a, m, Pauli::X, -1};
            nx[jy - 1] = {jy, SrbbElement::Kind::TwoLevel, diag, a, m, Pauli::Y, -1};
        }

        // Fresh diagonal at m^2-1 and identity at m^2.
        std::vector<int> diag(m);
        if (m % 2 == 0) {
            // Trailing block (-1, +1): the (+1, -1) variant coincides with an
            // embedded lower-level diagonal and would break linear independence.
            for (int p = 0; p < m / 2 - 1; ++p) diag[p] = 1;
            for (int p = m / 2 - 1; p < m - 2; ++p) diag[p] = -1;
            diag[m - 2] = -1;
            diag[m - 1] = 1;
        } else {
            for (int p = 0; p < m / 2 + 1; ++p) diag[p] = 1;
            for (int p = m / 2 + 1; p < m; ++p) diag[p] = -1;
        }
        nx[m * m - 2] = {m * m - 1, SrbbElement::Kind::Diagonal, diag, 0, 0, Pauli::X, -1};
        nx[m * m - 1] = {m * m, SrbbElement::Kind::Identity, std::vector<int>(m, 1),
                         0, 0, Pauli::X, -1};
        el = std::move(nx);
    }

    SrbbBasis b;
    b.d = d;
    b.n = -1;
    for (int n = 0; (1 << n) <= d; ++n)
        if ((1 << n) == d) b.n = n;
    b.elements = std::move(el);
    for (int l = 2; l <= d; ++l) b.diagonal_indices.push_back(l * l - 1);
    b.diagonal_indices.push_back(d * d);
    return b;
}

// Scan every non-diagonal element's dense form, classify its coupled pair and
// Pauli type, and demand a full bijection pairs <-> (jX, jY).
inline PairMap audit_pairs(const SrbbBasis& basis) {
    PairMap pm;
    std::map<std::pair<int, int>, int> seen_x, seen_y;
    for (const auto& e : basis.elements) {
        if (e.kind != SrbbElement::Kind::TwoLevel) continue;
        const CMat m = e.dense();
        int a = 0, bcoord = 0, count = 0;
        cplx upper = 0.0;
        for (int r = 0; r < basis.d; ++r)
            for (int c = 0; c < basis.d; ++c) {
                if (r == c || m(r, c) == cplx{}) continue;
                ++count;
                if (r < c) { a = r + 1; bcoord = c + 1; upper = m(r, c); }
            }
        if (count != 2)
            throw std::runtime_error("audit_pairs: element " + std::to_string(e.index) +
                                     " has " + std::to_string(count) + " off-diagonal entries");
        const bool is_x = std::abs(upper.imag()) < 0.5;
        auto& side = is_x ? seen_x : seen_y;
        if (!side.emplace(std::make_pair(a, bcoord), e.index).second)
            throw std::runtime_error("audit_pairs: duplicate pair coupling");
    }
    for (int a = 1; a <= basis.d; ++a)
        for (int bcoord = a + 1; bcoord <= basis.d; ++bcoord) {
            auto ix = seen_x.find({a, bcoord});
            auto iy = seen_y.find({a, bcoord});
            if (ix == seen_x.end() || iy == seen_y.end())
                throw std::runtime_error("audit_pairs: pair (" + std::to_string(a) + "," +
                                         std::to_string(bcoord) + ") not covered");
            pm[{a, bcoord}] = {ix->second, iy->second};
        }
    return pm;
}

inline SrbbBasis build_srbb(int n) {
    if (n < 1) throw std::invalid_argument("build_srbb: n must be >= 1");
    const int d = 1 << n;
    SrbbBasis b = build_rbb(d);

    // Diagonal slot l^2-1 takes the Z-string with chi = l-1 (ascending chi);
    // the identity string (chi = 0) sits at index d^2.
    for (int l = 2; l <= d; ++l) {
        const int mask = detail::chi_to_state_mask(l - 1, n);
        SrbbElement& e = b.elements[l * l - 2];
        e.kind = SrbbElement::Kind::Diagonal;
        e.signs = detail::z_string_signs(mask, d);
        e.z_mask = mask;
        e.alpha = e.beta = 0;
    }
    b.elements[static_cast<size_t>(d) * d - 1].z_mask = 0;
    b.pair_map = audit_pairs(b);
    return b;
}

}  // namespace srbb
