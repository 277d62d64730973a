#pragma once

// Shared verification helpers for the test suite: exact rank of matrices with
// entries in {0, +-1, +-i} over GF(p) with p = 1 mod 4, and a numerical rank
// fallback for larger dimensions.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "srbb/basis.hpp"
#include "srbb/complex_matrix.hpp"

namespace testutil {

inline constexpr std::uint64_t kPrime = 2013265921;  // 15*2^27 + 1, p = 1 mod 4

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = (__uint128_t)r * b % m;
        b = (__uint128_t)b * b % m;
        e >>= 1;
    }
    return r;
}

// A square root of -1 modulo kPrime.
inline std::uint64_t imag_unit_mod_p() {
    for (std::uint64_t g = 2;; ++g) {
        const std::uint64_t r = pow_mod(g, (kPrime - 1) / 4, kPrime);
        if ((__uint128_t)r * r % kPrime == kPrime - 1) return r;
    }
}

// Exact rank over GF(p) of a matrix whose complex entries are Gaussian
// integers with small coordinates (here always in {-1,0,1}).
inline int exact_rank(const std::vector<std::vector<srbb::cplx>>& rows) {
    static const std::uint64_t iu = imag_unit_mod_p();
    const size_t nr = rows.size(), nc = rows[0].size();
    std::vector<std::vector<std::uint64_t>> m(nr, std::vector<std::uint64_t>(nc));
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c) {
            const auto v = rows[r][c];
            const long long re = llround(v.real()), im = llround(v.imag());
            if (std::abs(v.real() - re) > 1e-9 || std::abs(v.imag() - im) > 1e-9)
                throw std::runtime_error("exact_rank: non Gaussian-integer entry");
            std::uint64_t x = (re % (long long)kPrime + (long long)kPrime) % kPrime;
            std::uint64_t y = (im % (long long)kPrime + (long long)kPrime) % kPrime;
            m[r][c] = (x + (__uint128_t)y * iu) % kPrime;
        }
    int rank = 0;
    for (size_t c = 0; c < nc && rank < (int)nr; ++c) {
        size_t piv = nr;
        for (size_t r = rank; r < nr; ++r)
            if (m[r][c]) { piv = r; break; }
        if (piv == nr) continue;
        std::swap(m[piv], m[(size_t)rank]);
        const std::uint64_t inv = pow_mod(m[(size_t)rank][c], kPrime - 2, kPrime);
        for (size_t r = rank + 1; r < nr; ++r) {
            if (!m[r][c]) continue;
            const std::uint64_t f = (__uint128_t)m[r][c] * inv % kPrime;
            for (size_t cc = c; cc < nc; ++cc) {
                const std::uint64_t sub = (__uint128_t)f * m[(size_t)rank][cc] % kPrime;
                m[r][cc] = (m[r][cc] + kPrime - sub) % kPrime;
            }
        }
        ++rank;
    }
    return rank;
}

// Numerical rank by complex Gaussian elimination with partial pivoting.
inline int numerical_rank(std::vector<std::vector<srbb::cplx>> m, double tol) {
    const size_t nr = m.size(), nc = m[0].size();
    int rank = 0;
    for (size_t c = 0; c < nc && rank < (int)nr; ++c) {
        size_t piv = (size_t)rank;
        double best = std::abs(m[piv][c]);
        for (size_t r = rank + 1; r < nr; ++r)
            if (std::abs(m[r][c]) > best) { best = std::abs(m[r][c]); piv = r; }
        if (best <= tol) continue;
        std::swap(m[piv], m[(size_t)rank]);
        for (size_t r = rank + 1; r < nr; ++r) {
            const srbb::cplx f = m[r][c] / m[(size_t)rank][c];
            if (f == srbb::cplx{}) continue;
            for (size_t cc = c; cc < nc; ++cc) m[r][cc] -= f * m[(size_t)rank][cc];
        }
        ++rank;
    }
    return rank;
}

inline std::vector<std::vector<srbb::cplx>> vectorize_basis(const srbb::SrbbBasis& b) {
    std::vector<std::vector<srbb::cplx>> rows;
    rows.reserve(b.elements.size());
    for (const auto& e : b.elements) rows.push_back(e.dense().data());
    return rows;
}

}  // namespace testutil
