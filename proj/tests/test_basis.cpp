#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "srbb/basis.hpp"
#include "test_helpers.hpp"

using namespace srbb;

TEST_CASE("base case is the Pauli basis in order") {
    const SrbbBasis b = build_rbb(2);
    CMat sx(2), sy(2), sz(2);
    sx(0, 1) = 1.0; sx(1, 0) = 1.0;
    sy(0, 1) = cplx(0, -1); sy(1, 0) = cplx(0, 1);
    sz(0, 0) = 1.0; sz(1, 1) = -1.0;
    REQUIRE(frobenius_distance(b.at(1).dense(), sx) == 0.0);
    REQUIRE(frobenius_distance(b.at(2).dense(), sy) == 0.0);
    REQUIRE(frobenius_distance(b.at(3).dense(), sz) == 0.0);
    REQUIRE(frobenius_distance(b.at(4).dense(), CMat::identity(2)) == 0.0);
}

TEST_CASE("recursive basis elements are Hermitian, involutive, with the stated traces") {
    for (int d = 2; d <= 16; ++d) {
        const SrbbBasis b = build_rbb(d);
        REQUIRE((int)b.elements.size() == d * d);
        for (const auto& e : b.elements) {
            const CMat m = e.dense();
            REQUIRE(frobenius_distance(m, m.adjoint()) == 0.0);
            REQUIRE(frobenius_distance(m * m, CMat::identity(d)) == 0.0);
            if (e.index < d * d) {
                const int want = (d % 2 == 0) ? 0 : 1;
                REQUIRE(e.trace() == want);
                REQUIRE(std::abs(m.trace() - cplx((double)want)) == 0.0);
            }
        }
    }
}

TEST_CASE("diagonal slots sit at the square-minus-one indices") {
    const SrbbBasis b = build_rbb(4);
    REQUIRE(b.diagonal_indices == std::vector<int>{3, 8, 15, 16});
    for (int j : b.diagonal_indices) {
        const auto k = b.at(j).kind;
        REQUIRE((k == SrbbElement::Kind::Diagonal || k == SrbbElement::Kind::Identity));
    }
    // and nothing else is diagonal
    for (const auto& e : b.elements)
        if (e.kind != SrbbElement::Kind::TwoLevel)
            REQUIRE((e.index == 3 || e.index == 8 || e.index == 15 || e.index == 16));
}

TEST_CASE("vectorized basis has full rank") {
    for (int d = 2; d <= 8; ++d)
        REQUIRE(testutil::exact_rank(testutil::vectorize_basis(build_rbb(d))) == d * d);
    REQUIRE(testutil::numerical_rank(testutil::vectorize_basis(build_rbb(16)), 1e-8) == 256);
}

TEST_CASE("non-diagonal elements have exactly one coupled pair each") {
    for (int d = 3; d <= 8; ++d) {
        const SrbbBasis b = build_rbb(d);
        const PairMap pm = audit_pairs(b);
        REQUIRE((int)pm.size() == d * (d - 1) / 2);
    }
}

TEST_CASE("index formulas agree with the audited pair map") {
    for (int d : {4, 8}) {
        const SrbbBasis b = build_rbb(d);
        const PairMap pm = audit_pairs(b);
        for (int q = 2; q <= d; ++q)
            for (int p = 1; p < q; ++p) {
                const auto [jx, jy] = pm.at({p, q});
                REQUIRE(jx == h_index(q, p));
                REQUIRE(jy == f_index(q, p));
            }
    }
}

TEST_CASE("index formula spot values") {
    REQUIRE(f_index(3, 1) == 7);
    REQUIRE(h_index(4, 2) == 11);
    REQUIRE(h_index(4, 3) == 9);
    REQUIRE_THROWS_AS(h_index(1, 1), std::invalid_argument);
}

TEST_CASE("chi of I/Z strings") {
    REQUIRE(chi_index("II") == 0);
    REQUIRE(chi_index("ZI") == 1);
    REQUIRE(chi_index("IZ") == 2);
    REQUIRE(chi_index("ZZZ") == 7);
    REQUIRE_THROWS(chi_index("XZ"));
}

TEST_CASE("qubit basis replaces diagonals with I/Z strings") {
    const SrbbBasis b1 = build_srbb(1);
    const SrbbBasis r2 = build_rbb(2);
    for (int j = 1; j <= 4; ++j)
        REQUIRE(frobenius_distance(b1.at(j).dense(), r2.at(j).dense()) == 0.0);

    const SrbbBasis b2 = build_srbb(2);
    REQUIRE(b2.at(16).kind == SrbbElement::Kind::Identity);
    // slots {3,8,15} hold the nontrivial strings in ascending chi order:
    // chi=1 is Z(x)I  -> diag(1,1,-1,-1) with qubit 1 the most significant bit
    REQUIRE(b2.at(3).signs == std::vector<int>{1, 1, -1, -1});
    // chi=2 is I(x)Z -> diag(1,-1,1,-1)
    REQUIRE(b2.at(8).signs == std::vector<int>{1, -1, 1, -1});
    // chi=3 is Z(x)Z -> diag(1,-1,-1,1)
    REQUIRE(b2.at(15).signs == std::vector<int>{1, -1, -1, 1});

    REQUIRE(testutil::exact_rank(testutil::vectorize_basis(b2)) == 16);
    for (const auto& e : b2.elements)
        if (e.index != 16) REQUIRE(e.trace() == 0);
}

TEST_CASE("pair map covers every coordinate pair once for qubit sizes") {
    for (int n = 1; n <= 5; ++n) {
        const SrbbBasis b = build_srbb(n);
        const int d = 1 << n;
        REQUIRE((int)b.pair_map.size() == d * (d - 1) / 2);
        std::set<int> used;
        for (const auto& [pair, idx] : b.pair_map) {
            REQUIRE(used.insert(idx.first).second);
            REQUIRE(used.insert(idx.second).second);
            const auto& ex = b.at(idx.first);
            const auto& ey = b.at(idx.second);
            REQUIRE(ex.pauli == Pauli::X);
            REQUIRE(ey.pauli == Pauli::Y);
            REQUIRE(ex.alpha == pair.first);
            REQUIRE(ex.beta == pair.second);
        }
        REQUIRE((int)used.size() == d * d - d);
    }
}

TEST_CASE("non-diagonal shapes: exactly two off-diagonal entries") {
    for (int d = 3; d <= 8; ++d)
        REQUIRE_NOTHROW(audit_pairs(build_rbb(d)));
}
