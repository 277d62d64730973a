#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "srbb/targets.hpp"
#include "test_helpers.hpp"

using namespace srbb;

TEST_CASE("all builtin targets are unitary") {
    for (const auto& name : builtin_target_names()) {
        const CMat u = builtin_target(name);
        INFO(name);
        REQUIRE(is_unitary(u, 1e-12));
    }
    REQUIRE(is_unitary(builtin_target("haar(2,7)"), 1e-10));
    REQUIRE(is_unitary(builtin_target("haar(3,11)"), 1e-10));
}

TEST_CASE("permutation gates match their truth tables") {
    {
        const CMat c = builtin_target("CNOT");  // |10> <-> |11>
        Permutation p(4);
        p.swap_points(3, 4);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        const CMat c = builtin_target("CNOT21");  // |01> <-> |11>
        Permutation p(4);
        p.swap_points(2, 4);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        const CMat c = builtin_target("SWAP");
        Permutation p(4);
        p.swap_points(2, 3);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        const CMat c = builtin_target("XNOR");  // flips qubit 2 when qubit 1 is 0
        Permutation p(4);
        p.swap_points(1, 2);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        const CMat c = builtin_target("Toffoli");  // |110> <-> |111>
        Permutation p(8);
        p.swap_points(7, 8);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        const CMat c = builtin_target("Fredkin");  // |101> <-> |110>
        Permutation p(8);
        p.swap_points(6, 7);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
    {
        // Peres: (a,b,c) -> (a, a XOR b, (a AND b) XOR c)
        const CMat c = builtin_target("Peres");
        Permutation p(8);
        p.swap_points(5, 7);  // |100> -> |110>; |110> -> |101>... full cycle below
        // check column-wise instead: images of all 8 states
        const int img[8] = {0, 1, 2, 3, 6, 7, 5, 4};
        for (int s = 0; s < 8; ++s)
            for (int r = 0; r < 8; ++r)
                REQUIRE(c(r, s) == (r == img[s] ? cplx(1, 0) : cplx(0, 0)));
    }
    {
        const CMat c = builtin_target("CCCX");  // |1110> <-> |1111>
        Permutation p(16);
        p.swap_points(15, 16);
        REQUIRE(frobenius_distance(c, permutation_to_matrix(p)) == 0.0);
    }
}

TEST_CASE("phase and mixing gates have their textbook entries") {
    {
        const CMat c = builtin_target("CPhase");
        REQUIRE(c(3, 3) == cplx(-1, 0));
        REQUIRE(c(0, 0) == cplx(1, 0));
        REQUIRE(c(3, 0) == cplx(0, 0));
    }
    {
        const CMat c = builtin_target("iSWAP");
        REQUIRE(c(1, 2) == cplx(0, 1));
        REQUIRE(c(2, 1) == cplx(0, 1));
        REQUIRE(c(1, 1) == cplx(0, 0));
    }
    {
        const CMat c = builtin_target("fSWAP");
        REQUIRE(c(3, 3) == cplx(-1, 0));
        REQUIRE(c(1, 2) == cplx(1, 0));
    }
    {
        const CMat a = builtin_target("sqrtSWAP");
        const CMat swap = builtin_target("SWAP");
        REQUIRE(frobenius_distance(a * a, swap) < 1e-14);
    }
    {
        const CMat a = builtin_target("sqrtiSWAP");
        const CMat iswap = builtin_target("iSWAP");
        REQUIRE(frobenius_distance(a * a, iswap) < 1e-14);
        REQUIRE(frobenius_distance(a, builtin_target("XXplusYY")) < 1e-14);
        // XXplusYY convention: exp(i*pi*(XX+YY)/8)
        CMat h = builtin_target("XX") + builtin_target("YY");
        REQUIRE(frobenius_distance(a, expm_oracle(h * cplx(kPi / 8, 0))) < 1e-12);
    }
    {
        const CMat zz = builtin_target("ZZ");
        REQUIRE(zz(0, 0) == cplx(1, 0));
        REQUIRE(zz(1, 1) == cplx(-1, 0));
        REQUIRE(zz(2, 2) == cplx(-1, 0));
        REQUIRE(zz(3, 3) == cplx(1, 0));
        const CMat zy = builtin_target("ZY");
        REQUIRE(zy(0, 1) == cplx(0, -1));
        REQUIRE(zy(3, 2) == cplx(0, -1));
    }
}

TEST_CASE("QFT and Grover formulas") {
    for (int n : {2, 3, 4}) {
        const CMat q = qft_matrix(n);
        const int d = 1 << n;
        REQUIRE(is_unitary(q, 1e-12));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                const cplx want =
                    std::exp(cplx(0, 2.0 * kPi * j * k / d)) / std::sqrt((double)d);
                REQUIRE(std::abs(q(j, k) - want) < 1e-14);
            }
        const CMat g = grover_matrix(n);
        REQUIRE(is_unitary(g, 1e-12));
        // column |1..1>: the oracle negates it, then diffusion reflects
        REQUIRE(std::abs(g(d - 1, d - 1) - (1.0 - 2.0 / d)) < 1e-14);
        REQUIRE(std::abs(g(0, d - 1) + 2.0 / d) < 1e-14);
        // any other column keeps the plain diffusion entries
        REQUIRE(std::abs(g(0, 0) - (2.0 / d - 1.0)) < 1e-14);
    }
}

TEST_CASE("haar targets are deterministic in the seed") {
    const CMat a = builtin_target("haar(2,42)");
    const CMat b = builtin_target("haar(2,42)");
    const CMat c = builtin_target("haar(2,43)");
    REQUIRE(frobenius_distance(a, b) == 0.0);
    REQUIRE(frobenius_distance(a, c) > 1e-3);
    REQUIRE_THROWS_AS(builtin_target("haar(2)"), std::invalid_argument);
    REQUIRE_THROWS_AS(builtin_target("NOPE"), std::invalid_argument);
}

TEST_CASE("bench suite is deterministic and reports per-target records") {
    ApproxConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.max_layers = 1;
    cfg.restarts = 2;
    cfg.max_evals = 2000;
    cfg.seed = 9;
    const std::vector<std::string> names = {"CNOT", "CPhase"};
    const auto r1 = bench_suite(names, cfg);
    const auto r2 = bench_suite(names, cfg);
    REQUIRE(r1.size() == 2);
    REQUIRE(r1[0].target == "CNOT");
    REQUIRE(r1[0].failure.empty());
    REQUIRE(r1[0].n == 2);
    REQUIRE(r1[0].cnot <= 20);
    REQUIRE(r1[0].rz <= 15);
    REQUIRE(r1[0].final_error == r2[0].final_error);
    std::ostringstream f1, f2;
    write_bench_results(f1, r1, cfg);
    write_bench_results(f2, r2, cfg);
    REQUIRE(f1.str() == f2.str());
    REQUIRE(f1.str().find("# config_hash ") == 0);
}
