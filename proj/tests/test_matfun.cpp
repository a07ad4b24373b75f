#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "logconn/logconn.hpp"

using namespace logconn;

TEST_CASE("mat_exp matches closed forms") {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    CMatrix E = mat_exp(A);
    CHECK(std::abs(E(0, 0) - std::exp(1.0)) < 1e-13);
    CHECK(std::abs(E(1, 1) - std::exp(2.0)) < 1e-13);
    CHECK(std::abs(E(0, 1)) < 1e-14);

    // exp of a nilpotent single step: I + N
    CMatrix N = CMatrix::Zero(3, 3);
    N(0, 1) = 2.0;
    N(1, 2) = complexd(0.0, 1.0);
    CMatrix expect = cidentity(3) + N + 0.5 * N * N;
    CHECK(fnorm(mat_exp(N) - expect) < 1e-13);
}

TEST_CASE("nilpotent_log recovers the exponent of a unipotent matrix") {
    CMatrix N = CMatrix::Zero(2, 2);
    N(0, 1) = 1.0;
    CHECK(fnorm(nilpotent_log(cidentity(2) + N) - N) < 1e-14);

    // larger strictly upper triangular exponent, log(exp(N)) = N exactly
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + int(rng() % 4);
        CMatrix X = CMatrix::Zero(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) X(r, c) = complexd(g(rng), g(rng));
        CHECK(fnorm(nilpotent_log(mat_exp(X)) - X) < 1e-10 * std::max(1.0, fnorm(X)));
    }
}

TEST_CASE("nilpotent_log of the identity is zero") {
    CHECK(fnorm(nilpotent_log(cidentity(4))) == 0.0);
}

TEST_CASE("nilpotent_log rejects non-unipotent input") {
    CMatrix M = CMatrix::Zero(2, 2);
    M(0, 0) = 2.0;
    M(1, 1) = 1.0;
    CHECK_THROWS_AS(nilpotent_log(M), NotUnipotent);
}

TEST_CASE("mat_zpow matches scalar powers on the diagonal") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = complexd(0.5, 0.0);
    S(1, 1) = complexd(0.0, 1.0);
    const complexd z(2.0, 0.0);
    CMatrix Z = mat_zpow(z, S);
    CHECK(std::abs(Z(0, 0) - std::pow(z, complexd(0.5, 0.0))) < 1e-13);
    CHECK(std::abs(Z(1, 1) - std::pow(z, complexd(0.0, 1.0))) < 1e-13);
}

TEST_CASE("mat_zpow of a Jordan block carries the log off the diagonal") {
    // z^(aI + N) = z^a (I + N log z) for a single nilpotent step
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = 0.25;
    A(0, 1) = 1.0;
    A(1, 1) = 0.25;
    const complexd z(3.0, 0.0);
    CMatrix Z = mat_zpow(z, A);
    const complexd za = std::pow(z, complexd(0.25, 0.0));
    CHECK(std::abs(Z(0, 0) - za) < 1e-12);
    CHECK(std::abs(Z(0, 1) - za * std::log(z)) < 1e-12);
    CHECK(std::abs(Z(1, 0)) < 1e-13);
}
