#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "logconn/logconn.hpp"

using namespace logconn;

namespace {

CMatrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) M(r, c) = complexd(g(rng), g(rng));
    return M;
}

CMatrix unit(int n, int r, int c) {
    CMatrix E = CMatrix::Zero(n, n);
    E(r, c) = 1.0;
    return E;
}

} // namespace

TEST_CASE("weights of diag(1,0) are -1, 0, 1 with matrix-unit components") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = 1.0;
    WeightGrading g = grade(S);
    REQUIRE(g.weights.size() == 3);
    CHECK(std::abs(g.weights[0].weight - complexd(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(g.weights[1].weight) == 0.0);
    CHECK(std::abs(g.weights[2].weight - complexd(1.0, 0.0)) < 1e-12);
    CHECK(fnorm(g.component_at(unit(2, 0, 1), complexd(1.0, 0.0)) - unit(2, 0, 1)) < 1e-12);
    CHECK(fnorm(g.component_at(unit(2, 1, 0), complexd(-1.0, 0.0)) - unit(2, 1, 0)) < 1e-12);
}

TEST_CASE("grading components reassemble the matrix and carry the right weight") {
    std::mt19937_64 rng(17);
    const std::vector<std::vector<double>> spectra = {
        {1.0, 0.0}, {2.0, 1.0, 0.0}, {3.0, 1.0, 1.0, 0.0}, {0.5, -0.5, 2.5}};
    for (const auto& diag : spectra) {
        const int n = int(diag.size());
        CMatrix S = CMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) S(i, i) = diag[i];
        WeightGrading g = grade(S);
        for (int trial = 0; trial < 10; ++trial) {
            CMatrix X = random_matrix(n, rng);
            CMatrix sum = CMatrix::Zero(n, n);
            for (int w = 0; w < int(g.weights.size()); ++w) {
                CMatrix Xw = g.component(X, w);
                sum += Xw;
                // [S, X_w] = w X_w
                CHECK(fnorm(S * Xw - Xw * S - g.weights[w].weight * Xw) < 1e-9 * std::max(1.0, fnorm(X)));
            }
            CHECK(fnorm(sum - X) < 1e-9 * std::max(1.0, fnorm(X)));
        }
    }
}

TEST_CASE("bracket of graded components lands in the sum weight") {
    CMatrix S = CMatrix::Zero(3, 3);
    S(0, 0) = 2.0;
    S(1, 1) = 1.0;
    std::mt19937_64 rng(23);
    WeightGrading g = grade(S);
    CMatrix X = random_matrix(3, rng), Y = random_matrix(3, rng);
    for (int wi = 0; wi < int(g.weights.size()); ++wi)
        for (int wj = 0; wj < int(g.weights.size()); ++wj) {
            CMatrix Xw = g.component(X, wi), Yw = g.component(Y, wj);
            CMatrix B = Xw * Yw - Yw * Xw;
            const complexd wsum = g.weights[wi].weight + g.weights[wj].weight;
            const int k = g.weight_index(wsum);
            CMatrix expect = k >= 0 ? g.component(B, k) : CMatrix(CMatrix::Zero(3, 3));
            CHECK(fnorm(B - expect) < 1e-9 * std::max(1.0, fnorm(B)));
        }
}

TEST_CASE("resonance basis of diag(1,0) is the strict upper corner") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = 1.0;
    ResonanceData rd = resonance_basis(S);
    CHECK(rd.resonant);
    REQUIRE(rd.algebra.basis.size() == 1);
    CHECK(fnorm(rd.algebra.basis[0] - unit(2, 0, 1)) < 1e-12);
}

TEST_CASE("resonance basis of diag(2,1,0) has dimension 3") {
    CMatrix S = CMatrix::Zero(3, 3);
    S(0, 0) = 2.0;
    S(1, 1) = 1.0;
    ResonanceData rd = resonance_basis(S);
    CHECK(rd.resonant);
    CHECK(rd.algebra.basis.size() == 3);
    // every element is nilpotent of positive integer weight: strictly upper here
    for (const CMatrix& B : rd.algebra.basis) {
        CHECK(std::abs(B(1, 0)) + std::abs(B(2, 0)) + std::abs(B(2, 1)) < 1e-12);
        CHECK(std::abs(B(0, 0)) + std::abs(B(1, 1)) + std::abs(B(2, 2)) < 1e-12);
    }
}

TEST_CASE("non-resonant spectrum gives an empty resonance basis") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = complexd(0.5, 0.0);
    S(1, 1) = complexd(0.0, 1.0);
    ResonanceData rd = resonance_basis(S);
    CHECK_FALSE(rd.resonant);
    CHECK(rd.algebra.basis.empty());
}

TEST_CASE("chi of an upper triangular matrix is its diagonal") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = 1.0;
    CMatrix M(2, 2);
    M << 2.0, 5.0, 0.0, 3.0;
    CMatrix levi = chi(S, M);
    CMatrix expect = CMatrix::Zero(2, 2);
    expect(0, 0) = 2.0;
    expect(1, 1) = 3.0;
    CHECK(fnorm(levi - expect) < 1e-12);
}

TEST_CASE("chi agrees with the scaling limit z^a M z^-a as z -> 0") {
    std::mt19937_64 rng(31);
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    WeightGrading g = grade(a);
    for (int trial = 0; trial < 5; ++trial) {
        // make an element of P(a): strip the negative weight components
        CMatrix M = random_matrix(3, rng);
        CMatrix P = CMatrix::Zero(3, 3);
        for (int w = 0; w < int(g.weights.size()); ++w)
            if (g.weights[w].weight.real() > -1e-12) P += g.component(M, w);
        const complexd z(1e-6, 0.0);
        CMatrix limit = mat_zpow(z, a) * P * mat_zpow(z, (-a).eval());
        CHECK(fnorm(chi(a, P) - limit) < 1e-5 * std::max(1.0, fnorm(P)));
    }
}

TEST_CASE("chi rejects matrices with negative weight support") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    CMatrix M = cidentity(2) + unit(2, 1, 0);
    CHECK_THROWS_AS(chi(a, M), NotInParabolic);
}

TEST_CASE("chi is multiplicative on the parabolic subgroup") {
    std::mt19937_64 rng(37);
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1.5;
    a(1, 1) = 0.5;
    a(2, 2) = -1.0;
    WeightGrading g = grade(a);
    auto project = [&](const CMatrix& M) {
        CMatrix P = CMatrix::Zero(3, 3);
        for (int w = 0; w < int(g.weights.size()); ++w)
            if (g.weights[w].weight.real() > -1e-12) P += g.component(M, w);
        return P;
    };
    for (int trial = 0; trial < 10; ++trial) {
        CMatrix P1 = project(random_matrix(3, rng)) + 2.0 * cidentity(3);
        CMatrix P2 = project(random_matrix(3, rng)) + 2.0 * cidentity(3);
        CMatrix lhs = chi(a, (P1 * P2).eval());
        CMatrix rhs = chi(a, P1) * chi(a, P2);
        CHECK(fnorm(lhs - rhs) < 1e-9 * std::max(1.0, fnorm(rhs)));
    }
}

TEST_CASE("parabolic data of diag(1,0,-1)") {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(2, 2) = -1.0;
    auto [p, u] = parabolic_data(a);
    CHECK(p.basis.size() == 6);  // diagonal + strictly upper
    CHECK(u.basis.size() == 3);  // strictly upper only
    for (const CMatrix& B : u.basis) {
        CHECK(std::abs(B(1, 0)) + std::abs(B(2, 0)) + std::abs(B(2, 1)) < 1e-12);
    }
}

TEST_CASE("parabolic data rejects complex spectrum") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = complexd(0.0, 1.0);
    CHECK_THROWS_AS(parabolic_data(a), NotRealSemisimple);
}

TEST_CASE("membership in centralizer groups") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = 0.5;
    // diag matrices centralize S
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = complexd(0.0, 2.0);
    CHECK(membership(S, D, Group::C_S).member);
    CHECK_FALSE(membership(S, (D + unit(2, 0, 1)).eval(), Group::C_S).member);
    // exp(2 pi i S) = diag(-1, 1); antidiagonal matrices do not commute with it
    CHECK(membership(S, D, Group::C_exp2piiS).member);
    CMatrix swap = unit(2, 0, 1) + unit(2, 1, 0);
    CHECK_FALSE(membership(S, swap, Group::C_exp2piiS).member);
}

TEST_CASE("membership in parabolic and unipotent radical") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    CMatrix upper = cidentity(2);
    upper(0, 0) = 2.0;
    upper(0, 1) = 7.0;
    CHECK(membership(a, upper, Group::P_a).member);
    CHECK_FALSE(membership(a, (upper + unit(2, 1, 0)).eval(), Group::P_a).member);
    // singular weight-zero part excludes from the group even with clean support
    CMatrix bad = unit(2, 0, 1);
    CHECK_FALSE(membership(a, bad, Group::P_a).member);

    CHECK(membership(a, (cidentity(2) + 5.0 * unit(2, 0, 1)).eval(), Group::U_a).member);
    CHECK_FALSE(membership(a, upper, Group::U_a).member);  // Levi part is not 1
    CHECK_THROWS_AS(membership(CMatrix(iunit * a), upper, Group::P_a), NotRealSemisimple);
}

TEST_CASE("membership in the resonance group") {
    CMatrix S = CMatrix::Zero(3, 3);
    S(0, 0) = 2.0;
    S(1, 1) = 1.0;
    // centralizer part times a resonant unipotent
    CMatrix D = CMatrix::Zero(3, 3);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    D(2, 2) = complexd(0.0, 1.0);
    CMatrix U = cidentity(3) + unit(3, 0, 1) - 2.0 * unit(3, 1, 2);
    CHECK(membership(S, (D * U).eval(), Group::CU_N).member);
    // a non-integer weight direction breaks membership
    CMatrix Shalf = CMatrix::Zero(2, 2);
    Shalf(0, 0) = 0.5;
    CHECK_FALSE(membership(Shalf, (cidentity(2) + unit(2, 0, 1)).eval(), Group::CU_N).member);
}

TEST_CASE("intertwiner algebra of diag(1,0) has dimension 3 and closes") {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = 1.0;
    SubalgebraBasis V = intertwiner_algebra(A);
    CHECK(V.basis.size() == 3);
}

TEST_CASE("intertwiner algebra of diag(2,1,0) has dimension 6") {
    CMatrix A = CMatrix::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = 1.0;
    SubalgebraBasis V = intertwiner_algebra(A);
    CHECK(V.basis.size() == 6);  // 3 diagonal + 3 resonant strictly upper
}

TEST_CASE("intertwiner algebra of a non-resonant matrix is just the centralizer") {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = complexd(0.3, 0.7);
    SubalgebraBasis V = intertwiner_algebra(A);
    CHECK(V.basis.size() == 2);
}

TEST_CASE("strict reduction predicate") {
    CMatrix S = CMatrix::Zero(2, 2);
    S(0, 0) = 0.25;
    CMatrix Ms = mat_exp(CMatrix(two_pi_i * S));
    CHECK(strict_reduction_predicate(cidentity(2), Ms, S));
    // conjugated semisimple part needs the conjugating frame
    CMatrix h(2, 2);
    h << 1.0, 1.0, 0.0, 1.0;
    CMatrix Ms2 = h * Ms * h.inverse();
    CHECK_FALSE(strict_reduction_predicate(cidentity(2), Ms2, S));
    CHECK(strict_reduction_predicate(h, Ms2, S));
    CHECK_THROWS_AS(strict_reduction_predicate(CMatrix(CMatrix::Zero(2, 2)), Ms, S), Singular);
}

TEST_CASE("grading rejects a non-semisimple input") {
    CMatrix J = CMatrix::Zero(2, 2);
    J(0, 1) = 1.0;
    CHECK_THROWS_AS(grade(J), NotSemisimple);
}
