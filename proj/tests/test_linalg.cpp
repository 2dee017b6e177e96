#include <cmath>
#include <random>

#include "amo/linalg.hpp"
#include "doctest.h"

using namespace amo;

TEST_CASE("adjugate identity cases") {
    Mat I2 = Mat::identity(2);
    Mat a = adjugate(I2);
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(1, 1) == doctest::Approx(1.0));
    CHECK(a(0, 1) == doctest::Approx(0.0));

    // nilpotent [[0,1],[0,0]] -> [[0,-1],[0,0]], product = det * I = 0
    Mat n(2, 2);
    n(0, 1) = 1.0;
    Mat an = adjugate(n);
    CHECK(an(0, 0) == doctest::Approx(0.0));
    CHECK(an(0, 1) == doctest::Approx(-1.0));
    CHECK(an(1, 0) == doctest::Approx(0.0));
    Mat prod = n * an;
    CHECK(frobenius_norm(prod) == doctest::Approx(0.0));
}

TEST_CASE("adjugate equals det * inverse for random 3x3") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Mat m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
        double d = det(m);
        if (std::abs(d) < 0.05) continue;
        Mat adj = adjugate(m);
        Mat prod = m * adj;  // must equal det * I
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(prod(i, j) == doctest::Approx(i == j ? d : 0.0).epsilon(1e-10));
    }
}

TEST_CASE("A adj(A) = det(A) I at rank-deficient 4x4") {
    Mat m(4, 4);
    // rank 3: last row = first row
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = u(rng);
    for (int j = 0; j < 4; ++j) m(3, j) = m(0, j);
    CHECK(std::abs(det(m)) < 1e-12);
    Mat adj = adjugate(m);
    CHECK(frobenius_norm(adj) > 1e-8);  // nonzero at rank n-1
    Mat prod = m * adj;
    CHECK(frobenius_norm(prod) < 1e-12);
}

TEST_CASE("cubic and 3x3 eigenvalues") {
    auto r = cubic_real_roots(-6.0, 11.0, -6.0);  // (x-1)(x-2)(x-3)
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(r[2] == doctest::Approx(3.0));

    Mat m(3, 3);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    m(2, 2) = 0.0;
    m(0, 1) = 0.5;  // upper-triangular perturbation keeps the spectrum
    auto ev = eigenvalues3_real(m);
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[1] == doctest::Approx(0.0));
    CHECK(ev[2] == doctest::Approx(1.0));
}

TEST_CASE("solve_small") {
    Mat A(3, 3);
    A(0, 0) = 2;
    A(0, 1) = 1;
    A(1, 1) = 3;
    A(1, 2) = -1;
    A(2, 0) = 1;
    A(2, 2) = 4;
    auto x = solve_small(A, {5, 2, 9});
    // residual check
    CHECK(2 * x[0] + x[1] == doctest::Approx(5));
    CHECK(3 * x[1] - x[2] == doctest::Approx(2));
    CHECK(x[0] + 4 * x[2] == doctest::Approx(9));
}
