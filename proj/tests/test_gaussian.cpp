#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvmdi/errors.hpp"
#include "cvmdi/gaussian.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace cvmdi;

TEST_CASE("entropy_G anchor values") {
    CHECK(entropy_G(0.0) == 0.0);
    CHECK(entropy_G(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    // High-precision reference for the half-photon thermal state.
    CHECK(entropy_G(0.5) ==
          doctest::Approx(1.37744375108173427).epsilon(1e-14));
}

TEST_CASE("entropy_G clamps rounding noise and rejects real negatives") {
    CHECK(entropy_G(-1e-10) == 0.0);
    CHECK_THROWS_AS(entropy_G(-1e-6), domain_error);
}

TEST_CASE("entropy_G is increasing and concave") {
    double prev = entropy_G(1e-6);
    double prev_slope = 1e300;
    for (double x = 0.01; x < 50.0; x *= 1.3) {
        const double g = entropy_G(x);
        CHECK(g > prev);
        const double slope = (g - prev) / x; // crude, enough for the trend
        CHECK(slope < prev_slope);
        prev = g;
        prev_slope = slope;
    }
}

TEST_CASE("symplectic_pair on a product of thermal states") {
    const SymplecticPair p = symplectic_pair({5.0, 3.0, 0.0});
    CHECK(p.lambda1 == 5.0);
    CHECK(p.lambda2 == 3.0);
}

TEST_CASE("symplectic_pair on a pure EPR state is (1, 1)") {
    const SymplecticPair p = symplectic_pair({15.0, 15.0, std::sqrt(224.0)});
    CHECK(p.lambda1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.lambda2 == 1.0); // exact after the vacuum-floor clamp
}

TEST_CASE("symplectic invariants on random physical states") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 500; ++i) {
        const BipartiteCovariance cov = testing::random_physical(rng);
        const SymplecticPair p = symplectic_pair(cov);
        const double A = cov.a * cov.a + cov.b * cov.b - 2.0 * cov.c * cov.c;
        const double B = cov.a * cov.b - cov.c * cov.c;
        CHECK(p.lambda1 * p.lambda2 == doctest::Approx(B).epsilon(1e-9));
        CHECK(p.lambda1 * p.lambda1 + p.lambda2 * p.lambda2 ==
              doctest::Approx(A).epsilon(1e-9));
        CHECK(p.lambda2 >= 1.0);
    }
}

TEST_CASE("symplectic_pair rejects unphysical correlations") {
    // c far beyond the EPR bound for these variances.
    CHECK_THROWS_AS(symplectic_pair({5.0, 3.0, 12.0}), physicality_error);
}

TEST_CASE("conditional_eigenvalue basics") {
    CHECK(conditional_eigenvalue({7.0, 4.0, 0.0}) == 7.0);
    // Heterodyning one arm of a pure EPR state purifies the other.
    CHECK(conditional_eigenvalue({15.0, 15.0, std::sqrt(224.0)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conditional_eigenvalue({7.3, 7.3, std::sqrt(7.3 * 7.3 - 1.0)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional_eigenvalue matches the 2x2 matrix computation") {
    // gamma_A - sigma (gamma_B + I)^(-1) sigma^T with sigma = c diag(1, -1):
    // both diagonal entries must equal the scalar the library returns.
    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        const BipartiteCovariance cov = testing::random_physical(rng);
        const double inv = 1.0 / (cov.b + 1.0);
        const double xx = cov.a - cov.c * inv * cov.c;
        const double pp = cov.a - (-cov.c) * inv * (-cov.c);
        const double l3 = conditional_eigenvalue(cov);
        CHECK(l3 == doctest::Approx(xx).epsilon(1e-12));
        CHECK(l3 == doctest::Approx(pp).epsilon(1e-12));
    }
}

TEST_CASE("physicality checks") {
    CHECK(is_physical({5.0, 3.0, 0.0}));
    CHECK(is_physical({15.0, 15.0, std::sqrt(224.0)}));
    CHECK_FALSE(is_physical({0.5, 0.5, 0.0}));
    CHECK_FALSE(is_physical({5.0, 3.0, 12.0}));
    CHECK_THROWS_AS(require_physical({0.5, 3.0, 0.0}), physicality_error);
    CHECK_NOTHROW(require_physical({5.0, 3.0, 2.0}));
}
