#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock_oracle.hpp"

#include <cmath>

using namespace cvmdi;

TEST_CASE("truncation rule picks the smallest compliant N_max") {
    // xi^2 = 0.875 at V = 15: 0.875^207 ~ 9.9e-13 < 1e-12 <= 0.875^206.
    const TruncatedBipartiteState s =
        build_projected_state(15.0, 0.9, 0, 1e-12);
    CHECK(s.N_max == 206);
    CHECK(s.tail_bound < 1e-12);
    CHECK(s.tail_bound == doctest::Approx(std::pow(0.875, 207)));
    CHECK(std::pow(0.875, 206.0) >= 1e-12); // one step looser would violate
}

TEST_CASE("vacuum source is the single-coefficient state") {
    const TruncatedBipartiteState s = build_projected_state(1.0, 0.5, 0);
    REQUIRE(s.coeffs.size() == 1);
    CHECK(s.coeffs[0] == 1.0);
    const OracleMoments m = oracle_moments(s);
    CHECK(m.P == 1.0);
    CHECK(m.X == 1.0);
    CHECK(m.Y == 1.0);
    CHECK(m.Z == 0.0);
}

TEST_CASE("passthrough moments reproduce the EPR state") {
    const TruncatedBipartiteState s = build_projected_state(15.0, 1.0, 0);
    const OracleMoments m = oracle_moments(s);
    CHECK(m.P == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.X == doctest::Approx(15.0).epsilon(1e-10));
    CHECK(m.Y == doctest::Approx(15.0).epsilon(1e-10));
    CHECK(m.Z == doctest::Approx(std::sqrt(224.0)).epsilon(1e-10));
}

TEST_CASE("one-photon anchor point") {
    const TruncatedBipartiteState s =
        build_projected_state(15.0, 6.0 / 7.0, 1);
    const OracleMoments m = oracle_moments(s);
    CHECK(std::abs(m.P - 0.25) <= 1e-10);
    CHECK(m.X == doctest::Approx(15.0).epsilon(1e-8));
    CHECK(m.Y == doctest::Approx(13.0).epsilon(1e-8));
    CHECK(m.Z == doctest::Approx(13.8564064605510183).epsilon(1e-8));
}

TEST_CASE("two-photon closed-form spot check") {
    // V = 3, T_PS = 1/2, k = 2 has the exact moments (2/27, 7, 3, 4).
    const TruncatedBipartiteState s = build_projected_state(3.0, 0.5, 2);
    const OracleMoments m = oracle_moments(s);
    CHECK(m.P == doctest::Approx(2.0 / 27.0).epsilon(1e-10));
    CHECK(m.X == doctest::Approx(7.0).epsilon(1e-10));
    CHECK(m.Y == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(m.Z == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("oracle confirms the photon-number offset X - Y = 2k") {
    for (int k : {0, 1, 3}) {
        const OracleMoments m =
            oracle_moments(build_projected_state(20.0, 0.7, k));
        CHECK(m.X - m.Y == doctest::Approx(2.0 * k).epsilon(1e-10));
        CHECK(m.Z > 0.0);
    }
}

TEST_CASE("full validation grid passes at 1e-8") {
    for (double V : {3.0, 15.0, 60.0}) {
        for (double T : {0.5, 0.857, 0.95}) {
            for (int k = 0; k <= 3; ++k) {
                const ValidationReport r =
                    validate_against_analytic(V, T, k, 1e-8);
                INFO("V=", V, " T_PS=", T, " k=", k,
                     " max_err=", r.max_err);
                CHECK(r.pass);
            }
        }
    }
}

TEST_CASE("near-vacuum edge stays accurate") {
    const ValidationReport r =
        validate_against_analytic(1.0001, 0.9, 1, 1e-8);
    INFO("max_err=", r.max_err);
    CHECK(r.pass);
}

TEST_CASE("truncation cap rejects unreachable tolerances") {
    // V = 60 needs N_max ~ 2.1e4 for tol = 1e-300, beyond the default cap.
    CHECK_THROWS_AS(build_projected_state(60.0, 0.5, 0, 1e-300),
                    domain_error);
    // Same rule with a deliberately small cap.
    CHECK_THROWS_AS(build_projected_state(15.0, 0.5, 0, 1e-12, 100),
                    domain_error);
}

TEST_CASE("unresolvable success probability is refused") {
    // A 30-photon herald at tol = 1e-3 leaves P ~ 1e-4 under a tail bound
    // of ~1e-3: the moments would be dominated by what was cut off.
    const TruncatedBipartiteState s =
        build_projected_state(15.0, 0.5, 30, 1e-3);
    CHECK_THROWS_AS(oracle_moments(s), domain_error);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_projected_state(0.5, 0.5, 0), domain_error);
    CHECK_THROWS_AS(build_projected_state(15.0, 0.0, 0), domain_error);
    CHECK_THROWS_AS(build_projected_state(15.0, 1.0, 1), domain_error);
    CHECK_THROWS_AS(build_projected_state(15.0, 0.5, -1), domain_error);
    CHECK_THROWS_AS(build_projected_state(15.0, 0.5, 0, 0.0), domain_error);
}
