#pragma once

// Two-mode Gaussian state primitives in shot-noise units (vacuum variance 1,
// quadratures x = a + a^dag, p = -i(a - a^dag)). Every bipartite state in the
// protocol pipeline is of the standard form
//
//     gamma = [[ a*I, c*Sz ], [ c*Sz, b*I ]],   Sz = diag(1, -1),
//
// so it is carried around as the triple (a, b, c) instead of a 4x4 matrix.

#include <cstddef>

namespace cvmdi {

// Eigenvalues below 1 by less than this are treated as rounding and clamped;
// anything further below the vacuum floor is a genuine modeling error.
inline constexpr double k_physicality_tol = 1e-9;

struct BipartiteCovariance {
    double a; // variance of mode A
    double b; // variance of mode B
    double c; // cross correlation, <x_A x_B> = c = -<p_A p_B>
};

struct SymplecticPair {
    double lambda1; // larger symplectic eigenvalue
    double lambda2; // smaller one, >= 1 for a physical state
};

// Von Neumann entropy of a thermal state with mean photon number x, in bits:
// G(x) = (x+1) log2(x+1) - x log2(x). G(0) = 0, G(1) = 2.
// Values in (-tol, 0) are clamped to 0; below that throws domain_error.
double entropy_G(double x);

// Symplectic spectrum of the standard-form state: with
// A = a^2 + b^2 - 2c^2 and B = ab - c^2, the eigenvalues are
// lambda^2 = (A +/- sqrt(A^2 - 4B^2)) / 2. The discriminant is evaluated as
// (a-b)^2 ((a+b)^2 - 4c^2), which is exact where the textbook form cancels.
// Throws physicality_error if the discriminant or lambda2 is below floor.
SymplecticPair symplectic_pair(const BipartiteCovariance& cov);

// Symplectic eigenvalue of mode A after a heterodyne measurement of mode B:
// lambda3 = a - c^2 / (b + 1). For standard-form states the conditional
// covariance is proportional to the identity, so a scalar is the whole story.
double conditional_eigenvalue(const BipartiteCovariance& cov);

// True when a, b >= 1 and the smaller symplectic eigenvalue clears the
// vacuum floor within tolerance.
bool is_physical(const BipartiteCovariance& cov);

// Same check, but throws physicality_error with a diagnostic on failure.
void require_physical(const BipartiteCovariance& cov);

} // namespace cvmdi
