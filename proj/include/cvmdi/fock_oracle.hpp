#pragma once

// Truncated Fock-space oracle for the photon-subtracted source.
//
// The heralded two-mode state has the exact number-basis expansion
// |psi_k> ~ sum_n d_n |n>|n-k>, so its moments can be computed by direct
// ladder-operator algebra on a truncated coefficient vector. This module is
// the independent check for the closed-form (P, X, Y, Z) in source.hpp: it
// shares no algebra with it beyond the state definition itself.

#include <vector>

namespace cvmdi {

struct TruncatedBipartiteState {
    double V;     // source variance the state was built from
    double T_PS;  // subtraction transmittance
    int k;        // heralded photon number
    int N_max;    // largest retained photon index n
    double tail_bound; // xi^(2 (N_max + 1)), bound on the discarded weight
    // Unnormalized amplitudes d_n for n = k .. N_max; coeffs[i] = d_{k+i}.
    std::vector<double> coeffs;
};

// Moments of the truncated state, normalized by its own success probability.
struct OracleMoments {
    double P;
    double X;
    double Y;
    double Z;
};

// Comparison of oracle moments against the closed forms.
struct ValidationReport {
    double err_P;
    double err_X;
    double err_Y;
    double err_Z;
    double max_err; // largest of the four relative errors
    bool pass;      // max_err <= the requested tolerance
};

// Build the amplitude vector, truncating at the smallest N_max with
// xi^(2 (N_max + 1)) < tol. Amplitudes are assembled in log space so large
// photon numbers do not overflow the binomial factors. Throws domain_error
// when the required N_max exceeds n_cap (tolerance too tight to honor).
TruncatedBipartiteState build_projected_state(double V, double T_PS, int k,
                                              double tol = 1e-16,
                                              int n_cap = 10000);

// Moments by brute-force ladder algebra. Also recomputes the first moments
// and all four quadrature cross moments from generic operator sums and
// asserts <x_A p_B> = <p_A x_B> = 0 and <p_A p_B> = -Z, so the sign
// structure of the standard form is checked, not assumed. Throws
// domain_error when P is not resolvable above the truncation tail
// (P < 10 * tail_bound).
OracleMoments oracle_moments(const TruncatedBipartiteState& state);

// Build, measure, and compare against the closed forms at relative
// tolerance tol (this tol is the comparison threshold, not the truncation
// threshold; truncation uses the build_projected_state default).
ValidationReport validate_against_analytic(double V, double T_PS, int k,
                                           double tol = 1e-8);

} // namespace cvmdi
