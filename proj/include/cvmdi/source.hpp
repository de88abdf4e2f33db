#pragma once

// Photon-subtracted two-mode squeezed vacuum source.
//
// One arm of an EPR state of variance V passes a beamsplitter of
// transmittance T_PS; a photon-number-resolving detector heralds exactly k
// subtracted photons. Conditioned on the click the kept two-mode state is
// non-Gaussian, but only its covariance matrix enters the asymptotic rate,
// and that covariance is again of standard form (X, Y, Z).

namespace cvmdi {

struct SourceParams {
    double V;    // EPR variance in shot-noise units, V >= 1
    int k;       // number of subtracted photons, k >= 0
    double T_PS; // subtraction beamsplitter transmittance, 0 < T_PS <= 1
};

// Heralding probability plus the standard-form covariance of the kept state.
struct SubtractedSource {
    double P; // success probability of the k-photon herald
    double X; // variance of the retained (unsubtracted) mode
    double Y; // variance of the subtracted mode after the beamsplitter
    double Z; // cross correlation
};

// Squeezing parameter of the EPR state, xi = sqrt((V-1)/(V+1)) in [0, 1).
double xi(double V);
double xi_squared(double V);

// P(k | V, T_PS) = (1 - xi^2) xi^(2k) (1 - T_PS)^k / (1 - xi^2 T_PS)^(k+1).
// Exactly 1 for the passthrough configuration (k = 0, T_PS = 1).
double success_probability(const SourceParams& src);

// Covariance of the heralded state. The (k = 0, T_PS = 1) passthrough
// reproduces the untouched EPR triple (V, V, sqrt(V^2 - 1)) exactly.
// Throws domain_error when the herald has zero probability (k >= 1 with
// T_PS = 1, or a vacuum source with k >= 1).
SubtractedSource subtracted_covariance(const SourceParams& src);

// Transmittance maximizing the heralding probability at fixed (V, k >= 1):
// T* = (k+1) - k/xi^2, interior only when (k+1) xi^2 > k, i.e. V > 2k+1.
// Outside that region P is maximized only in the degenerate T_PS -> 0 limit
// and a domain_error is thrown.
double optimal_T_PS(double V, int k);

} // namespace cvmdi
