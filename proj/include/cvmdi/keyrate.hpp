#pragma once

// Asymptotic secret key rate under reverse reconciliation.
//
// The source covariance (X, Y, Z) propagated through the effective channel
// gives the joint Alice-Bob covariance
//     a = X,   b = T (Y + chi_t),   c = sqrt(T) Z,
// from which the heterodyne mutual information I_AB and the eavesdropper
// Holevo bound chi_BE follow. The heralded rate is K = P (beta I_AB - chi_BE),
// clamped at zero for the figures.

#include "cvmdi/channel.hpp"
#include "cvmdi/gaussian.hpp"
#include "cvmdi/source.hpp"

namespace cvmdi {

struct ProtocolConfig {
    SourceParams src{15.0, 0, 1.0};
    LinkParams link{};
    double beta = 0.96; // reconciliation efficiency, 0 <= beta <= 1
};

// Full diagnostic output of one rate evaluation.
struct RateReport {
    double P;       // heralding probability
    BipartiteCovariance cov;
    double I_AB;    // mutual information, bits per heralded use
    double lambda1; // symplectic spectrum of the joint state
    double lambda2;
    double lambda3; // conditional eigenvalue after Bob's heterodyne
    double chi_BE;  // Holevo bound, bits per heralded use
    double K_raw;   // P (beta I_AB - chi_BE), may be negative
    double K;       // max(K_raw, 0)
};

// Reject inconsistent configurations (the protocol ties link.V_B to src.V).
void validate_config(const ProtocolConfig& cfg);

// Joint covariance after source, relay link, and noise referral.
// Throws physicality_error if the assembled state dips below vacuum.
BipartiteCovariance conditioned_covariance(const ProtocolConfig& cfg);

// Heterodyne mutual information per quadrature pair, in bits:
// I = log2( (a+1) / (a+1 - c^2/(b+1)) ). Zero iff c = 0.
double mutual_information(const BipartiteCovariance& cov);

// Holevo information of the eavesdropper given Bob's heterodyne outcome:
// chi = G((l1-1)/2) + G((l2-1)/2) - G((l3-1)/2), clamped to >= 0.
double holevo_bound(const BipartiteCovariance& cov);

// One-shot evaluation of the whole pipeline.
RateReport secret_key_rate(const ProtocolConfig& cfg);

// Repeaterless bound for a total Alice-Bob distance L, in bits per use:
// -log2(1 - 10^(-loss_coeff L / 10)); +infinity at L = 0.
double plob_bound(double L_AB_km, double loss_coeff = 0.2);

} // namespace cvmdi
