#pragma once

// Measurement-device-independent link model.
//
// Alice and Bob send their kept modes over fiber spans of length L_AC and
// L_BC to an untrusted relay, which Bell-measures them and broadcasts the
// outcome; Bob then displaces by a gain g tuned to decouple his variance.
// Under one-mode collective Gaussian attacks the whole arrangement collapses
// to a single effective one-way channel with transmittance T and excess
// noise eps_th, plus a homodyne detection penalty.

namespace cvmdi {

struct LinkParams {
    double L_AC = 0.0;        // Alice-relay fiber length, km
    double L_BC = 0.0;        // Bob-relay fiber length, km
    double loss_coeff = 0.2;  // fiber loss, dB/km
    double eps_A = 0.01;      // excess noise on Alice's span, shot-noise units
    double eps_B = 0.01;      // excess noise on Bob's span
    double V_B = 15.0;        // Bob's modulation variance (equal to V here)
    double eta = 0.975;       // homodyne detector efficiency, 0 < eta <= 1
    double v_el = 0.01;       // detector electronic noise, shot-noise units
};

// Everything downstream needs from the link, in one place.
struct EffectiveChannel {
    double T_A;      // Alice-relay transmittance
    double T_B;      // Bob-relay transmittance
    double g_sq;     // squared displacement gain
    double T;        // effective one-way transmittance, T = T_A g^2 / 2
    double eps_th;   // equivalent excess noise of the one-way channel
    double chi_line; // line noise referred to input, (1-T)/T + eps_th
    double chi_hom;  // homodyne noise, (v_el + 1 - eta) / eta
    double chi_t;    // total noise, chi_line + 2 chi_hom / T
};

// Fiber transmittance 10^(-loss_coeff * L / 10) for a span of L km.
double transmittance(double L_km, double loss_coeff);

// Gain decoupling Bob's mode: g^2 = 2 (V_B - 1) / (T_B (V_B + 1)).
// V_B = 1 carries no modulation and is rejected (zero gain, no key).
double displacement_gain_sq(double V_B, double T_B);

// Equivalent excess noise for an arbitrary displacement gain g:
//   eps = (T_B/T_A) [ sqrt(2/(T_B g^2)) sqrt(V_B-1) - sqrt(V_B+1) ]^2
//       + (T_B/T_A) (chi_B - 1) + 1 + chi_A
// with chi_X = 1/T_X - 1 + eps_X. The mismatch term vanishes at no point for
// finite V_B; the optimal g above minimizes it. Kept general so detuned-gain
// studies stay possible.
double equivalent_excess_noise_general(double V_B, double g, double T_A,
                                       double T_B, double eps_A, double eps_B);

// Collapse the two-span relay link into the effective one-way channel.
// Throws domain_error for an infinitely lossy Alice span (T_A underflows to
// zero) and for parameter corners where the normalized T would exceed 1.
EffectiveChannel effective_channel(const LinkParams& link);

} // namespace cvmdi
