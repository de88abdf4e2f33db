#include "cvmdi/channel.hpp"

#include "cvmdi/errors.hpp"

#include <cmath>
#include <sstream>

namespace cvmdi {

namespace {

void validate(const LinkParams& link) {
    if (!(link.L_AC >= 0.0) || !(link.L_BC >= 0.0)) {
        throw domain_error("link: fiber lengths must be >= 0");
    }
    if (!(link.loss_coeff >= 0.0)) {
        throw domain_error("link: loss coefficient must be >= 0");
    }
    if (!(link.eps_A >= 0.0) || !(link.eps_B >= 0.0)) {
        throw domain_error("link: excess noise must be >= 0");
    }
    if (!(link.eta > 0.0) || !(link.eta <= 1.0)) {
        std::ostringstream os;
        os << "link: detector efficiency eta = " << link.eta
           << " must lie in (0, 1]";
        throw domain_error(os.str());
    }
    if (!(link.v_el >= 0.0)) {
        throw domain_error("link: electronic noise must be >= 0");
    }
    if (!(link.V_B >= 1.0)) {
        std::ostringstream os;
        os << "link: V_B = " << link.V_B << " must be >= 1";
        throw domain_error(os.str());
    }
}

} // namespace

double transmittance(double L_km, double loss_coeff) {
    if (!(L_km >= 0.0)) {
        std::ostringstream os;
        os << "transmittance: length " << L_km << " km must be >= 0";
        throw domain_error(os.str());
    }
    return std::pow(10.0, -loss_coeff * L_km / 10.0);
}

double displacement_gain_sq(double V_B, double T_B) {
    if (!(T_B > 0.0)) {
        throw domain_error("displacement gain: T_B must be > 0");
    }
    if (!(V_B > 1.0)) {
        std::ostringstream os;
        os << "displacement gain: V_B = " << V_B
           << " carries no modulation (g = 0), no key is possible";
        throw domain_error(os.str());
    }
    return 2.0 * (V_B - 1.0) / (T_B * (V_B + 1.0));
}

double equivalent_excess_noise_general(double V_B, double g, double T_A,
                                       double T_B, double eps_A,
                                       double eps_B) {
    if (!(T_A > 0.0) || !(T_B > 0.0)) {
        throw domain_error("equivalent noise: span transmittances must be > 0");
    }
    if (!(g > 0.0) || !(V_B >= 1.0)) {
        throw domain_error("equivalent noise: need g > 0 and V_B >= 1");
    }
    const double chi_A = 1.0 / T_A - 1.0 + eps_A;
    const double chi_B = 1.0 / T_B - 1.0 + eps_B;
    // Gain-mismatch penalty: zero only in the V_B -> infinity limit, and
    // minimized (not cancelled) by the optimal gain at finite V_B.
    const double mism = std::sqrt(2.0 / (T_B * g * g)) * std::sqrt(V_B - 1.0) -
                        std::sqrt(V_B + 1.0);
    return (T_B / T_A) * mism * mism + (T_B / T_A) * (chi_B - 1.0) + 1.0 +
           chi_A;
}

EffectiveChannel effective_channel(const LinkParams& link) {
    validate(link);

    EffectiveChannel ch;
    ch.T_A = transmittance(link.L_AC, link.loss_coeff);
    ch.T_B = transmittance(link.L_BC, link.loss_coeff);
    if (ch.T_A <= 0.0) {
        std::ostringstream os;
        os << "link: the Alice span (" << link.L_AC
           << " km) is infinitely lossy, T_A underflowed to 0";
        throw domain_error(os.str());
    }

    ch.g_sq = displacement_gain_sq(link.V_B, ch.T_B);
    ch.T = ch.T_A * ch.g_sq / 2.0;
    if (ch.T > 1.0) {
        std::ostringstream os;
        os << "link: effective transmittance T = " << ch.T
           << " exceeds 1 (relay gain overcompensates the Alice span); "
              "this corner of parameter space is outside the one-way "
              "channel reduction";
        throw domain_error(os.str());
    }

    // At the optimal gain the general expression collapses to
    // eps_th = (T_B/T_A)(eps_B - 2) + eps_A + 2/T_A; evaluate the closed
    // form, it is exactly the minimum of the general one.
    ch.eps_th = (ch.T_B / ch.T_A) * (link.eps_B - 2.0) + link.eps_A +
                2.0 / ch.T_A;

    ch.chi_line = (1.0 - ch.T) / ch.T + ch.eps_th;
    ch.chi_hom = (link.v_el + 1.0 - link.eta) / link.eta;
    ch.chi_t = ch.chi_line + 2.0 * ch.chi_hom / ch.T;
    return ch;
}

} // namespace cvmdi
