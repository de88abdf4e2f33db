#include "cvmdi/keyrate.hpp"

#include "cvmdi/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cvmdi {

void validate_config(const ProtocolConfig& cfg) {
    if (!(cfg.beta >= 0.0) || !(cfg.beta <= 1.0)) {
        std::ostringstream os;
        os << "config: reconciliation efficiency beta = " << cfg.beta
           << " must lie in [0, 1]";
        throw domain_error(os.str());
    }
    if (cfg.link.V_B != cfg.src.V) {
        std::ostringstream os;
        os << "config: the protocol uses one modulation variance on both "
              "sides, but src.V = "
           << cfg.src.V << " while link.V_B = " << cfg.link.V_B;
        throw domain_error(os.str());
    }
}

BipartiteCovariance conditioned_covariance(const ProtocolConfig& cfg) {
    validate_config(cfg);
    const SubtractedSource src = subtracted_covariance(cfg.src);
    const EffectiveChannel ch = effective_channel(cfg.link);

    BipartiteCovariance cov;
    cov.a = src.X;
    cov.b = ch.T * (src.Y + ch.chi_t);
    cov.c = std::sqrt(ch.T) * src.Z;
    require_physical(cov);
    return cov;
}

double mutual_information(const BipartiteCovariance& cov) {
    const double denom = cov.a + 1.0 - cov.c * cov.c / (cov.b + 1.0);
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "mutual_information: conditional variance " << denom
           << " is nonpositive, covariance is unphysical";
        throw physicality_error(os.str());
    }
    // Per heterodyned quadrature pair; both quadratures contribute equally
    // for standard-form states, hence the single log.
    return std::log2((cov.a + 1.0) / denom);
}

double holevo_bound(const BipartiteCovariance& cov) {
    const SymplecticPair joint = symplectic_pair(cov);
    const double l3 = conditional_eigenvalue(cov);
    double chi = entropy_G((joint.lambda1 - 1.0) / 2.0) +
                 entropy_G((joint.lambda2 - 1.0) / 2.0) -
                 entropy_G((l3 - 1.0) / 2.0);
    if (chi < 0.0) {
        if (chi < -k_physicality_tol) {
            std::ostringstream os;
            os << "holevo_bound: chi = " << chi
               << " is negative beyond rounding";
            throw physicality_error(os.str());
        }
        chi = 0.0;
    }
    return chi;
}

RateReport secret_key_rate(const ProtocolConfig& cfg) {
    RateReport r;
    r.P = success_probability(cfg.src);
    r.cov = conditioned_covariance(cfg);
    r.I_AB = mutual_information(r.cov);

    const SymplecticPair joint = symplectic_pair(r.cov);
    r.lambda1 = joint.lambda1;
    r.lambda2 = joint.lambda2;
    r.lambda3 = conditional_eigenvalue(r.cov);
    r.chi_BE = holevo_bound(r.cov);

    r.K_raw = r.P * (cfg.beta * r.I_AB - r.chi_BE);
    r.K = std::max(r.K_raw, 0.0);
    return r;
}

double plob_bound(double L_AB_km, double loss_coeff) {
    const double T = transmittance(L_AB_km, loss_coeff);
    if (T >= 1.0) {
        // Lossless line: the bound diverges, signal that with the sentinel
        // rather than a huge finite number.
        return std::numeric_limits<double>::infinity();
    }
    return -std::log2(1.0 - T);
}

} // namespace cvmdi
