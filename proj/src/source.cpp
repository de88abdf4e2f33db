#include "cvmdi/source.hpp"

#include "cvmdi/errors.hpp"

#include <cmath>
#include <sstream>

namespace cvmdi {

namespace {

void validate(const SourceParams& src) {
    if (!(src.V >= 1.0) || !std::isfinite(src.V)) {
        std::ostringstream os;
        os << "source: variance V = " << src.V << " must be finite and >= 1";
        throw domain_error(os.str());
    }
    if (src.k < 0) {
        std::ostringstream os;
        os << "source: photon number k = " << src.k << " must be >= 0";
        throw domain_error(os.str());
    }
    if (!(src.T_PS > 0.0) || !(src.T_PS <= 1.0)) {
        std::ostringstream os;
        os << "source: T_PS = " << src.T_PS << " must lie in (0, 1]";
        throw domain_error(os.str());
    }
}

} // namespace

double xi_squared(double V) {
    if (!(V >= 1.0)) {
        std::ostringstream os;
        os << "xi: variance V = " << V << " must be >= 1";
        throw domain_error(os.str());
    }
    return (V - 1.0) / (V + 1.0);
}

double xi(double V) { return std::sqrt(xi_squared(V)); }

double success_probability(const SourceParams& src) {
    validate(src);
    if (src.k == 0 && src.T_PS == 1.0) {
        return 1.0; // passthrough: nothing is measured, the herald is certain
    }
    const double x2 = xi_squared(src.V);
    const double T = src.T_PS;
    const double denom = 1.0 - x2 * T;
    return (1.0 - x2) * std::pow(x2, src.k) * std::pow(1.0 - T, src.k) /
           std::pow(denom, src.k + 1);
}

SubtractedSource subtracted_covariance(const SourceParams& src) {
    validate(src);
    if (src.k == 0 && src.T_PS == 1.0) {
        // Untouched EPR state, returned exactly rather than through the
        // generic formulas so the baseline protocol has no rounding of its
        // own.
        const double V = src.V;
        return {1.0, V, V, std::sqrt(V * V - 1.0)};
    }

    const double P = success_probability(src);
    if (!(P > 0.0)) {
        std::ostringstream os;
        os << "source: the " << src.k << "-photon herald at V = " << src.V
           << ", T_PS = " << src.T_PS
           << " has zero probability, the conditional state is undefined";
        throw domain_error(os.str());
    }

    const double x2 = xi_squared(src.V);
    const double T = src.T_PS;
    const double denom = 1.0 - x2 * T;
    const double k = static_cast<double>(src.k);

    // Standard-form covariance of the heralded state. The cross moment of
    // x = a + a^dag carries the same (1+k)/(1 - xi^2 T) enhancement as X and
    // reduces to sqrt(V^2 - 1) at the k = 0, T_PS = 1 passthrough.
    const double X = 2.0 * (1.0 + k) / denom - 1.0;
    const double Y = 2.0 * (1.0 + k * x2 * T) / denom - 1.0;
    const double Z = 2.0 * std::sqrt(T) * xi(src.V) * (1.0 + k) / denom;
    return {P, X, Y, Z};
}

double optimal_T_PS(double V, int k) {
    if (k < 1) {
        std::ostringstream os;
        os << "optimal_T_PS: k = " << k
           << " has no subtraction to tune, need k >= 1";
        throw domain_error(os.str());
    }
    const double x2 = xi_squared(V);
    const double kk = static_cast<double>(k);
    // dP/dT vanishes at T* = (k+1) - k/xi^2; interior only when
    // (k+1) xi^2 > k, i.e. V > 2k+1. Below that P increases monotonically
    // toward the degenerate T_PS -> 0 boundary, where the herald succeeds
    // only because everything is thrown away.
    if (!((kk + 1.0) * x2 > kk)) {
        std::ostringstream os;
        os << "optimal_T_PS: no interior maximum for V = " << V
           << ", k = " << k << " (requires V > " << (2 * k + 1)
           << "); P is maximized only in the degenerate T_PS -> 0 limit";
        throw domain_error(os.str());
    }
    return (kk + 1.0) - kk / x2;
}

} // namespace cvmdi
