#include "cvmdi/fock_oracle.hpp"

#include "cvmdi/errors.hpp"
#include "cvmdi/source.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvmdi {

namespace {

// Amplitude of |n>|n-k> in log space. Binomials go through lgamma so photon
// numbers in the hundreds neither overflow nor lose the leading digits.
double log_amplitude(double x2, double T, int k, int n) {
    double ld = 0.5 * std::log1p(-x2) + 0.5 * n * std::log(x2);
    ld += 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                 std::lgamma(n - k + 1.0));
    if (k > 0) {
        ld += 0.5 * k * std::log1p(-T);
    }
    if (n > k) {
        ld += 0.5 * (n - k) * std::log(T);
    }
    return ld;
}

// One rung of the ladder algebra: op maps |nA, nB> onto
// coeff * |nA + da, nB + db> with the usual sqrt factors.
struct Ladder {
    int da;
    int db;
};

double ladder_coeff(const Ladder& op, int nA, int nB) {
    double c = 1.0;
    c *= (op.da < 0) ? std::sqrt(static_cast<double>(nA))
                     : std::sqrt(static_cast<double>(nA + 1));
    c *= (op.db < 0) ? std::sqrt(static_cast<double>(nB))
                     : std::sqrt(static_cast<double>(nB + 1));
    return c;
}

// Brute-force expectation of a two-mode ladder product over the truncated
// state, with the overlap deltas evaluated literally. Deliberately generic
// and quadratic: this is the oracle side of the comparison, so it must not
// reuse the selection rules the closed forms rely on.
double ladder_expectation(const TruncatedBipartiteState& s, const Ladder& op) {
    const int k = s.k;
    const int n_lo = k;
    const int count = static_cast<int>(s.coeffs.size());
    double acc = 0.0;
    for (int mi = 0; mi < count; ++mi) {
        const int m = n_lo + mi;
        for (int ni = 0; ni < count; ++ni) {
            const int n = n_lo + ni;
            if (m != n + op.da || (m - k) != (n - k) + op.db) {
                continue;
            }
            acc += s.coeffs[mi] * s.coeffs[ni] * ladder_coeff(op, n, n - k);
        }
    }
    return acc;
}

// Single-mode first moments, same brute-force style.
double single_ladder_expectation(const TruncatedBipartiteState& s, int da,
                                 int db) {
    return ladder_expectation(s, Ladder{da, db});
}

} // namespace

TruncatedBipartiteState build_projected_state(double V, double T_PS, int k,
                                              double tol, int n_cap) {
    if (!(V >= 1.0) || !std::isfinite(V)) {
        std::ostringstream os;
        os << "oracle: variance V = " << V << " must be finite and >= 1";
        throw domain_error(os.str());
    }
    if (k < 0) {
        throw domain_error("oracle: photon number k must be >= 0");
    }
    if (!(T_PS > 0.0) || !(T_PS <= 1.0) || (T_PS == 1.0 && k > 0)) {
        std::ostringstream os;
        os << "oracle: T_PS = " << T_PS << " with k = " << k
           << " is outside (0, 1) (T_PS = 1 is allowed only for k = 0)";
        throw domain_error(os.str());
    }
    if (!(tol > 0.0)) {
        throw domain_error("oracle: truncation tolerance must be positive");
    }

    const double x2 = xi_squared(V);

    TruncatedBipartiteState s;
    s.V = V;
    s.T_PS = T_PS;
    s.k = k;

    if (x2 == 0.0) {
        // Vacuum source: the expansion has the single term n = k, and that
        // term survives only for k = 0.
        s.N_max = k;
        s.tail_bound = 0.0;
        s.coeffs.assign(1, k == 0 ? 1.0 : 0.0);
        return s;
    }

    // Smallest N with x2^(N+1) < tol. Solve in logs, then nudge by direct
    // evaluation so the boundary case does not depend on rounding of the
    // division.
    int N = static_cast<int>(std::floor(std::log(tol) / std::log(x2)));
    N = std::max(N - 1, 0);
    while (std::pow(x2, N + 1.0) >= tol) {
        ++N;
        if (N > n_cap + 1) {
            break;
        }
    }
    // The projected expansion starts at n = k and is renormalized by a
    // success probability of order xi^(2k), so the relative accuracy of the
    // moments is governed by xi^(2(N+1-k)), not by the bare tail alone.
    // Shifting the kept range by k restores the full budget; for k = 0 the
    // rule above is unchanged.
    N += k;
    if (N > n_cap) {
        std::ostringstream os;
        os << "oracle: honoring tol = " << tol << " at V = " << V
           << " needs N_max = " << N << " > cap " << n_cap
           << "; loosen the tolerance or raise the cap";
        throw domain_error(os.str());
    }

    s.N_max = N;
    s.tail_bound = std::pow(x2, N + 1.0);
    s.coeffs.resize(N - k + 1);
    for (int n = k; n <= N; ++n) {
        s.coeffs[n - k] = std::exp(log_amplitude(x2, T_PS, k, n));
    }
    return s;
}

OracleMoments oracle_moments(const TruncatedBipartiteState& s) {
    const int k = s.k;
    const int count = static_cast<int>(s.coeffs.size());

    // Diagonal moments in one linear pass over |d_n|^2.
    double P = 0.0, sumX = 0.0, sumY = 0.0, sumZ = 0.0;
    for (int i = 0; i < count; ++i) {
        const int n = k + i;
        const double w = s.coeffs[i] * s.coeffs[i];
        P += w;
        sumX += w * (2.0 * n + 1.0);
        sumY += w * (2.0 * (n - k) + 1.0);
    }
    for (int i = 0; i + 1 < count; ++i) {
        const int n = k + i;
        sumZ += s.coeffs[i] * s.coeffs[i + 1] *
                std::sqrt((n + 1.0) * (n + 1.0 - k));
    }

    if (!(P > 0.0) || P < 10.0 * s.tail_bound) {
        std::ostringstream os;
        os << "oracle: success probability " << P
           << " is not resolvable above the truncation tail bound "
           << s.tail_bound;
        throw domain_error(os.str());
    }

    OracleMoments m;
    m.P = P;
    m.X = sumX / P;
    m.Y = sumY / P;
    m.Z = 2.0 * sumZ / P;

    // Independent cross-moment audit. The four quadrature cross moments are
    // rebuilt from generic ladder expectations; the off-diagonal structure
    // (vanishing first moments and x_A p_B terms, p_A p_B = -x_A x_B) is a
    // property of the state that the standard form assumes, so check it.
    const double e_ab = ladder_expectation(s, {-1, -1});
    const double e_abd = ladder_expectation(s, {-1, +1});
    const double e_adb = ladder_expectation(s, {+1, -1});
    const double e_adbd = ladder_expectation(s, {+1, +1});
    const double e_a = single_ladder_expectation(s, -1, 0);
    const double e_b = single_ladder_expectation(s, 0, -1);

    const double xx = (e_ab + e_abd + e_adb + e_adbd) / P;
    const double pp = -(e_ab - e_abd - e_adb + e_adbd) / P;
    // x_A p_B and p_A x_B carry a factor -i; their real combinations below
    // must vanish for the expectations to be real at all.
    const double xp = (e_ab - e_abd + e_adb - e_adbd) / P;
    const double px = (e_ab + e_abd - e_adb - e_adbd) / P;

    const double scale = std::max(1.0, std::abs(m.Z));
    const double audit_tol = 1e-10 * scale;
    if (std::abs(e_a) > audit_tol || std::abs(e_b) > audit_tol ||
        std::abs(xp) > audit_tol || std::abs(px) > audit_tol ||
        std::abs(pp + m.Z) > audit_tol || std::abs(xx - m.Z) > audit_tol) {
        std::ostringstream os;
        os << "oracle: cross-moment audit failed (xx=" << xx << ", pp=" << pp
           << ", xp=" << xp << ", px=" << px << ", Z=" << m.Z
           << "); the truncated state is not in standard form";
        throw physicality_error(os.str());
    }

    return m;
}

ValidationReport validate_against_analytic(double V, double T_PS, int k,
                                           double tol) {
    const TruncatedBipartiteState s = build_projected_state(V, T_PS, k);
    const OracleMoments o = oracle_moments(s);
    const SubtractedSource a = subtracted_covariance({V, k, T_PS});

    auto rel = [](double oracle, double closed) {
        return std::abs(oracle - closed) /
               std::max(std::abs(closed), 1e-300);
    };

    ValidationReport r;
    r.err_P = rel(o.P, a.P);
    r.err_X = rel(o.X, a.X);
    r.err_Y = rel(o.Y, a.Y);
    r.err_Z = rel(o.Z, a.Z);
    r.max_err = std::max({r.err_P, r.err_X, r.err_Y, r.err_Z});
    r.pass = r.max_err <= tol;
    return r;
}

} // namespace cvmdi
