#include "cvmdi/gaussian.hpp"

#include "cvmdi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvmdi {

namespace {

std::string describe(const BipartiteCovariance& cov) {
    std::ostringstream os;
    os << "(a=" << cov.a << ", b=" << cov.b << ", c=" << cov.c << ")";
    return os.str();
}

} // namespace

double entropy_G(double x) {
    if (x < -k_physicality_tol) {
        std::ostringstream os;
        os << "entropy_G: mean photon number " << x << " below zero";
        throw domain_error(os.str());
    }
    if (x <= 0.0) {
        return 0.0; // clamp the rounding band (-tol, 0] onto the exact limit
    }
    // (x+1) log2(x+1) via log1p keeps full precision for x near 0, where the
    // naive form loses digits to the 1 + x addition.
    return (x + 1.0) * (std::log1p(x) / M_LN2) - x * std::log2(x);
}

SymplecticPair symplectic_pair(const BipartiteCovariance& cov) {
    const double a = cov.a, b = cov.b, c = cov.c;
    const double A = a * a + b * b - 2.0 * c * c;
    const double B = a * b - c * c;

    // A^2 - 4B^2 factors as (A-2B)(A+2B) = (a-b)^2 ((a+b)^2 - 4c^2). The
    // factored form avoids the catastrophic cancellation the squared form
    // suffers when the two eigenvalues nearly coincide (pure EPR states).
    const double sum_part = (a + b) * (a + b) - 4.0 * c * c;
    double disc = (a - b) * (a - b) * sum_part;
    const double scale = std::max(1.0, A * A);
    if (disc < 0.0) {
        if (disc < -k_physicality_tol * scale) {
            throw physicality_error(
                "symplectic_pair: negative discriminant for covariance " +
                describe(cov) + ", state is not of physical standard form");
        }
        disc = 0.0;
    }

    const double root = std::sqrt(disc);
    double l1 = std::sqrt(std::max(0.0, (A + root) / 2.0));
    // l1^2 l2^2 = B^2, so recover l2 from the product rather than from
    // (A - root)/2, which cancels badly when the eigenvalues are far apart.
    double l2 = l1 > 0.0 ? std::abs(B) / l1 : 0.0;

    // Clamp rounding dips below the vacuum floor; reject real violations.
    for (double* l : {&l1, &l2}) {
        if (*l < 1.0) {
            if (*l < 1.0 - k_physicality_tol) {
                std::ostringstream os;
                os << "symplectic_pair: eigenvalue " << *l
                   << " below the vacuum floor for covariance "
                   << describe(cov);
                throw physicality_error(os.str());
            }
            *l = 1.0;
        }
    }
    return {l1, l2};
}

double conditional_eigenvalue(const BipartiteCovariance& cov) {
    // Heterodyning mode B mixes in one vacuum unit, hence b + 1.
    double l3 = cov.a - cov.c * cov.c / (cov.b + 1.0);
    if (l3 < 1.0) {
        if (l3 < 1.0 - k_physicality_tol) {
            std::ostringstream os;
            os << "conditional_eigenvalue: " << l3
               << " below the vacuum floor for covariance " << describe(cov);
            throw physicality_error(os.str());
        }
        l3 = 1.0;
    }
    return l3;
}

bool is_physical(const BipartiteCovariance& cov) {
    if (cov.a < 1.0 - k_physicality_tol || cov.b < 1.0 - k_physicality_tol) {
        return false;
    }
    try {
        symplectic_pair(cov);
    } catch (const physicality_error&) {
        return false;
    }
    return true;
}

void require_physical(const BipartiteCovariance& cov) {
    if (cov.a < 1.0 - k_physicality_tol || cov.b < 1.0 - k_physicality_tol) {
        throw physicality_error(
            "covariance " + describe(cov) +
            " has a mode variance below the vacuum floor");
    }
    symplectic_pair(cov); // throws with its own diagnostic if unphysical
}

} // namespace cvmdi
