#include "cvmdi/format.hpp"

#include <cmath>
#include <cstdio>

namespace cvmdi {

std::string format_value(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0.0) {
        return "0";
    }
    char buf[40];
    if (std::abs(x) < 1e-4) {
        // Small rates would round to a digitless "0.0001"-style string under
        // %g at this precision; force the exponent form instead.
        std::snprintf(buf, sizeof buf, "%.8e", x);
    } else {
        std::snprintf(buf, sizeof buf, "%.9g", x);
    }
    return buf;
}

std::string csv_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            line += ',';
        }
        line += format_value(values[i]);
    }
    return line;
}

} // namespace cvmdi
