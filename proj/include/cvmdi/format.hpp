#pragma once

// Deterministic numeric formatting shared by the CLI and the tests. Every
// run of the same command must produce byte-identical output, so all float
// rendering funnels through format_value.

#include <string>
#include <vector>

namespace cvmdi {

// 9 significant digits. Exact zero renders as "0"; magnitudes below 1e-4
// switch to scientific notation so tiny rates keep their digits; inf/nan
// render by name.
std::string format_value(double x);

// Comma-joined row of formatted values.
std::string csv_row(const std::vector<double>& values);

} // namespace cvmdi
