#pragma once

#include <stdexcept>
#include <string>

namespace cvmdi {

// Inputs outside the model's domain: bad parameter ranges, degenerate
// configurations (zero heralding probability, unit-variance EPR source),
// infinite-loss links. CLI maps these to exit code 2.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A computed covariance or eigenvalue broke the vacuum floor by more than
// the rounding tolerance. Distinguished from domain_error only to make the
// diagnostic unambiguous; CLI also maps it to exit code 2.
class physicality_error : public domain_error {
public:
    explicit physicality_error(const std::string& what) : domain_error(what) {}
};

// A demanded value does not exist: the key rate is nonpositive over the whole
// search region, or a root cannot be bracketed. CLI maps to exit code 3.
class no_key_error : public std::runtime_error {
public:
    explicit no_key_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cvmdi
