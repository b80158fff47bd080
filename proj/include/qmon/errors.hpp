// errors.hpp - exception types shared by the qmon library

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmon {

// Raised when a computation loses the accuracy its contract promises
// (orthonormality breakdown, pole proximity, exhausted detection).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative routine hit its cap. Carries whatever was computed so far.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<std::complex<double>> partial)
        : NumericalError(what), partial_(std::move(partial)) {}

    const std::vector<std::complex<double>>& partial() const noexcept { return partial_; }

private:
    std::vector<std::complex<double>> partial_;
};

} // namespace qmon
