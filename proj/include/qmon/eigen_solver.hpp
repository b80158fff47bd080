// eigen_solver.hpp - eigenvalues of dense, general complex matrices

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qmon {

inline constexpr int kMaxEigenDimension = 2048;

// All eigenvalues of a square complex matrix (Hessenberg reduction + shifted QR).
// Throws std::invalid_argument for non-square input or dimension above
// kMaxEigenDimension, ConvergenceError (with the partial Schur diagonal) when the
// QR iteration does not converge.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXcd& matrix);

// Estimate of min_{|v|=1} |(A - lambda) v| by inverse iteration.
double eigenvalue_residual(const Eigen::MatrixXcd& matrix, std::complex<double> lambda,
                           int iterations = 4);

double spectral_radius(const std::vector<std::complex<double>>& values);

} // namespace qmon
