#include "qmon/eigen_solver.hpp"

#include "qmon/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmon {

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXcd& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    if (matrix.rows() > kMaxEigenDimension) {
        throw std::invalid_argument("eigenvalues: dimension " + std::to_string(matrix.rows()) +
                                    " exceeds " + std::to_string(kMaxEigenDimension));
    }
    if (matrix.rows() == 0) {
        return {};
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(matrix.rows());
    schur.compute(matrix, /*computeU=*/false);

    const auto& tri = schur.matrixT();
    std::vector<std::complex<double>> values(static_cast<std::size_t>(tri.rows()));
    for (Eigen::Index i = 0; i < tri.rows(); ++i) {
        values[static_cast<std::size_t>(i)] = tri(i, i);
    }
    if (schur.info() != Eigen::Success) {
        throw ConvergenceError("eigenvalues: shifted QR did not converge", std::move(values));
    }
    return values;
}

double eigenvalue_residual(const Eigen::MatrixXcd& matrix, std::complex<double> lambda,
                           int iterations) {
    const Eigen::Index d = matrix.rows();
    const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1.0);
    // Nudge off the eigenvalue so the shifted matrix stays invertible.
    const std::complex<double> shift =
        lambda + std::complex<double>(1e-14 * scale, 1e-14 * scale);
    const Eigen::MatrixXcd shifted = matrix - shift * Eigen::MatrixXcd::Identity(d, d);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);

    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(d) / std::sqrt(static_cast<double>(d));
    const Eigen::MatrixXcd exact = matrix - lambda * Eigen::MatrixXcd::Identity(d, d);
    double best = (exact * v).norm();
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd next = lu.solve(v);
        const double nrm = next.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) {
            break;
        }
        v = next / nrm;
        best = std::min(best, (exact * v).norm());
    }
    return best;
}

double spectral_radius(const std::vector<std::complex<double>>& values) {
    double r = 0.0;
    for (const auto& z : values) {
        r = std::max(r, std::abs(z));
    }
    return r;
}

} // namespace qmon
