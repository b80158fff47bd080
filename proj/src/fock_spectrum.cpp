#include "qmon/fock_spectrum.hpp"

#include "qmon/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmon {

namespace {

constexpr double kOrthonormalityLimit = 1e-9;

// sqrt((n+1)(N-n)), the hopping between Fock sites n and n+1.
double hopping(int n_bosons, int n) {
    return std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n_bosons - n));
}

void check_size(int n_bosons) {
    if (n_bosons < 1 || n_bosons > kMaxBosons) {
        throw std::invalid_argument("spectral_weights: boson count must lie in [1, " +
                                    std::to_string(kMaxBosons) + "], got " +
                                    std::to_string(n_bosons));
    }
}

} // namespace

void SystemConfig::validate() const {
    if (n_bosons < 1) {
        throw std::invalid_argument("SystemConfig: n_bosons must be >= 1, got " +
                                    std::to_string(n_bosons));
    }
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("SystemConfig: theta must be finite");
    }
}

Eigen::VectorXd eigenphases(const SystemConfig& config) {
    config.validate();
    const int N = config.n_bosons;
    Eigen::VectorXd e(N + 1);
    for (int k = 0; k <= N; ++k) {
        e(k) = -config.theta * static_cast<double>(N - 2 * k);
    }
    return e;
}

double edge_weight(int n_bosons, int k, bool top_row) {
    const double N = n_bosons;
    const double log_mag = 0.5 * (std::lgamma(N + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(N - k + 1.0)) -
                           0.5 * N * std::log(2.0);
    const double mag = std::exp(log_mag);
    if (top_row) {
        return mag;
    }
    return ((n_bosons - k) % 2 == 0) ? mag : -mag;
}

Eigen::MatrixXd spectral_weights(int n_bosons) {
    check_size(n_bosons);
    const int N = n_bosons;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(N + 1, N + 1);

    // Each column solves  h(n-1) q(n-1) + h(n) q(n+1) = (2k - N) q(n).
    // Both edges lie in the decaying region of the eigenvector, so recurring
    // inward from each end only ever follows the growing solution.
    const int mid = N / 2;
    for (int k = 0; k <= N; ++k) {
        const double lambda = 2.0 * k - N;

        q(0, k) = edge_weight(N, k, false);
        double prev = 0.0;
        for (int n = 0; n < mid; ++n) {
            const double back = (n > 0) ? hopping(N, n - 1) * prev : 0.0;
            const double next = (lambda * q(n, k) - back) / hopping(N, n);
            prev = q(n, k);
            q(n + 1, k) = next;
        }

        q(N, k) = edge_weight(N, k, true);
        prev = 0.0;
        for (int n = N; n > mid + 1; --n) {
            const double fwd = (n < N) ? hopping(N, n) * prev : 0.0;
            const double next = (lambda * q(n, k) - fwd) / hopping(N, n - 1);
            prev = q(n, k);
            q(n - 1, k) = next;
        }

        q.col(k) /= q.col(k).norm();
    }

    const double residual = orthonormality_residual(q);
    if (!(residual <= kOrthonormalityLimit)) {
        throw NumericalError("spectral_weights: loss of orthonormality at N = " +
                             std::to_string(N) + " (residual " + std::to_string(residual) +
                             ")");
    }
    return q;
}

Eigen::MatrixXd spectral_weights(const SystemConfig& config) {
    config.validate();
    return spectral_weights(config.n_bosons);
}

double orthonormality_residual(const Eigen::MatrixXd& weights) {
    const Eigen::Index d = weights.rows();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const double by_level = (weights.transpose() * weights - identity).cwiseAbs().maxCoeff();
    const double by_site = (weights * weights.transpose() - identity).cwiseAbs().maxCoeff();
    return std::max(by_level, by_site);
}

Eigen::MatrixXd tunneling_matrix(int n_bosons) {
    check_size(n_bosons);
    const int N = n_bosons;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 0; n < N; ++n) {
        h(n, n + 1) = hopping(N, n);
        h(n + 1, n) = hopping(N, n);
    }
    return h;
}

Spectrum make_spectrum(const SystemConfig& config) {
    config.validate();
    return Spectrum{config, eigenphases(config), spectral_weights(config.n_bosons)};
}

} // namespace qmon
