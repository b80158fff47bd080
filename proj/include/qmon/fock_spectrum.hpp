// fock_spectrum.hpp - spectrum and spectral weights of N bosons in a tunneling double well
//
// Fock basis |n, N-n> (n bosons in the left well), energy basis |E_k>, k = 0..N.
// The dimensionless eigenphase of level k is e_k = -theta (N - 2k) with theta = J tau / hbar,
// and q(n, k) = <n, N-n | E_k> is real.

#pragma once

#include <Eigen/Dense>

namespace qmon {

inline constexpr int kMaxBosons = 1024;

struct SystemConfig {
    int n_bosons{1};
    double theta{0.0};

    // Throws std::invalid_argument on n_bosons < 1 or non-finite theta.
    void validate() const;
    int dim() const noexcept { return n_bosons + 1; }
};

struct Spectrum {
    SystemConfig config;
    Eigen::VectorXd eigenphases;  // e_k, length N+1
    Eigen::MatrixXd weights;      // q(n, k), (N+1) x (N+1)

    int n_bosons() const noexcept { return config.n_bosons; }
    int dim() const noexcept { return config.n_bosons + 1; }
    double q(int n, int k) const { return weights(n, k); }
};

// e_k = -theta (N - 2k), k = 0..N.
Eigen::VectorXd eigenphases(const SystemConfig& config);

// Closed form of the edge rows: q(0, k) carries the sign (-1)^(N-k), q(N, k) does not.
// Binomial prefactor is evaluated through log-gamma.
double edge_weight(int n_bosons, int k, bool top_row);

// Spectral weight matrix q(n, k), computed column by column from the three-term
// recurrence of the tunneling matrix, anchored at both closed-form edge rows.
// Throws std::invalid_argument for n_bosons outside [1, kMaxBosons] and
// NumericalError when the orthonormality residual exceeds 1e-9.
Eigen::MatrixXd spectral_weights(int n_bosons);
Eigen::MatrixXd spectral_weights(const SystemConfig& config);

// max over both orthonormality sums of |sum - delta|.
double orthonormality_residual(const Eigen::MatrixXd& weights);

// Tridiagonal tunneling operator (a_l^+ a_r + a_r^+ a_l) in the Fock basis,
// coupling sqrt((n+1)(N-n)) between n and n+1. Column k of the weight matrix is its
// eigenvector with eigenvalue 2k - N, i.e. theta times that is the eigenphase e_k.
Eigen::MatrixXd tunneling_matrix(int n_bosons);

Spectrum make_spectrum(const SystemConfig& config);

} // namespace qmon
