// evolution.hpp - unitary and monitored evolution of the double-well boson system
//
// The monitored protocol: start in |0,N>, evolve one step with U = exp(-i H tau),
// record the overlap with the detection state |n,N-n>, project that state out
// (Pi_n = 1 - |n,N-n><n,N-n|) and repeat. The recorded overlaps phi(m; n) are the
// first-detected return (n = 0) and transition (n > 0) amplitudes.

#pragma once

#include "qmon/fock_spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string_view>

namespace qmon {

using cd = std::complex<double>;

struct PhaseDiagonal {
    Eigen::VectorXcd entries;       // D_k = exp(-i e_k)
    Eigen::VectorXcd half_entries;  // exp(-i e_k / 2), principal branch on the unwrapped phase

    static PhaseDiagonal from(const Spectrum& spec);
};

// T_n = D^{1/2} (1 - q_n q_n^T) D^{1/2} in the energy basis.
struct MonitoredOperator {
    int detect_site{0};
    Eigen::MatrixXcd matrix;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix * v; }
};

enum class AmplitudeMethod { oracle, matrix_power, renewal, cauchy };

std::string_view to_string(AmplitudeMethod method);
AmplitudeMethod parse_amplitude_method(std::string_view name);

// phi(m; n) for m = 1..max_m (row m-1) and every detection site n (column n).
// Each column comes from its own protocol with projector Pi_n.
class AmplitudeTable {
public:
    AmplitudeTable(int n_bosons, int max_m, AmplitudeMethod method);

    int max_m() const noexcept { return max_m_; }
    int n_bosons() const noexcept { return n_bosons_; }
    AmplitudeMethod method() const noexcept { return method_; }

    cd at(int m, int n) const { return amplitudes_(m - 1, n); }
    void set_column(int n, const Eigen::VectorXcd& column);

    // sum_n |phi(m; n)|^2
    double detection_norm(int m) const;

    const Eigen::MatrixXcd& amplitudes() const noexcept { return amplitudes_; }

private:
    int n_bosons_;
    int max_m_;
    AmplitudeMethod method_;
    Eigen::MatrixXcd amplitudes_;
};

// <n,N-n| exp(-i H m tau) |0,N> as the spectral sum  sum_k q(n,k) q(0,k) exp(-i e_k m).
cd unitary_amplitude(const Spectrum& spec, int n, int m);

struct GaussianDecay {
    double exact;     // |cos^N(m theta)|
    double gaussian;  // exp(-N m^2 theta^2 / 2)

    double relative_deviation() const;
};

// Short-time (Zeno) decay of the return amplitude against its Gaussian approximation.
GaussianDecay gaussian_decay_check(const SystemConfig& config, int m);

MonitoredOperator monitored_operator(const Spectrum& spec, const PhaseDiagonal& phases,
                                     int n_detect);

// phi(m; n_detect), m = 1..max_m, as  q_n^T D^{1/2} T_n^{m-1} D^{1/2} q_0, with
// T_n applied to a running vector (no explicit matrix powers).
Eigen::VectorXcd amplitudes_matrix_power(const Spectrum& spec, const PhaseDiagonal& phases,
                                         int n_detect, int max_m);

// The protocol itself, simulated literally in the energy basis. Ground truth for the
// other amplitude routes.
Eigen::VectorXcd direct_oracle(const Spectrum& spec, const PhaseDiagonal& phases, int n_detect,
                               int max_m);

// Full table over all detection sites using the oracle or matrix-power route.
AmplitudeTable amplitude_table(const Spectrum& spec, int max_m,
                               AmplitudeMethod method = AmplitudeMethod::matrix_power);

// Analytic eigenvectors of T_n built from the Fock rows q_{n'}.
struct SpecialVectorReport {
    int detect_site{0};
    double eigen_residual{0.0};      // max_{n' != n} |T_n x - D x|, x = D^{-1/2} q_{n'}
    double null_residual{0.0};       // |T_n D^{-1/2} q_n|
    double orthogonal_overlap{0.0};  // max_{n' != n} |q_n . q_{n'}|
    double dressed_overlap{0.0};     // max_{n' != n} |q_n . D^{-1/2} q_{n'}|; nonzero unless D is trivial

    bool holds(double tol = 1e-12) const {
        return eigen_residual <= tol && null_residual <= tol && orthogonal_overlap <= tol;
    }
};

SpecialVectorReport special_vector_check(const Spectrum& spec, const PhaseDiagonal& phases,
                                         int n_detect);

} // namespace qmon
