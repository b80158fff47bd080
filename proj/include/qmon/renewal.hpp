// renewal.hpp - renewal-equation route from unitary amplitudes to first-detection amplitudes
//
// With u_m = <psi0|U^m|psi0> and v_m = <psi|U^m|psi0>, the first-detection amplitudes
// satisfy phi_m = v_m - sum_{j<m} u_{m-j} phi_j. In generating-function form
// phi^(z) = v^(z) / (1 + u^(z)), analytic in the open unit disk, so phi_m is the
// m-th Taylor coefficient and can be read off a contour integral.

#pragma once

#include "qmon/evolution.hpp"
#include "qmon/fock_spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace qmon {

// Which return amplitude feeds the renewal kernel. The two agree for detection sites
// 0 and N of this model; in between only one of them reproduces the protocol.
enum class RenewalKernel {
    initial_state,    // u_m = <0,N| U^m |0,N>
    detection_state,  // u_m = <n,N-n| U^m |n,N-n>
};

struct UnitarySeries {
    int detect_site{0};
    Eigen::VectorXcd u;  // u(m-1) = u_m, m = 1..M
    Eigen::VectorXcd v;  // v(m-1) = v_m

    int size() const noexcept { return static_cast<int>(v.size()); }
};

UnitarySeries unitary_series(const Spectrum& spec, int n_detect, int max_m,
                             RenewalKernel kernel = RenewalKernel::initial_state);

// phi_1 = v_1, phi_m = v_m - sum_{j=1}^{m-1} u_{m-j} phi_j.
Eigen::VectorXcd renewal_recursion(const UnitarySeries& series, int max_m);

// phi_1 = v_1, phi_m = v_m - sum_{j=1}^{m-1} phi_{m-j} v_j.
Eigen::VectorXcd second_recursion(const UnitarySeries& series, int max_m);

// Strictly lower-triangular Toeplitz matrix with Gamma(i, j) = u_{i-j}.
Eigen::MatrixXcd gamma_matrix(const UnitarySeries& series, int max_m);

// max_i |((1 + Gamma) phi - v)_i|
double renewal_system_residual(const UnitarySeries& series, const Eigen::VectorXcd& phi);

struct GeneratingFunctionSample {
    cd z;
    cd u_hat;
    cd v_hat;
    cd phi_hat;  // v_hat / (1 + u_hat)
};

// u^(z) = z sum_k q(0,k)^2 / (exp(i e_k) - z). Throws NumericalError when z comes
// within 1e-12 of a pole exp(i e_k).
cd u_hat(const Spectrum& spec, cd z);
// v^(z) = z sum_k q(n,k) q(0,k) / (exp(i e_k) - z).
cd v_hat(const Spectrum& spec, int n_detect, cd z);

GeneratingFunctionSample sample_generating_function(const Spectrum& spec, int n_detect, cd z);

// u^ / (1 + u^), unimodular on the unit circle.
cd unimodular_phi(const Spectrum& spec, cd z);

inline constexpr double kDefaultCauchyRadius = 0.9;
inline constexpr double kDefaultWindingRadius = 1.0 - 1e-6;
inline constexpr std::size_t kDefaultWindingSamples = 4096;

// Quadrature point count used when the caller does not choose one.
int default_cauchy_points(int m);

// m-th Taylor coefficient of v^/(1+u^) by the trapezoidal rule on |z| = radius.
// Requires 0 < radius < 1 and points >= 8 m.
cd cauchy_coefficient(const Spectrum& spec, int n_detect, int m, double radius, int points);

// phi_1..phi_M for one detection site via the Cauchy route.
Eigen::VectorXcd cauchy_amplitudes(const Spectrum& spec, int n_detect, int max_m,
                                   double radius = kDefaultCauchyRadius);

// Phases exp(i e_k) that coincide modulo 2 pi within tol are counted once.
int count_distinct_phases(const Spectrum& spec, double tol = 1e-9);

struct WindingResult {
    int winding{0};
    double raw{0.0};              // accumulated phase / 2 pi before rounding
    std::size_t samples{0};       // base sample count requested
    std::size_t evaluations{0};   // samples actually evaluated after refinement
    int distinct_phases{0};
    int degeneracies{0};          // (N + 1) - distinct_phases
};

// Winding number of u^/(1+u^) along |z| = radius, omega in [-pi, pi). Intervals whose
// phase jump exceeds pi/2 are bisected (up to max_depth levels). Throws ConvergenceError
// carrying the last estimate in partial()[0] when a jump cannot be resolved.
WindingResult winding_number(const Spectrum& spec, double radius = kDefaultWindingRadius,
                             std::size_t samples = kDefaultWindingSamples, int max_depth = 40);

struct TracePoint {
    double omega;
    cd phi;
    double phase;  // continuous (unwrapped) argument
};

// u^/(1+u^) sampled on |z| = radius at omega_j = -pi + 2 pi j / samples.
std::vector<TracePoint> generating_function_trace(const Spectrum& spec, double radius,
                                                  std::size_t samples);

} // namespace qmon
