#include "qmon/renewal.hpp"

#include "qmon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmon {

namespace {

constexpr double kPoleGuard = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_length(const UnitarySeries& series, int max_m, const char* who) {
    if (max_m < 1 || series.size() < max_m || series.u.size() < max_m) {
        throw std::invalid_argument(std::string(who) + ": series shorter than requested length");
    }
}

// z sum_k w_k / (exp(i e_k) - z)
template <typename Weight>
cd resolvent_sum(const Spectrum& spec, cd z, Weight weight) {
    cd sum{0.0, 0.0};
    for (int k = 0; k < spec.dim(); ++k) {
        const double e = spec.eigenphases(k);
        const cd pole{std::cos(e), std::sin(e)};
        const cd gap = pole - z;
        if (std::abs(gap) < kPoleGuard) {
            throw NumericalError("generating function evaluated within 1e-12 of the pole at level " +
                                 std::to_string(k));
        }
        sum += weight(k) / gap;
    }
    return z * sum;
}

double wrap_to_pi(double x) { return std::remainder(x, kTwoPi); }

} // namespace

UnitarySeries unitary_series(const Spectrum& spec, int n_detect, int max_m, RenewalKernel kernel) {
    UnitarySeries s;
    s.detect_site = n_detect;
    s.u.resize(max_m);
    s.v.resize(max_m);
    const int ret = (kernel == RenewalKernel::initial_state) ? 0 : n_detect;
    for (int m = 1; m <= max_m; ++m) {
        s.v(m - 1) = unitary_amplitude(spec, n_detect, m);
        cd u{0.0, 0.0};
        for (int k = 0; k < spec.dim(); ++k) {
            const double ph = spec.eigenphases(k) * m;
            u += spec.q(ret, k) * spec.q(ret, k) * cd{std::cos(ph), -std::sin(ph)};
        }
        s.u(m - 1) = u;
    }
    return s;
}

Eigen::VectorXcd renewal_recursion(const UnitarySeries& series, int max_m) {
    check_length(series, max_m, "renewal_recursion");
    Eigen::VectorXcd phi(max_m);
    for (int m = 1; m <= max_m; ++m) {
        cd acc = series.v(m - 1);
        for (int j = 1; j < m; ++j) {
            acc -= series.u(m - j - 1) * phi(j - 1);
        }
        phi(m - 1) = acc;
    }
    return phi;
}

Eigen::VectorXcd second_recursion(const UnitarySeries& series, int max_m) {
    check_length(series, max_m, "second_recursion");
    Eigen::VectorXcd phi(max_m);
    for (int m = 1; m <= max_m; ++m) {
        cd acc = series.v(m - 1);
        for (int j = 1; j < m; ++j) {
            acc -= phi(m - j - 1) * series.v(j - 1);
        }
        phi(m - 1) = acc;
    }
    return phi;
}

Eigen::MatrixXcd gamma_matrix(const UnitarySeries& series, int max_m) {
    check_length(series, max_m, "gamma_matrix");
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(max_m, max_m);
    for (int i = 0; i < max_m; ++i) {
        for (int j = 0; j < i; ++j) {
            g(i, j) = series.u(i - j - 1);
        }
    }
    return g;
}

double renewal_system_residual(const UnitarySeries& series, const Eigen::VectorXcd& phi) {
    const int m = static_cast<int>(phi.size());
    const Eigen::MatrixXcd g = gamma_matrix(series, m);
    const Eigen::VectorXcd lhs = phi + g * phi;
    return (lhs - series.v.head(m)).cwiseAbs().maxCoeff();
}

cd u_hat(const Spectrum& spec, cd z) {
    return resolvent_sum(spec, z, [&](int k) { return spec.q(0, k) * spec.q(0, k); });
}

cd v_hat(const Spectrum& spec, int n_detect, cd z) {
    if (n_detect < 0 || n_detect > spec.n_bosons()) {
        throw std::invalid_argument("v_hat: detection site out of range");
    }
    return resolvent_sum(spec, z, [&](int k) { return spec.q(n_detect, k) * spec.q(0, k); });
}

GeneratingFunctionSample sample_generating_function(const Spectrum& spec, int n_detect, cd z) {
    GeneratingFunctionSample s{z, u_hat(spec, z), v_hat(spec, n_detect, z), {}};
    s.phi_hat = s.v_hat / (1.0 + s.u_hat);
    return s;
}

cd unimodular_phi(const Spectrum& spec, cd z) {
    const cd u = u_hat(spec, z);
    return u / (1.0 + u);
}

int default_cauchy_points(int m) { return std::max(4096, 8 * m); }

cd cauchy_coefficient(const Spectrum& spec, int n_detect, int m, double radius, int points) {
    if (m < 1) {
        throw std::invalid_argument("cauchy_coefficient: m must be >= 1");
    }
    if (!(radius > 0.0 && radius < 1.0)) {
        throw std::invalid_argument("cauchy_coefficient: radius must lie in (0, 1)");
    }
    if (points < 8 * m) {
        throw std::invalid_argument("cauchy_coefficient: need at least 8 m quadrature points");
    }
    // z^{-m} phi^(z) summed in a fixed order; the r^{-m} factor is applied once at the end.
    cd sum{0.0, 0.0};
    for (int j = 0; j < points; ++j) {
        const double omega = kTwoPi * j / points;
        const cd z = std::polar(radius, omega);
        const cd phi = v_hat(spec, n_detect, z) / (1.0 + u_hat(spec, z));
        const double back =
            -kTwoPi * static_cast<double>((static_cast<long long>(m) * j) % points) / points;
        sum += phi * cd{std::cos(back), std::sin(back)};
    }
    return sum / static_cast<double>(points) * std::pow(radius, -m);
}

Eigen::VectorXcd cauchy_amplitudes(const Spectrum& spec, int n_detect, int max_m, double radius) {
    const int points = default_cauchy_points(max_m);
    // Sample phi^ once and reuse it for every coefficient.
    std::vector<cd> samples(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const cd z = std::polar(radius, kTwoPi * j / points);
        samples[static_cast<std::size_t>(j)] = v_hat(spec, n_detect, z) / (1.0 + u_hat(spec, z));
    }
    Eigen::VectorXcd out(max_m);
    for (int m = 1; m <= max_m; ++m) {
        cd sum{0.0, 0.0};
        for (int j = 0; j < points; ++j) {
            const double back =
                -kTwoPi * static_cast<double>((static_cast<long long>(m) * j) % points) / points;
            sum += samples[static_cast<std::size_t>(j)] * cd{std::cos(back), std::sin(back)};
        }
        out(m - 1) = sum / static_cast<double>(points) * std::pow(radius, -m);
    }
    return out;
}

int count_distinct_phases(const Spectrum& spec, double tol) {
    std::vector<double> wrapped;
    wrapped.reserve(static_cast<std::size_t>(spec.dim()));
    for (int k = 0; k < spec.dim(); ++k) {
        wrapped.push_back(wrap_to_pi(spec.eigenphases(k)));
    }
    int distinct = 0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i && !seen; ++j) {
            seen = std::abs(wrap_to_pi(wrapped[i] - wrapped[j])) < tol;
        }
        if (!seen) {
            ++distinct;
        }
    }
    return distinct;
}

namespace {

struct PhaseAccumulator {
    const Spectrum& spec;
    double radius;
    int max_depth;
    std::size_t evaluations{0};
    bool unresolved{false};

    cd eval(double omega) {
        ++evaluations;
        return unimodular_phi(spec, std::polar(radius, omega));
    }

    // Phase change of f between omega_a and omega_b, bisecting while the jump is
    // too large to attribute to a single branch.
    double increment(double wa, cd fa, double wb, cd fb, int depth) {
        const double jump = std::arg(fb / fa);
        if (std::abs(jump) <= 0.5 * std::numbers::pi) {
            return jump;
        }
        if (depth >= max_depth) {
            unresolved = true;
            return jump;
        }
        const double wm = 0.5 * (wa + wb);
        const cd fm = eval(wm);
        return increment(wa, fa, wm, fm, depth + 1) + increment(wm, fm, wb, fb, depth + 1);
    }
};

} // namespace

WindingResult winding_number(const Spectrum& spec, double radius, std::size_t samples,
                             int max_depth) {
    if (!(radius > 0.0 && radius < 1.0)) {
        throw std::invalid_argument("winding_number: radius must lie in (0, 1)");
    }
    if (samples < 2) {
        throw std::invalid_argument("winding_number: need at least two samples");
    }
    PhaseAccumulator acc{spec, radius, max_depth};

    const double step = kTwoPi / static_cast<double>(samples);
    const double start = -std::numbers::pi;
    const cd f0 = acc.eval(start);
    cd prev = f0;
    double total = 0.0;
    for (std::size_t j = 1; j <= samples; ++j) {
        const double wa = start + step * static_cast<double>(j - 1);
        const double wb = start + step * static_cast<double>(j);
        const cd next = (j == samples) ? f0 : acc.eval(wb);
        total += acc.increment(wa, prev, wb, next, 0);
        prev = next;
    }

    WindingResult result;
    result.raw = total / kTwoPi;
    result.winding = static_cast<int>(std::lround(result.raw));
    result.samples = samples;
    result.evaluations = acc.evaluations;
    result.distinct_phases = count_distinct_phases(spec);
    result.degeneracies = spec.dim() - result.distinct_phases;
    if (acc.unresolved) {
        throw ConvergenceError("winding_number: phase jump not resolved after " +
                                   std::to_string(max_depth) + " refinements",
                               {cd{result.raw, 0.0}});
    }
    return result;
}

std::vector<TracePoint> generating_function_trace(const Spectrum& spec, double radius,
                                                  std::size_t samples) {
    std::vector<TracePoint> trace;
    trace.reserve(samples);
    double phase = 0.0;
    cd prev{};
    for (std::size_t j = 0; j < samples; ++j) {
        const double omega = -std::numbers::pi + kTwoPi * static_cast<double>(j) / samples;
        const cd f = unimodular_phi(spec, std::polar(radius, omega));
        phase = (j == 0) ? std::arg(f) : phase + std::arg(f / prev);
        trace.push_back({omega, f, phase});
        prev = f;
    }
    return trace;
}

} // namespace qmon
