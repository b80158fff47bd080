#include "qmon/evolution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmon {

namespace {

void check_site(const Spectrum& spec, int n, const char* who) {
    if (n < 0 || n > spec.n_bosons()) {
        throw std::invalid_argument(std::string(who) + ": detection site " + std::to_string(n) +
                                    " outside 0.." + std::to_string(spec.n_bosons()));
    }
}

void check_steps(int max_m, const char* who) {
    if (max_m < 1) {
        throw std::invalid_argument(std::string(who) + ": need at least one measurement");
    }
}

cd unit_phase(double phase) { return {std::cos(phase), -std::sin(phase)}; }  // exp(-i phase)

} // namespace

PhaseDiagonal PhaseDiagonal::from(const Spectrum& spec) {
    const Eigen::Index d = spec.eigenphases.size();
    PhaseDiagonal p;
    p.entries.resize(d);
    p.half_entries.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double e = spec.eigenphases(k);
        p.half_entries(k) = unit_phase(0.5 * e);
        p.entries(k) = p.half_entries(k) * p.half_entries(k);
    }
    return p;
}

std::string_view to_string(AmplitudeMethod method) {
    switch (method) {
    case AmplitudeMethod::oracle: return "oracle";
    case AmplitudeMethod::matrix_power: return "matrix_power";
    case AmplitudeMethod::renewal: return "renewal";
    case AmplitudeMethod::cauchy: return "cauchy";
    }
    return "unknown";
}

AmplitudeMethod parse_amplitude_method(std::string_view name) {
    if (name == "oracle") return AmplitudeMethod::oracle;
    if (name == "matrix_power") return AmplitudeMethod::matrix_power;
    if (name == "renewal") return AmplitudeMethod::renewal;
    if (name == "cauchy") return AmplitudeMethod::cauchy;
    throw std::invalid_argument("unknown amplitude method '" + std::string(name) + "'");
}

AmplitudeTable::AmplitudeTable(int n_bosons, int max_m, AmplitudeMethod method)
    : n_bosons_(n_bosons), max_m_(max_m), method_(method),
      amplitudes_(Eigen::MatrixXcd::Zero(max_m, n_bosons + 1)) {
    check_steps(max_m, "AmplitudeTable");
}

void AmplitudeTable::set_column(int n, const Eigen::VectorXcd& column) {
    if (column.size() != max_m_) {
        throw std::invalid_argument("AmplitudeTable: column length mismatch");
    }
    amplitudes_.col(n) = column;
}

double AmplitudeTable::detection_norm(int m) const {
    return amplitudes_.row(m - 1).squaredNorm();
}

cd unitary_amplitude(const Spectrum& spec, int n, int m) {
    check_site(spec, n, "unitary_amplitude");
    cd sum{0.0, 0.0};
    for (int k = 0; k < spec.dim(); ++k) {
        sum += spec.q(n, k) * spec.q(0, k) * unit_phase(spec.eigenphases(k) * m);
    }
    return sum;
}

double GaussianDecay::relative_deviation() const {
    return std::abs(exact - gaussian) / exact;
}

GaussianDecay gaussian_decay_check(const SystemConfig& config, int m) {
    config.validate();
    const double N = config.n_bosons;
    const double x = m * config.theta;
    return {std::pow(std::abs(std::cos(x)), N), std::exp(-0.5 * N * x * x)};
}

MonitoredOperator monitored_operator(const Spectrum& spec, const PhaseDiagonal& phases,
                                     int n_detect) {
    check_site(spec, n_detect, "monitored_operator");
    const int d = spec.dim();
    const Eigen::VectorXd qn = spec.weights.row(n_detect).transpose();
    MonitoredOperator op{n_detect, Eigen::MatrixXcd(d, d)};
    for (int k = 0; k < d; ++k) {
        for (int kp = 0; kp < d; ++kp) {
            const double proj = (k == kp ? 1.0 : 0.0) - qn(k) * qn(kp);
            op.matrix(k, kp) = phases.half_entries(k) * proj * phases.half_entries(kp);
        }
    }
    return op;
}

Eigen::VectorXcd amplitudes_matrix_power(const Spectrum& spec, const PhaseDiagonal& phases,
                                         int n_detect, int max_m) {
    check_steps(max_m, "amplitudes_matrix_power");
    const MonitoredOperator op = monitored_operator(spec, phases, n_detect);

    // phi_m = l^T T^{m-1} w with l = D^{1/2} q_n and w = D^{1/2} q_0.
    const Eigen::VectorXcd left =
        phases.half_entries.cwiseProduct(spec.weights.row(n_detect).transpose().cast<cd>());
    Eigen::VectorXcd w =
        phases.half_entries.cwiseProduct(spec.weights.row(0).transpose().cast<cd>());

    Eigen::VectorXcd out(max_m);
    for (int m = 1; m <= max_m; ++m) {
        out(m - 1) = left.transpose() * w;
        if (m < max_m) {
            w = op.apply(w);
        }
    }
    return out;
}

Eigen::VectorXcd direct_oracle(const Spectrum& spec, const PhaseDiagonal& phases, int n_detect,
                               int max_m) {
    check_site(spec, n_detect, "direct_oracle");
    check_steps(max_m, "direct_oracle");
    const Eigen::VectorXd qn = spec.weights.row(n_detect).transpose();

    Eigen::VectorXcd state = spec.weights.row(0).transpose().cast<cd>();  // |0,N> in energy basis
    Eigen::VectorXcd out(max_m);
    for (int m = 1; m <= max_m; ++m) {
        state = phases.entries.cwiseProduct(state);
        cd overlap{0.0, 0.0};
        for (Eigen::Index k = 0; k < state.size(); ++k) {
            overlap += qn(k) * state(k);
        }
        out(m - 1) = overlap;
        for (Eigen::Index k = 0; k < state.size(); ++k) {
            state(k) -= qn(k) * overlap;
        }
    }
    return out;
}

AmplitudeTable amplitude_table(const Spectrum& spec, int max_m, AmplitudeMethod method) {
    const PhaseDiagonal phases = PhaseDiagonal::from(spec);
    AmplitudeTable table(spec.n_bosons(), max_m, method);
    for (int n = 0; n <= spec.n_bosons(); ++n) {
        switch (method) {
        case AmplitudeMethod::oracle:
            table.set_column(n, direct_oracle(spec, phases, n, max_m));
            break;
        case AmplitudeMethod::matrix_power:
            table.set_column(n, amplitudes_matrix_power(spec, phases, n, max_m));
            break;
        default:
            throw std::invalid_argument("amplitude_table: use the renewal module for '" +
                                        std::string(to_string(method)) + "'");
        }
    }
    return table;
}

SpecialVectorReport special_vector_check(const Spectrum& spec, const PhaseDiagonal& phases,
                                         int n_detect) {
    const MonitoredOperator op = monitored_operator(spec, phases, n_detect);
    const Eigen::VectorXcd inv_half = phases.half_entries.cwiseInverse();
    const Eigen::VectorXd qn = spec.weights.row(n_detect).transpose();

    SpecialVectorReport report;
    report.detect_site = n_detect;
    for (int np = 0; np <= spec.n_bosons(); ++np) {
        const Eigen::VectorXd qnp = spec.weights.row(np).transpose();
        const Eigen::VectorXcd x = inv_half.cwiseProduct(qnp.cast<cd>());
        const Eigen::VectorXcd tx = op.apply(x);
        if (np == n_detect) {
            report.null_residual = tx.cwiseAbs().maxCoeff();
            continue;
        }
        const Eigen::VectorXcd dx = phases.entries.cwiseProduct(x);
        report.eigen_residual = std::max(report.eigen_residual, (tx - dx).cwiseAbs().maxCoeff());
        report.orthogonal_overlap = std::max(report.orthogonal_overlap, std::abs(qn.dot(qnp)));
        const cd dressed = (qn.cast<cd>().transpose() * x)(0);
        report.dressed_overlap = std::max(report.dressed_overlap, std::abs(dressed));
    }
    return report;
}

} // namespace qmon
