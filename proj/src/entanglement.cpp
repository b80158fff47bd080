#include "qmon/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qmon {

std::vector<double> reduced_density(const AmplitudeTable& table, int m) {
    if (m < 1 || m > table.max_m()) {
        throw std::invalid_argument("reduced_density: m = " + std::to_string(m) +
                                    " outside 1.." + std::to_string(table.max_m()));
    }
    const double norm = table.detection_norm(m);
    if (!(norm >= kDetectionFloor)) {
        throw DetectionExhausted("detection exhausted at m = " + std::to_string(m) +
                                 ": conditional state undefined");
    }
    std::vector<double> rho(static_cast<std::size_t>(table.n_bosons() + 1));
    for (int n = 0; n <= table.n_bosons(); ++n) {
        rho[static_cast<std::size_t>(n)] = std::norm(table.at(m, n)) / norm;
    }
    return rho;
}

double renyi_entropy(std::span<const double> rho, double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0) {
        throw std::invalid_argument("renyi_entropy: alpha must be positive and != 1");
    }
    double sum = 0.0;
    for (double p : rho) {
        if (p > 0.0) {
            sum += (alpha == 2.0) ? p * p : std::pow(p, alpha);
        }
    }
    const double s = std::log2(sum) / (1.0 - alpha);
    return s == 0.0 ? 0.0 : s;  // no negative zero in output
}

std::vector<double> entanglement_spectrum(std::span<const double> rho) {
    std::vector<double> xi;
    xi.reserve(rho.size());
    for (double p : rho) {
        xi.push_back(p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity());
    }
    return xi;
}

double spectrum_entropy_mismatch(std::span<const double> xi, double s2) {
    double sum = 0.0;
    for (double x : xi) {
        if (std::isfinite(x)) {
            sum += std::exp(-2.0 * x);
        }
    }
    return std::abs(s2 + std::log2(sum));
}

std::vector<EntanglementRecord> entanglement_series(const AmplitudeTable& table, double alpha) {
    std::vector<EntanglementRecord> out;
    out.reserve(static_cast<std::size_t>(table.max_m()));
    for (int m = 1; m <= table.max_m(); ++m) {
        EntanglementRecord r;
        r.m = m;
        r.norm = table.detection_norm(m);
        r.rho = reduced_density(table, m);
        r.entropy = renyi_entropy(r.rho, alpha);
        r.spectrum = entanglement_spectrum(r.rho);
        out.push_back(std::move(r));
    }
    return out;
}

std::string_view to_string(Stationarity s) {
    switch (s) {
    case Stationarity::stationary: return "stationary";
    case Stationarity::period2_switching: return "period2_switching";
    case Stationarity::fluctuating: return "fluctuating";
    }
    return "unknown";
}

Stationarity stationarity_classify(std::span<const double> series, ClassifierOptions options) {
    const auto w = static_cast<std::size_t>(options.window);
    if (options.window < 1 || series.size() < 2 * w) {
        throw std::invalid_argument("stationarity_classify: series shorter than two windows");
    }
    const auto tail = series.subspan(series.size() - w);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (*hi - *lo < options.eps) {
        return Stationarity::stationary;
    }

    bool period2 = true;
    for (std::size_t i = 0; i + 2 < tail.size(); ++i) {
        if (!(std::abs(tail[i + 2] - tail[i]) < options.eps)) {
            period2 = false;
            break;
        }
    }
    double step = 0.0;
    for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
        step += std::abs(tail[i + 1] - tail[i]);
    }
    step /= static_cast<double>(tail.size() - 1);
    if (period2 && step > options.delta) {
        return Stationarity::period2_switching;
    }
    return Stationarity::fluctuating;
}

std::vector<double> time_average(std::span<const double> series, int window) {
    if (window < 1) {
        throw std::invalid_argument("time_average: window must be >= 1");
    }
    const auto w = static_cast<std::size_t>(window);
    if (series.size() < w) {
        return {};
    }
    std::vector<double> out;
    out.reserve(series.size() - w + 1);
    for (std::size_t i = 0; i + w <= series.size(); ++i) {
        const double sum = std::accumulate(series.begin() + static_cast<std::ptrdiff_t>(i),
                                           series.begin() + static_cast<std::ptrdiff_t>(i + w), 0.0);
        out.push_back(window == 1 ? series[i] : sum / static_cast<double>(w));
    }
    return out;
}

} // namespace qmon
