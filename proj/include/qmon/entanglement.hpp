// entanglement.hpp - reduced density, Renyi entropy and entanglement spectrum from
// first-detection amplitudes
//
// The reduced density of the left well is diagonal in n. Its entries are built from
// N+1 separate monitored protocols, one per detection site n, each with its own
// projector Pi_n:  rho(n) = |phi(m; n)|^2 / sum_n' |phi(m; n')|^2.
// Entropy is in bits, the entanglement spectrum in natural-log units, so that
// S_2 = -log2(sum_n exp(-2 xi_n)).

#pragma once

#include "qmon/errors.hpp"
#include "qmon/evolution.hpp"

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace qmon {

inline constexpr double kDetectionFloor = 1e-300;
inline constexpr double kDefaultAlpha = 2.0;

// Thrown when every detection site has absorbed the walker (norm below kDetectionFloor).
class DetectionExhausted : public NumericalError {
public:
    using NumericalError::NumericalError;
};

std::vector<double> reduced_density(const AmplitudeTable& table, int m);

// (1 / (1 - alpha)) log2 sum_n rho_n^alpha; alpha > 0, alpha != 1.
double renyi_entropy(std::span<const double> rho, double alpha = kDefaultAlpha);

// xi_n = -ln rho_n; zero weights map to +infinity.
std::vector<double> entanglement_spectrum(std::span<const double> rho);

// |S_2 + log2 sum_n exp(-2 xi_n)|
double spectrum_entropy_mismatch(std::span<const double> xi, double s2);

struct EntanglementRecord {
    int m{0};
    std::vector<double> rho;
    double entropy{0.0};
    std::vector<double> spectrum;
    double norm{0.0};
};

std::vector<EntanglementRecord> entanglement_series(const AmplitudeTable& table,
                                                    double alpha = kDefaultAlpha);

enum class Stationarity { stationary, period2_switching, fluctuating };

std::string_view to_string(Stationarity s);

struct ClassifierOptions {
    int window{20};
    double eps{1e-6};
    double delta{1e-3};
};

// Classifies the tail (last `window` values) of an entropy series.
// Requires series.size() >= 2 * window.
Stationarity stationarity_classify(std::span<const double> series, ClassifierOptions options = {});

// Moving average over `window` consecutive values; the output has
// series.size() - window + 1 entries (window = 1 returns the input).
std::vector<double> time_average(std::span<const double> series, int window);

} // namespace qmon
