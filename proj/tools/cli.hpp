// cli.hpp - the qmon command-line front end as a callable library
//
// run() parses a full argument list (without the program name), writes CSV/JSON
// to the requested destination and returns the process exit status. Every file
// output is accompanied by <out>.manifest.json; `qmon --manifest FILE` replays it.

#pragma once

#include "table.hpp"

#include <qmon/entanglement.hpp>
#include <qmon/evolution.hpp>
#include <qmon/fock_spectrum.hpp>

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

inline constexpr const char* kArtifactVersion = "qmon 1.0.0";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// Data producers behind the subcommands.

Table spectrum_table(const Spectrum& spec, bool eigenphases);

// detect = nullopt: every site the method supports (all n, or {0, N} for renewal/cauchy).
Table amplitudes_table(const Spectrum& spec, int max_m, AmplitudeMethod method,
                       std::optional<int> detect, double radius);

// Eigenvalues of T_n, sorted by decreasing modulus then argument.
Table eigs_table(const Spectrum& spec, int detect);

struct EntropyOptions {
    int max_m{60};
    double alpha{kDefaultAlpha};
    ClassifierOptions classifier{};
    int average{1};  // time_average window applied before classification
};

// One row per (theta, m). The class column holds the tail classification of that
// theta's series, "unclassified" when the series is shorter than 2 windows and
// "exhausted" when the detection norm vanished.
Table entropy_table(int n_bosons, const std::vector<double>& thetas, const EntropyOptions& options);

// One row per finite level; m_list empty means every m in 1..max_m.
Table es_table(int n_bosons, const std::vector<double>& thetas, int max_m,
               const std::vector<int>& m_list);

nlohmann::ordered_json winding_json(const Spectrum& spec, double radius, std::size_t samples);

Table gf_trace_table(const Spectrum& spec, double radius, std::size_t samples);

// Real parts of u_1 and v_1 (site N) over a theta grid.
Table unitary_table(int n_bosons, const std::vector<double>& thetas);

} // namespace qmon::cli
