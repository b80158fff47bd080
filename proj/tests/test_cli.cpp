#include "cli.hpp"
#include "parallel.hpp"
#include "table.hpp"
#include "theta_expr.hpp"

#include "qmon/renewal.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace qmon;
using namespace qmon::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Invocation {
    int status;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int status = run(args, out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct ScratchDir {
    fs::path path;
    ScratchDir() : path(fs::temp_directory_path() / ("qmon_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("theta expressions") {
    CHECK(parse_theta("pi/3") == kPi / 3);
    CHECK(parse_theta("pi/6+1e-2") == kPi / 6 + 1e-2);
    CHECK(parse_theta(" 2 * ( pi - 1 ) ") == 2 * (kPi - 1));
    CHECK(parse_theta("-pi/2") == -kPi / 2);
    CHECK(parse_theta(".5") == 0.5);
    CHECK(parse_theta("1E-3") == 1e-3);
    CHECK(parse_theta("1-2-3") == -4.0);
    CHECK(parse_theta("8/2/2") == 2.0);

    for (const char* bad : {"", "pi/", "2pi", "inf", "nan", "(pi", "pi)", "0x10", "1/0", "pie", "1e", "1e+", "."}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_theta(bad), std::invalid_argument);
    }
}

TEST_CASE("theta grids") {
    const auto g = parse_theta_grid("0:pi:5");
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == kPi);
    CHECK(g[2] == kPi / 2);
    CHECK(parse_theta_grid("pi/4:1:1") == std::vector<double>{kPi / 4});
    CHECK(parse_theta_grid("0.3") == std::vector<double>{0.3});
    for (const char* bad : {"0:1", "0:1:0", "0:1:-2", "0:1:x", "0:1:2:3", "0:1:2.5"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_theta_grid(bad), std::invalid_argument);
    }
}

TEST_CASE("reals round-trip through the CSV format") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(mantissa(rng), exponent(rng));
        const auto text = format_real(x);
        CHECK(std::strtod(text.c_str(), nullptr) == x);
    }
    CHECK(format_real(-0.0) == "0.0000000000000000e+00");
    CHECK(format_real(1.0) == "1.0000000000000000e+00");
    CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("parallel_map keeps grid order and surfaces errors") {
    auto square = [](std::size_t i) { return static_cast<double>(i * i); };
    const auto serial = parallel_map<double>(257, square, 1);
    const auto pooled = parallel_map<double>(257, square, 8);
    CHECK(serial == pooled);
    CHECK(pooled[16] == 256.0);
    CHECK(parallel_map<int>(0, [](std::size_t) { return 1; }, 4).empty());

    auto faulty = [](std::size_t i) -> int {
        if (i == 40) throw NumericalError("boom");
        return 0;
    };
    CHECK_THROWS_AS(parallel_map<int>(100, faulty, 4), NumericalError);
}

TEST_CASE("sweeps are independent of the worker count") {
    const auto thetas = parse_theta_grid("0.1:1.4:13");
    ::setenv(kWorkerEnv, "1", 1);
    std::ostringstream one;
    write_csv(one, entropy_table(4, thetas, {40, 2.0, {}, 1}));
    ::setenv(kWorkerEnv, "6", 1);
    std::ostringstream six;
    write_csv(six, entropy_table(4, thetas, {40, 2.0, {}, 1}));
    ::unsetenv(kWorkerEnv);
    CHECK(one.str() == six.str());
}

TEST_CASE("eigs emits one row per eigenvalue") {
    const auto r = invoke({"eigs", "--n", "50", "--theta", "0.7", "--detect", "0"});
    REQUIRE(r.status == kExitOk);
    const auto rows = lines(r.out);
    CHECK(rows.front() == "re,im");
    CHECK(rows.size() == 52);
}

TEST_CASE("subcommand headers") {
    CHECK(lines(invoke({"spectrum", "--n", "3"}).out).front() == "n,k,q");
    CHECK(lines(invoke({"spectrum", "--n", "3", "--table", "eigenphases"}).out).size() == 5);
    CHECK(lines(invoke({"amplitudes", "--n", "2", "--m-max", "2"}).out).front() == "m,n,re,im,abs2,method");
    CHECK(lines(invoke({"entropy", "--n", "2", "--m-max", "2"}).out).front() == "theta,m,S2,norm,class");
    CHECK(lines(invoke({"es", "--n", "2", "--m-max", "2"}).out).front() == "theta,m,n,xi");
    CHECK(lines(invoke({"gf-trace", "--n", "2", "--points", "16"}).out).size() == 17);
    CHECK(lines(invoke({"winding", "--n", "8", "--theta", "0.7"}).out).front() ==
          "N,theta,radius,samples,winding,degeneracies,distinct_phases,evaluations,raw");
}

TEST_CASE("winding JSON") {
    const auto r = invoke({"winding", "--n", "8", "--theta", "0.7", "--format", "json"});
    REQUIRE(r.status == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["winding"] == 9);
    CHECK(j["N"] == 8);
    CHECK(j["degeneracies"] == 0);
    CHECK(j["samples"] == 4096);
}

TEST_CASE("amplitude routes agree through the front end") {
    const auto spec = make_spectrum({3, 0.7});
    const auto oracle = amplitudes_table(spec, 30, AmplitudeMethod::oracle, 3, 0.9);
    for (auto method : {AmplitudeMethod::matrix_power, AmplitudeMethod::renewal, AmplitudeMethod::cauchy}) {
        const auto other = amplitudes_table(spec, 30, method, 3, 0.9);
        REQUIRE(other.rows.size() == oracle.rows.size());
        for (std::size_t i = 0; i < oracle.rows.size(); ++i) {
            CHECK(std::abs(std::get<double>(other.rows[i][2]) - std::get<double>(oracle.rows[i][2])) <= 1e-9);
            CHECK(std::abs(std::get<double>(other.rows[i][3]) - std::get<double>(oracle.rows[i][3])) <= 1e-9);
        }
    }
    // renewal routes default to the two edge sites
    CHECK(amplitudes_table(spec, 5, AmplitudeMethod::renewal, std::nullopt, 0.9).rows.size() == 10);
    CHECK(amplitudes_table(spec, 5, AmplitudeMethod::oracle, std::nullopt, 0.9).rows.size() == 20);
}

TEST_CASE("entropy rows carry one class per theta") {
    const auto t = entropy_table(4, {0.3, 0.7}, {45, 2.0, {}, 1});
    REQUIRE(t.rows.size() == 90);
    for (std::size_t i = 0; i < 45; ++i) {
        CHECK(std::get<std::string>(t.rows[i][4]) == std::get<std::string>(t.rows[0][4]));
    }
    const auto averaged = entropy_table(4, {0.3}, {45, 2.0, {}, 2});
    REQUIRE(averaged.rows.size() == 44);
    CHECK(std::get<std::int64_t>(averaged.rows.front()[1]) == 2);
    const double s1 = std::get<double>(t.rows[0][2]), s2 = std::get<double>(t.rows[1][2]);
    CHECK(std::get<double>(averaged.rows.front()[2]) == doctest::Approx(0.5 * (s1 + s2)).epsilon(1e-15));

    CHECK(std::get<std::string>(entropy_table(4, {0.3}, {10, 2.0, {}, 1}).rows[0][4]) == "unclassified");
}

TEST_CASE("entanglement spectrum omits zero-probability levels") {
    // theta = 0: nothing moves; the other sites only carry roundoff-level weight
    // (about 1e-33), which is finite and therefore still emitted
    const auto t = es_table(4, {0.0}, 1, {});
    REQUIRE(!t.rows.empty());
    CHECK(std::get<std::int64_t>(t.rows[0][2]) == 0);
    CHECK(std::abs(std::get<double>(t.rows[0][3])) <= 1e-15);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(std::get<double>(t.rows[i][3]) > 60.0);
    for (const auto& row : es_table(4, {0.7, 1.1}, 40, {}).rows) CHECK(std::isfinite(std::get<double>(row[3])));
    CHECK(es_table(4, {0.7}, 3, {2}).rows.size() == 5);
    CHECK(es_table(4, {0.7}, 3, {1, 3}).rows.size() == 10);
}

TEST_CASE("usage errors exit with 2") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"bogus"},
             {"eigs", "--bogus"},
             {"eigs", "--n", "0"},
             {"eigs", "--n", "2000"},
             {"eigs", "--n", "4", "--detect", "5"},
             {"eigs", "--theta", "pi/"},
             {"eigs", "--theta", "0:1:3"},
             {"entropy", "--alpha", "1"},
             {"entropy", "--m-max", "0"},
             {"amplitudes", "--n", "4", "--detect", "2", "--method", "cauchy"},
             {"amplitudes", "--method", "euler"},
             {"amplitudes", "--method", "cauchy", "--radius", "1.5"},
             {"winding", "--radius", "1"},
             {"spectrum", "--table", "rows"},
             {"spectrum", "--format", "xml"},
             {"spectrum", "--plot"},
             {"figures", "fig9"},
         }) {
        const auto r = invoke(args);
        CAPTURE(r.err);
        CHECK(r.status == kExitUsage);
        CHECK(lines(r.err).size() == 1);
    }
    CHECK(invoke({"--help"}).status == kExitOk);
}

TEST_CASE("numerical failures exit with 3") {
    // a sample point lands within 1e-13 of the pole at exp(-i pi/2)
    const auto r = invoke({"gf-trace", "--n", "1", "--theta", "pi/2", "--radius", "0.9999999999999"});
    CHECK(r.status == kExitNumerical);
    CHECK(lines(r.err).size() == 1);
}

TEST_CASE("I/O failures exit with 4") {
    CHECK(invoke({"spectrum", "--out", "/nonexistent-dir/q.csv"}).status == kExitIo);
    CHECK(invoke({"--manifest", "/nonexistent-dir/q.csv.manifest.json"}).status == kExitIo);
    CHECK(invoke({"figures", "fig3", "--out", "/proc/qmon-figures"}).status == kExitIo);
}

TEST_CASE("manifests replay byte for byte") {
    ScratchDir dir;
    const auto csv = (dir.path / "s.csv").string();
    const auto r = invoke({"entropy", "--n", "4", "--theta", "0.2:1.2:6", "--m-max", "45", "--out", csv, "--plot"});
    REQUIRE(r.status == kExitOk);
    const auto manifest = csv + ".manifest.json";
    REQUIRE(fs::exists(manifest));
    REQUIRE(fs::exists(dir.path / "s.svg"));

    const auto data = slurp(csv), svg = slurp(dir.path / "s.svg"), meta = slurp(manifest);
    const auto j = nlohmann::json::parse(meta);
    CHECK(j["subcommand"] == "entropy");
    CHECK(j["parameters"]["theta_grid"].size() == 6);
    CHECK(j["parameters"]["classifier"]["window"] == 20);

    fs::remove(csv);
    fs::remove(dir.path / "s.svg");
    REQUIRE(invoke({"--manifest", manifest}).status == kExitOk);
    CHECK(slurp(csv) == data);
    CHECK(slurp(dir.path / "s.svg") == svg);
    CHECK(slurp(manifest) == meta);

    CHECK(invoke({"--manifest", manifest, "eigs"}).status == kExitUsage);
}

TEST_CASE("figure recipes write data and manifests") {
    ScratchDir dir;
    const auto r = invoke({"figures", "fig1", "fig2", "--out", dir.path.string()});
    REQUIRE(r.status == kExitOk);
    CHECK(lines(slurp(dir.path / "fig1_trace.csv")).size() == 4097);
    CHECK(nlohmann::json::parse(slurp(dir.path / "fig1_winding.json"))["winding"] == 9);
    for (char panel : std::string("abcdef")) {
        CHECK(lines(slurp(dir.path / ("fig2" + std::string(1, panel) + "_eigs.csv"))).size() == 52);
    }
    const auto trace = slurp(dir.path / "fig1_trace.csv");
    fs::remove(dir.path / "fig1_trace.csv");
    REQUIRE(invoke({"--manifest", (dir.path / "fig1.manifest.json").string()}).status == kExitOk);
    CHECK(slurp(dir.path / "fig1_trace.csv") == trace);
}
