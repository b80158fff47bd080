#include "cli.hpp"

#include "parallel.hpp"
#include "svg_plot.hpp"
#include "theta_expr.hpp"

#include <qmon/eigen_solver.hpp>
#include <qmon/errors.hpp>
#include <qmon/renewal.hpp>

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace qmon::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// data producers

Table spectrum_table(const Spectrum& spec, bool eigenphases) {
    Table t;
    const int N = spec.n_bosons();
    if (eigenphases) {
        t.header = {"k", "e"};
        for (int k = 0; k <= N; ++k) t.rows.push_back({std::int64_t{k}, spec.eigenphases(k)});
        return t;
    }
    t.header = {"n", "k", "q"};
    for (int n = 0; n <= N; ++n) {
        for (int k = 0; k <= N; ++k) t.rows.push_back({std::int64_t{n}, std::int64_t{k}, spec.q(n, k)});
    }
    return t;
}

Table amplitudes_table(const Spectrum& spec, int max_m, AmplitudeMethod method,
                       std::optional<int> detect, double radius) {
    const int N = spec.n_bosons();
    const bool renewal_route = method == AmplitudeMethod::renewal || method == AmplitudeMethod::cauchy;
    std::vector<int> sites;
    if (detect) {
        if (renewal_route && *detect != 0 && *detect != N) {
            throw std::invalid_argument("--method " + std::string(to_string(method)) +
                                        " is only defined for detection sites 0 and N");
        }
        sites.push_back(*detect);
    } else if (renewal_route) {
        sites = {0, N};
    } else {
        for (int n = 0; n <= N; ++n) sites.push_back(n);
    }

    const auto phases = PhaseDiagonal::from(spec);
    auto columns = parallel_map<Eigen::VectorXcd>(sites.size(), [&](std::size_t i) -> Eigen::VectorXcd {
        const int n = sites[i];
        switch (method) {
        case AmplitudeMethod::oracle: return direct_oracle(spec, phases, n, max_m);
        case AmplitudeMethod::matrix_power: return amplitudes_matrix_power(spec, phases, n, max_m);
        case AmplitudeMethod::renewal:
            return renewal_recursion(unitary_series(spec, n, max_m), max_m);
        case AmplitudeMethod::cauchy: return cauchy_amplitudes(spec, n, max_m, radius);
        }
        return {};
    });

    Table t;
    t.header = {"m", "n", "re", "im", "abs2", "method"};
    const std::string name(to_string(method));
    for (int m = 1; m <= max_m; ++m) {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const cd phi = columns[i](m - 1);
            t.rows.push_back({std::int64_t{m}, std::int64_t{sites[i]}, phi.real(), phi.imag(),
                              std::norm(phi), name});
        }
    }
    return t;
}

Table eigs_table(const Spectrum& spec, int detect) {
    const auto op = monitored_operator(spec, PhaseDiagonal::from(spec), detect);
    auto values = eigenvalues(op.matrix);
    std::sort(values.begin(), values.end(), [](cd a, cd b) {
        const double ra = std::abs(a), rb = std::abs(b);
        if (ra != rb) return ra > rb;
        return std::arg(a) < std::arg(b);
    });
    Table t;
    t.header = {"re", "im"};
    for (cd z : values) t.rows.push_back({z.real(), z.imag()});
    return t;
}

Table entropy_table(int n_bosons, const std::vector<double>& thetas, const EntropyOptions& opt) {
    if (opt.average < 1 || opt.average > opt.max_m) {
        throw std::invalid_argument("--average must lie in 1..m-max");
    }
    auto blocks = parallel_map<Table>(thetas.size(), [&](std::size_t i) {
        const double theta = thetas[i];
        const auto spec = make_spectrum({n_bosons, theta});
        const auto table = amplitude_table(spec, opt.max_m);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> s2(static_cast<std::size_t>(opt.max_m), nan);
        std::vector<double> norms(s2.size());
        bool exhausted = false;
        for (int m = 1; m <= opt.max_m; ++m) {
            norms[m - 1] = table.detection_norm(m);
            if (exhausted) continue;
            try {
                s2[m - 1] = renyi_entropy(reduced_density(table, m), opt.alpha);
            } catch (const DetectionExhausted&) {
                exhausted = true;
            }
        }
        const auto series = time_average(s2, opt.average);

        std::string cls = "unclassified";
        if (exhausted) {
            cls = "exhausted";
        } else if (series.size() >= 2 * static_cast<std::size_t>(opt.classifier.window)) {
            cls = std::string(to_string(stationarity_classify(series, opt.classifier)));
        }

        Table block;
        for (std::size_t j = 0; j < series.size(); ++j) {
            const std::size_t m = j + static_cast<std::size_t>(opt.average);  // window ends at m
            block.rows.push_back({theta, static_cast<std::int64_t>(m), series[j], norms[m - 1], cls});
        }
        return block;
    });

    Table t;
    t.header = {"theta", "m", "S2", "norm", "class"};
    for (const auto& b : blocks) t.append(b);
    return t;
}

Table es_table(int n_bosons, const std::vector<double>& thetas, int max_m, const std::vector<int>& m_list) {
    std::vector<int> steps = m_list;
    if (steps.empty()) {
        for (int m = 1; m <= max_m; ++m) steps.push_back(m);
    }
    const int needed = *std::max_element(steps.begin(), steps.end());
    for (int m : steps) {
        if (m < 1) throw std::invalid_argument("--m-list entries must be >= 1");
    }

    auto blocks = parallel_map<Table>(thetas.size(), [&](std::size_t i) {
        const double theta = thetas[i];
        const auto table = amplitude_table(make_spectrum({n_bosons, theta}), needed);
        Table block;
        for (int m : steps) {
            std::vector<double> rho;
            try {
                rho = reduced_density(table, m);
            } catch (const DetectionExhausted&) {
                continue;  // no conditional state, no levels
            }
            const auto xi = entanglement_spectrum(rho);
            for (std::size_t n = 0; n < xi.size(); ++n) {
                if (std::isfinite(xi[n])) {
                    block.rows.push_back({theta, std::int64_t{m}, static_cast<std::int64_t>(n), xi[n]});
                }
            }
        }
        return block;
    });

    Table t;
    t.header = {"theta", "m", "n", "xi"};
    for (const auto& b : blocks) t.append(b);
    return t;
}

json winding_json(const Spectrum& spec, double radius, std::size_t samples) {
    const auto w = winding_number(spec, radius, samples);
    json j;
    j["N"] = spec.n_bosons();
    j["theta"] = spec.config.theta;
    j["radius"] = radius;
    j["samples"] = w.samples;
    j["winding"] = w.winding;
    j["degeneracies"] = w.degeneracies;
    j["distinct_phases"] = w.distinct_phases;
    j["evaluations"] = w.evaluations;
    j["raw"] = w.raw;
    return j;
}

Table gf_trace_table(const Spectrum& spec, double radius, std::size_t samples) {
    Table t;
    t.header = {"omega", "re_phi", "im_phi", "phase"};
    for (const auto& p : generating_function_trace(spec, radius, samples)) {
        t.rows.push_back({p.omega, p.phi.real(), p.phi.imag(), p.phase});
    }
    return t;
}

Table unitary_table(int n_bosons, const std::vector<double>& thetas) {
    Table t;
    t.header = {"theta", "re_u1", "re_v1"};
    for (double theta : thetas) {
        const auto spec = make_spectrum({n_bosons, theta});
        t.rows.push_back({theta, unitary_amplitude(spec, 0, 1).real(),
                          unitary_amplitude(spec, n_bosons, 1).real()});
    }
    return t;
}

// ---------------------------------------------------------------------------
// plotting helpers

namespace {

std::size_t column(const Table& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::logic_error("no column " + name);
    return static_cast<std::size_t>(it - t.header.begin());
}

double as_real(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::numeric_limits<double>::quiet_NaN();
}

std::string as_label(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::get<double>(c));
    return buf;
}

// Series of (x, y) grouped by the value of `group` (one series when empty).
std::vector<PlotSeries> group_series(const Table& t, const std::string& x, const std::string& y,
                                     const std::string& group, const std::string& prefix, bool line) {
    const auto cx = column(t, x), cy = column(t, y);
    std::vector<PlotSeries> out;
    std::map<std::string, std::size_t> index;
    for (const auto& row : t.rows) {
        const std::string key = group.empty() ? y : prefix + as_label(row[column(t, group)]);
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) out.push_back({key, {}, line});
        out[it->second].points.emplace_back(as_real(row[cx]), as_real(row[cy]));
    }
    return out;
}

double wrap_phase(double p) { return std::remainder(p, 2.0 * std::numbers::pi); }

} // namespace

// ---------------------------------------------------------------------------
// command line

namespace {

struct Params {
    int n = 4;
    std::string theta = "0.7";
    int m_max = 60;
    std::optional<int> detect;
    double alpha = kDefaultAlpha;
    std::optional<double> radius;
    std::optional<std::size_t> points;
    std::string out;
    std::string format = "csv";
    bool plot = false;
    std::string method = "matrix_power";
    std::string table = "weights";
    std::vector<int> m_list;
    int window = ClassifierOptions{}.window;
    double eps = ClassifierOptions{}.eps;
    double delta = ClassifierOptions{}.delta;
    int average = 1;
    std::vector<std::string> recipes;
    std::string manifest;
};

struct Output {
    std::string name;  // file name inside the output directory (figures) or empty
    std::string data;
    std::optional<PlotSpec> plot;
};

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << data;
    f.close();
    if (!f) throw IoError("write to " + path.string() + " failed");
}

std::string render(const Table& t, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << to_json(t).dump(2) << '\n';
    } else {
        write_csv(os, t);
    }
    return os.str();
}

std::string render(const json& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    Table t;
    std::vector<Cell> row;
    for (const auto& [key, value] : j.items()) {
        t.header.push_back(key);
        if (value.is_number_integer()) row.emplace_back(value.get<std::int64_t>());
        else if (value.is_number()) row.emplace_back(value.get<double>());
        else row.emplace_back(value.dump());
    }
    t.rows.push_back(std::move(row));
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_common(const Params& p) {
    require(p.n >= 1 && p.n <= kMaxBosons, "--n must lie in 1.." + std::to_string(kMaxBosons));
    require(p.m_max >= 1 && p.m_max <= 100000, "--m-max must lie in 1..100000");
    if (p.detect) require(*p.detect >= 0 && *p.detect <= p.n, "--detect must lie in 0..N");
}

double single_theta(const Params& p) {
    const auto grid = parse_theta_grid(p.theta);
    require(grid.size() == 1, "this subcommand takes a single --theta value");
    return grid.front();
}

double trace_radius(const Params& p) {
    const double r = p.radius.value_or(kDefaultWindingRadius);
    require(r > 0.0 && r < 1.0, "--radius must lie in (0, 1)");
    return r;
}

std::size_t trace_points(const Params& p) {
    const std::size_t s = p.points.value_or(kDefaultWindingSamples);
    require(s >= 4 && s <= (std::size_t{1} << 24), "--points must lie in 4..16777216");
    return s;
}

ClassifierOptions classifier(const Params& p) {
    require(p.window >= 1, "--window must be >= 1");
    require(p.eps > 0.0 && p.delta > 0.0, "--eps and --delta must be positive");
    return {p.window, p.eps, p.delta};
}

json classifier_json(const ClassifierOptions& c) {
    return {{"window", c.window}, {"eps", c.eps}, {"delta", c.delta}};
}

// One subcommand evaluation: outputs plus the resolved parameters for the manifest.
struct Result {
    std::vector<Output> outputs;
    json parameters;
};

Result cmd_spectrum(const Params& p) {
    check_common(p);
    require(p.table == "weights" || p.table == "eigenphases", "--table must be weights or eigenphases");
    const double theta = single_theta(p);
    const auto spec = make_spectrum({p.n, theta});
    const bool phases = p.table == "eigenphases";
    const auto t = spectrum_table(spec, phases);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) {
        o.plot = phases ? PlotSpec{"eigenphases", "k", "e_k", group_series(t, "k", "e", "", "", false)}
                        : PlotSpec{"spectral weights", "n", "q(n,k)", group_series(t, "n", "q", "k", "k=", true)};
    }
    return {{o}, {{"N", p.n}, {"theta", theta}, {"table", p.table}}};
}

Result cmd_amplitudes(const Params& p) {
    check_common(p);
    const double theta = single_theta(p);
    const auto method = parse_amplitude_method(p.method);
    const double radius = p.radius.value_or(kDefaultCauchyRadius);
    require(radius > 0.0 && radius < 1.0, "--radius must lie in (0, 1)");
    const auto t = amplitudes_table(make_spectrum({p.n, theta}), p.m_max, method, p.detect, radius);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) o.plot = PlotSpec{"first-detection probabilities", "m", "|phi|^2",
                                  group_series(t, "m", "abs2", "n", "n=", true)};
    json params{{"N", p.n}, {"theta", theta}, {"m_max", p.m_max}, {"method", p.method}};
    params["detect"] = p.detect ? json(*p.detect) : json("all");
    if (method == AmplitudeMethod::cauchy) {
        params["radius"] = radius;
        params["points"] = "max(4096, 8m)";
    }
    return {{o}, params};
}

Result cmd_eigs(const Params& p) {
    check_common(p);
    const double theta = single_theta(p);
    const int detect = p.detect.value_or(0);
    const auto t = eigs_table(make_spectrum({p.n, theta}), detect);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) {
        PlotSpec s{"eigenvalues of T", "Re z", "Im z", group_series(t, "re", "im", "", "", false), true};
        o.plot = s;
    }
    return {{o}, {{"N", p.n}, {"theta", theta}, {"detect", detect}}};
}

Result cmd_entropy(const Params& p) {
    check_common(p);
    require(p.alpha > 0.0 && p.alpha != 1.0, "--alpha must be positive and != 1");
    const auto thetas = parse_theta_grid(p.theta);
    EntropyOptions opt{p.m_max, p.alpha, classifier(p), p.average};
    const auto t = entropy_table(p.n, thetas, opt);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) {
        o.plot = (p.m_max == 1 && thetas.size() > 1)
                     ? PlotSpec{"Renyi entropy", "theta", "S2", group_series(t, "theta", "S2", "", "", true)}
                     : PlotSpec{"Renyi entropy", "m", "S2", group_series(t, "m", "S2", "theta", "theta=", true)};
    }
    return {{o},
            {{"N", p.n}, {"theta", p.theta}, {"theta_grid", thetas}, {"m_max", p.m_max}, {"alpha", p.alpha},
             {"average", p.average}, {"classifier", classifier_json(opt.classifier)}}};
}

Result cmd_es(const Params& p) {
    check_common(p);
    const auto thetas = parse_theta_grid(p.theta);
    const auto t = es_table(p.n, thetas, p.m_max, p.m_list);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) {
        o.plot = thetas.size() > 1
                     ? PlotSpec{"entanglement spectrum", "theta", "xi", group_series(t, "theta", "xi", "n", "n=", false)}
                     : PlotSpec{"entanglement spectrum", "m", "xi", group_series(t, "m", "xi", "n", "n=", false)};
    }
    json params{{"N", p.n}, {"theta", p.theta}, {"theta_grid", thetas}, {"m_max", p.m_max}};
    params["m_list"] = p.m_list;
    return {{o}, params};
}

Result cmd_winding(const Params& p) {
    check_common(p);
    const double theta = single_theta(p);
    const double r = trace_radius(p);
    const auto s = trace_points(p);
    const auto j = winding_json(make_spectrum({p.n, theta}), r, s);
    return {{{"", render(j, p.format), std::nullopt}}, {{"N", p.n}, {"theta", theta}, {"radius", r}, {"samples", s}}};
}

PlotSpec trace_plot(const Table& t) {
    PlotSeries s{"phase f(omega)", {}, false};
    const auto cw = column(t, "omega"), cp = column(t, "phase");
    for (const auto& row : t.rows) s.points.emplace_back(wrap_phase(as_real(row[cp])), as_real(row[cw]));
    return {"phase of the generating function", "f(omega) mod 2pi", "omega", {s}};
}

Result cmd_gf_trace(const Params& p) {
    check_common(p);
    const double theta = single_theta(p);
    const double r = trace_radius(p);
    const auto s = trace_points(p);
    const auto t = gf_trace_table(make_spectrum({p.n, theta}), r, s);
    Output o{"", render(t, p.format), std::nullopt};
    if (p.plot) o.plot = trace_plot(t);
    return {{o}, {{"N", p.n}, {"theta", theta}, {"radius", r}, {"samples", s}}};
}

// ---------------------------------------------------------------------------
// figure recipes

struct Recipe {
    std::vector<Output> outputs;
    json parameters = json::object();
};

std::string csv(const Table& t) { return render(t, "csv"); }

Recipe fig1(bool plot) {
    const auto spec = make_spectrum({8, 0.7});
    const auto t = gf_trace_table(spec, kDefaultWindingRadius, kDefaultWindingSamples);
    Recipe r;
    r.outputs.push_back({"fig1_trace.csv", csv(t), plot ? std::optional(trace_plot(t)) : std::nullopt});
    r.outputs.push_back({"fig1_winding.json", render(winding_json(spec, kDefaultWindingRadius, kDefaultWindingSamples), "json"), std::nullopt});
    r.parameters = {{"N", 8}, {"theta", 0.7}, {"radius", kDefaultWindingRadius}, {"samples", kDefaultWindingSamples}};
    return r;
}

Recipe fig2(bool plot) {
    const std::vector<std::pair<std::string, std::string>> panels{
        {"a", "0.7"}, {"b", "0.5"}, {"c", "pi/6"}, {"d", "pi/6+1e-2"}, {"e", "pi/7"}, {"f", "pi/7+1e-2"}};
    auto tables = parallel_map<Table>(panels.size(), [&](std::size_t i) {
        return eigs_table(make_spectrum({50, parse_theta(panels[i].second)}), 0);
    });
    Recipe r;
    json thetas = json::object();
    for (std::size_t i = 0; i < panels.size(); ++i) {
        std::optional<PlotSpec> s;
        if (plot) s = PlotSpec{"eigenvalues of T, theta = " + panels[i].second, "Re z", "Im z",
                               group_series(tables[i], "re", "im", "", "", false), true};
        r.outputs.push_back({"fig2" + panels[i].first + "_eigs.csv", csv(tables[i]), s});
        thetas[panels[i].first] = panels[i].second;
    }
    r.parameters = {{"N", 50}, {"detect", 0}, {"theta", thetas}};
    return r;
}

Recipe fig3(bool plot) {
    const std::string grid = "0:pi:1001";
    const auto t = unitary_table(50, parse_theta_grid(grid));
    Recipe r;
    std::optional<PlotSpec> s;
    if (plot) {
        auto series = group_series(t, "theta", "re_u1", "", "", true);
        auto v = group_series(t, "theta", "re_v1", "", "", true);
        series.insert(series.end(), v.begin(), v.end());
        s = PlotSpec{"unitary amplitudes, N = 50", "theta", "Re", series};
    }
    r.outputs.push_back({"fig3_unitary.csv", csv(t), s});
    r.parameters = {{"N", 50}, {"theta", grid}};
    return r;
}

Recipe fig4(bool plot) {
    const std::string grid = "0:2*pi:1001";
    EntropyOptions unitary{1, kDefaultAlpha, {}, 1};
    const auto a = entropy_table(20, parse_theta_grid(grid), unitary);
    EntropyOptions monitored{100, kDefaultAlpha, {}, 1};
    const auto b = entropy_table(20, {0.01, 0.1}, monitored);
    Recipe r;
    std::optional<PlotSpec> sa, sb;
    if (plot) {
        sa = PlotSpec{"S2 without measurement, N = 20", "theta", "S2", group_series(a, "theta", "S2", "", "", true)};
        sb = PlotSpec{"S2 under monitoring, N = 20", "m", "S2", group_series(b, "m", "S2", "theta", "theta=", true)};
    }
    r.outputs.push_back({"fig4a_entropy.csv", csv(a), sa});
    r.outputs.push_back({"fig4b_entropy.csv", csv(b), sb});
    r.parameters = {{"N", 20},
                    {"a", {{"theta", grid}, {"m_max", 1}}},
                    {"b", {{"theta", {0.01, 0.1}}, {"m_max", 100}, {"classifier", classifier_json({})}}}};
    return r;
}

Recipe fig5(bool plot) {
    const std::string grid_a = "0:pi:501", grid_b = "1e-3:2e-2:191";
    const auto a = es_table(4, parse_theta_grid(grid_a), 1, {1});
    const auto b = es_table(4, parse_theta_grid(grid_b), 50, {50});
    Recipe r;
    std::optional<PlotSpec> sa, sb;
    if (plot) {
        sa = PlotSpec{"ES, N = 4, m = 1", "theta", "xi", group_series(a, "theta", "xi", "n", "n=", false)};
        sb = PlotSpec{"ES, N = 4, m = 50", "theta", "xi", group_series(b, "theta", "xi", "n", "n=", false)};
    }
    r.outputs.push_back({"fig5a_es.csv", csv(a), sa});
    r.outputs.push_back({"fig5b_es.csv", csv(b), sb});
    r.parameters = {{"N", 4}, {"a", {{"theta", grid_a}, {"m", 1}}}, {"b", {{"theta", grid_b}, {"m", 50}}}};
    return r;
}

Recipe fig6(bool plot) {
    Recipe r;
    json panels = json::object();
    for (const auto& [panel, l] : std::vector<std::pair<std::string, int>>{{"a", 4}, {"b", 3}}) {
        const std::string grid = "pi/" + std::to_string(l) + "-5e-5:pi/" + std::to_string(l) + "+5e-5:201";
        const auto thetas = parse_theta_grid(grid);
        for (int m : {50, 51}) {
            const auto t = es_table(4, thetas, m, {m});
            std::optional<PlotSpec> s;
            if (plot) s = PlotSpec{"ES near pi/" + std::to_string(l) + ", m = " + std::to_string(m), "theta",
                                   "xi", group_series(t, "theta", "xi", "n", "n=", false)};
            r.outputs.push_back({"fig6" + panel + "_m" + std::to_string(m) + "_es.csv", csv(t), s});
        }
        panels[panel] = {{"theta", grid}, {"m", {50, 51}}};
    }
    r.parameters = {{"N", 4}, {"panels", panels}};
    return r;
}

Recipe fig7(bool plot) {
    Recipe r;
    EntropyOptions opt{60, kDefaultAlpha, {}, 1};
    for (const auto& [panel, expr] : std::vector<std::pair<std::string, std::string>>{{"a", "pi/4"}, {"b", "pi/3"}}) {
        const auto t = entropy_table(4, {parse_theta(expr)}, opt);
        std::optional<PlotSpec> s;
        if (plot) s = PlotSpec{"S2, N = 4, theta = " + expr, "m", "S2", group_series(t, "m", "S2", "", "", true)};
        r.outputs.push_back({"fig7" + panel + "_entropy.csv", csv(t), s});
    }
    r.parameters = {{"N", 4}, {"theta", {{"a", "pi/4"}, {"b", "pi/3"}}}, {"m_max", 60},
                    {"classifier", classifier_json({})}};
    return r;
}

const std::map<std::string, Recipe (*)(bool)>& recipes() {
    static const std::map<std::string, Recipe (*)(bool)> table{
        {"fig1", fig1}, {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4},
        {"fig5", fig5}, {"fig6", fig6}, {"fig7", fig7}};
    return table;
}

// ---------------------------------------------------------------------------
// emission

json manifest_json(const std::string& subcommand, const std::vector<std::string>& argv,
                   const json& parameters, const std::vector<std::string>& outputs) {
    return {{"artifact", kArtifactVersion}, {"subcommand", subcommand}, {"argv", argv},
            {"parameters", parameters}, {"outputs", outputs}};
}

std::string svg_name(const std::string& path) {
    const auto dot = path.rfind('.');
    return (dot == std::string::npos || path.find('/', dot) != std::string::npos ? path : path.substr(0, dot)) + ".svg";
}

void emit_single(const std::string& subcommand, const std::vector<std::string>& argv, const Params& p,
                 Result result, std::ostream& out) {
    auto& o = result.outputs.front();
    if (p.out.empty()) {
        if (p.plot) throw std::invalid_argument("--plot requires --out");
        out << o.data;
        return;
    }
    std::vector<std::string> written{p.out};
    write_file(p.out, o.data);
    if (o.plot) {
        written.push_back(svg_name(p.out));
        write_file(written.back(), render_svg(*o.plot));
    }
    write_file(p.out + ".manifest.json", manifest_json(subcommand, argv, result.parameters, written).dump(2) + "\n");
}

void emit_figures(const Params& p, std::ostream& out) {
    std::vector<std::string> names = p.recipes;
    if (names.empty() || std::find(names.begin(), names.end(), "all") != names.end()) {
        names.clear();
        for (const auto& [name, fn] : recipes()) names.push_back(name);
    }
    for (const auto& name : names) {
        if (!recipes().count(name)) throw std::invalid_argument("unknown figure recipe '" + name + "'");
    }
    const fs::path dir = p.out.empty() ? fs::path("figures") : fs::path(p.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

    for (const auto& name : names) {
        const Recipe r = recipes().at(name)(p.plot);
        std::vector<std::string> written;
        for (const auto& o : r.outputs) {
            written.push_back((dir / o.name).string());
            write_file(written.back(), o.data);
            if (o.plot) {
                written.push_back(svg_name(written.back()));
                write_file(written.back(), render_svg(*o.plot));
            }
        }
        std::vector<std::string> argv{"figures", name, "--out", dir.string()};
        if (p.plot) argv.push_back("--plot");
        write_file(dir / (name + ".manifest.json"),
                   manifest_json("figures", argv, {{"recipe", name}, {"recipe_parameters", r.parameters}}, written)
                           .dump(2) + "\n");
        out << name << ": " << written.size() << " files in " << dir.string() << '\n';
    }
}

void add_common(CLI::App* sub, Params& p, bool grid) {
    sub->add_option("--n", p.n, "number of bosons N")->capture_default_str();
    sub->add_option("--theta", p.theta,
                    grid ? "time step J tau / hbar: expression (pi/3, pi/6+1e-2) or start:stop:count grid"
                         : "time step J tau / hbar: expression such as pi/3 or pi/6+1e-2")
        ->capture_default_str();
    sub->add_option("--out", p.out, "output file (default: stdout); a manifest is written beside it");
    sub->add_option("--format", p.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_flag("--plot", p.plot, "also write an SVG rendering next to --out");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int run_manifest(const std::string& path, std::ostream& out, std::ostream& err, int depth) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read manifest " + path);
    json m;
    try {
        f >> m;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed manifest " + path + ": " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw std::invalid_argument("manifest " + path + " has no argv");
    if (m.value("artifact", "") != kArtifactVersion) {
        err << "qmon: warning: manifest written by '" << m.value("artifact", "?") << "', replaying with '"
            << kArtifactVersion << "'\n";
    }
    return dispatch(m["argv"].get<std::vector<std::string>>(), out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    if (depth > 1) throw std::invalid_argument("a manifest may not refer to another manifest");

    Params p;
    CLI::App app{"qmon: monitored evolution of N bosons in a double well", "qmon"};
    app.require_subcommand(0, 1);
    app.add_option("--manifest", p.manifest, "replay a run manifest");

    auto* spectrum = app.add_subcommand("spectrum", "spectral weights q(n,k) or eigenphases e_k");
    add_common(spectrum, p, false);
    spectrum->add_option("--table", p.table, "weights or eigenphases")->capture_default_str();

    auto* amplitudes = app.add_subcommand("amplitudes", "first-detection amplitudes phi(m; n)");
    add_common(amplitudes, p, false);
    amplitudes->add_option("--m-max", p.m_max, "number of measurements M")->capture_default_str();
    amplitudes->add_option("--detect", p.detect, "detection site n (default: all supported)");
    amplitudes->add_option("--method", p.method, "oracle, matrix_power, renewal or cauchy")->capture_default_str();
    amplitudes->add_option("--radius", p.radius, "contour radius for the cauchy method (default 0.9)");

    auto* eigs = app.add_subcommand("eigs", "eigenvalues of the monitored-evolution operator T_n");
    add_common(eigs, p, false);
    eigs->add_option("--detect", p.detect, "detection site n (default 0)");

    auto* entropy = app.add_subcommand("entropy", "Renyi entanglement entropy and stationarity class");
    add_common(entropy, p, true);
    entropy->add_option("--m-max", p.m_max, "number of measurements M")->capture_default_str();
    entropy->add_option("--alpha", p.alpha, "Renyi order")->capture_default_str();
    entropy->add_option("--window", p.window, "classifier window W")->capture_default_str();
    entropy->add_option("--eps", p.eps, "stationarity tolerance")->capture_default_str();
    entropy->add_option("--delta", p.delta, "minimum switching step")->capture_default_str();
    entropy->add_option("--average", p.average, "moving-average window applied before classification")
        ->capture_default_str();

    auto* es = app.add_subcommand("es", "entanglement spectrum xi_n = -ln rho_n");
    add_common(es, p, true);
    es->add_option("--m-max", p.m_max, "number of measurements M")->capture_default_str();
    es->add_option("--m-list", p.m_list, "only these m values")->delimiter(',');

    auto* winding = app.add_subcommand("winding", "winding number of u^/(1+u^) on |z| = r");
    add_common(winding, p, false);
    winding->add_option("--radius", p.radius, "contour radius (default 1-1e-6)");
    winding->add_option("--points", p.points, "base sample count (default 4096)");

    auto* trace = app.add_subcommand("gf-trace", "samples of u^/(1+u^) on |z| = r");
    add_common(trace, p, false);
    trace->add_option("--radius", p.radius, "contour radius (default 1-1e-6)");
    trace->add_option("--points", p.points, "sample count (default 4096)");

    auto* figures = app.add_subcommand("figures", "figure recipes fig1..fig7 (or all)");
    figures->add_option("recipes", p.recipes, "recipe names");
    figures->add_option("--out", p.out, "output directory (default ./figures)");
    figures->add_flag("--plot", p.plot, "also write SVG renderings");

    std::vector<const char*> argv{"qmon"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }

    if (!p.manifest.empty()) {
        if (!app.get_subcommands().empty()) throw std::invalid_argument("--manifest cannot be combined with a subcommand");
        return run_manifest(p.manifest, out, err, depth);
    }
    if (app.get_subcommands().empty()) throw std::invalid_argument("a subcommand is required (see --help)");

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "figures") {
        emit_figures(p, out);
        return kExitOk;
    }
    Result r = name == "spectrum"     ? cmd_spectrum(p)
               : name == "amplitudes" ? cmd_amplitudes(p)
               : name == "eigs"       ? cmd_eigs(p)
               : name == "entropy"    ? cmd_entropy(p)
               : name == "es"         ? cmd_es(p)
               : name == "winding"    ? cmd_winding(p)
                                      : cmd_gf_trace(p);
    emit_single(name, args, p, std::move(r), out);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err, 0);
    } catch (const IoError& e) {
        err << "qmon: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConvergenceError& e) {
        err << "qmon: numerical failure: " << e.what();
        if (!e.partial().empty()) err << " (last estimate " << e.partial().front().real() << ")";
        err << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "qmon: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "qmon: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "qmon: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "qmon: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace qmon::cli
