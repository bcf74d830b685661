#include "qgraph/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qgraph/boundary.hpp"
#include "qgraph/fem.hpp"
#include "qgraph/green.hpp"
#include "qgraph/heat.hpp"
#include "qgraph/json_io.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/walks.hpp"

namespace qgraph {

using nlohmann::ordered_json;

namespace {

ordered_json header(const std::string& command)
{
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["command"] = command;
    return doc;
}

std::ofstream open_csv(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? sep : "") + parts[i];
    }
    return out;
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

ordered_json graph_json(const MetricGraph& g)
{
    ordered_json doc;
    ordered_json vertices = ordered_json::array();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        vertices.push_back(g.vertex_id(v));
    }
    ordered_json edges = ordered_json::array();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        ordered_json edge;
        edge["id"] = g.edge_id(e);
        if (g.kind(e) == EdgeKind::external) {
            edge["kind"] = "external";
            edge["vertex"] = g.vertex_id(g.vertex_at(e, Side::minus));
        } else {
            edge["kind"] = "internal";
            edge["from"] = g.vertex_id(g.vertex_at(e, Side::minus));
            edge["to"] = g.vertex_id(g.vertex_at(e, Side::plus));
            edge["length"] = g.edge_length(e);
        }
        edges.push_back(edge);
    }
    doc["vertices"] = vertices;
    doc["edges"] = edges;
    doc["endpoint_dimension"] = g.endpoint_dimension();
    doc["compact"] = g.is_compact();
    doc["tadpoles"] = g.tadpoles().size();
    return doc;
}

ordered_json positivity_json(const PositivityReport& p)
{
    ordered_json doc;
    doc["label"] = p.label();
    doc["positive"] = p.positive;
    doc["strictly_positive"] = p.strictly_positive;
    doc["locally_strictly_positive"] = p.locally_strictly_positive;
    doc["local"] = p.local;
    doc["method"] = p.method;
    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    doc["positive_from"] = opt(p.positive_from);
    doc["strict_from"] = opt(p.strict_from);
    doc["local_from"] = opt(p.local_from);
    return doc;
}

ordered_json notes_json(const std::vector<std::string>& notes)
{
    ordered_json out = ordered_json::array();
    for (const auto& n : notes) {
        out.push_back(n);
    }
    return out;
}

std::vector<std::vector<double>> sample_grid(const MetricGraph& g, std::size_t count, double x_max)
{
    std::vector<std::vector<double>> out(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        out[e] = edge_samples(g, e, count, x_max);
    }
    return out;
}

// Midpoint of every internal edge and x = 1/2 on every external edge.
std::vector<GraphPoint> probe_points(const MetricGraph& g)
{
    std::vector<GraphPoint> out;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const double x = g.kind(e) == EdgeKind::external ? 0.5 : 0.5 * g.edge_length(e);
        out.push_back({e, x});
    }
    return out;
}

std::vector<double> kappas_or(const RunConfig& c, std::vector<double> fallback)
{
    return c.kappa_grid.empty() ? fallback : c.kappa_grid;
}

double large_kappa(const BoundaryConditions& bc)
{
    const RVector& ev = bc.l_spectrum();
    double norm = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        norm = std::max(norm, std::abs(ev(i)));
    }
    return std::max(10.0, 4.0 * (norm + 1.0));
}

// ---------------------------------------------------------------- commands

int cmd_validate(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const Inertia in = inertia(p.bc);
    const PositivityReport pos = positivity_class(p.bc, default_kappa_grid(p.bc));
    ordered_json doc = header("validate");
    doc["graph"] = graph_json(p.graph);
    ordered_json bc;
    bc["A"] = matrix_json(p.bc.A());
    bc["B"] = matrix_json(p.bc.B());
    bc["P"] = matrix_json(p.bc.canonical().P);
    bc["L"] = matrix_json(p.bc.canonical().L);
    ordered_json spec = ordered_json::array();
    for (Eigen::Index i = 0; i < p.bc.l_spectrum().size(); ++i) {
        spec.push_back(p.bc.l_spectrum()(i));
    }
    bc["L_spectrum"] = spec;
    bc["inertia"] = {{"n_plus", in.n_plus}, {"n_minus", in.n_minus}, {"n_zero", in.n_zero}};
    bc["local"] = p.bc.is_local();
    bc["positivity"] = positivity_json(pos);
    doc["bc"] = bc;
    write_json(c.out / "validate.json", doc);
    log << "valid: dim K = " << p.graph.endpoint_dimension() << ", n+ = " << in.n_plus << ", n0 = " << in.n_zero
        << ", " << pos.label() << '\n';
    return EXIT_OK;
}

int cmd_spectrum(const RunConfig& c, const Problem& p, std::ostream& log)
{
    SpectrumReport r = spectrum_report(p.graph, p.bc, c.k_max);
    ordered_json doc = header("spectrum");
    doc["k_max"] = c.k_max;
    const ordered_json body = spectrum_json(r);
    for (auto it = body.begin(); it != body.end(); ++it) {
        doc[it.key()] = it.value();
    }
    write_json(c.out / "spectrum.json", doc);
    std::vector<std::string> neg;
    for (const auto& e : r.negative.values) {
        neg.push_back(fmt(e.lambda) + (e.multiplicity > 1 ? " (x" + std::to_string(e.multiplicity) + ")" : ""));
    }
    log << r.negative_count << " negative eigenvalues [" << join(neg, ", ") << "], zero modes " << r.zero.dimension
        << ", " << r.positive.values.size() << " positive eigenvalues up to k = " << c.k_max << '\n';
    return EXIT_OK;
}

int cmd_green(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const std::vector<double> kappas = kappas_or(c, {10.0});
    ordered_json doc = header("green");
    ordered_json runs = ordered_json::array();
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const double kappa = kappas[i];
        if (!(kappa > 0.0)) {
            throw std::invalid_argument("kappa must be positive");
        }
        GreenKernel kernel(p.graph, p.bc, cplx(0.0, kappa));
        const double x_max = c.x_max.value_or(5.0 * std::max(1.0, 1.0 / kappa));
        const auto grid = sample_grid(p.graph, c.grid, x_max);
        const std::string name = "green_kappa_" + std::to_string(i) + ".csv";
        std::ofstream csv = open_csv(c.out / name);
        csv << "edge_x,x,edge_y,y,re,im\n";
        double min_re = std::numeric_limits<double>::infinity();
        double max_im = 0.0;
        double sym = 0.0;
        for (std::size_t e = 0; e < grid.size(); ++e) {
            for (std::size_t f = 0; f < grid.size(); ++f) {
                for (double x : grid[e]) {
                    for (double y : grid[f]) {
                        const cplx v = kernel({e, x}, {f, y});
                        sym = std::max(sym, std::abs(v - std::conj(kernel({f, y}, {e, x}))));
                        min_re = std::min(min_re, v.real());
                        max_im = std::max(max_im, std::abs(v.imag()));
                        csv << p.graph.edge_id(e) << ',' << format_double(x) << ',' << p.graph.edge_id(f) << ','
                            << format_double(y) << ',' << format_double(v.real()) << ',' << format_double(v.imag())
                            << '\n';
                    }
                }
            }
        }
        ordered_json run;
        run["kappa"] = kappa;
        run["csv"] = name;
        run["formula"] = to_string(kernel.formula());
        run["guard_ratio"] = kernel.guard_ratio();
        run["x_max"] = x_max;
        run["min_real"] = min_re;
        run["max_abs_imag"] = max_im;
        run["symmetry_residual"] = sym;
        runs.push_back(run);
    }
    doc["runs"] = runs;
    write_json(c.out / "green.json", doc);
    log << "green: " << kappas.size() << " kappa values written to " << c.out.string() << '\n';
    return EXIT_OK;
}

const char* side_name(Side s)
{
    return s == Side::minus ? "-" : "+";
}

int cmd_walks(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const MetricGraph& g = p.graph;
    std::ofstream dump = open_csv(c.out / "walks.jsonl");
    std::size_t total = 0;
    for (std::size_t j = 0; j < g.edge_count(); ++j) {
        for (std::size_t jp = 0; jp < g.edge_count(); ++jp) {
            for (Side s : {Side::minus, Side::plus}) {
                for (Side sp : {Side::minus, Side::plus}) {
                    for (const Walk& w : enumerate_walks(g, j, jp, s, sp, c.cutoff)) {
                        ordered_json line;
                        line["sigma"] = side_name(s);
                        line["sigma_prime"] = side_name(sp);
                        ordered_json edges = ordered_json::array();
                        for (std::size_t e : w.edges) {
                            edges.push_back(g.edge_id(e));
                        }
                        ordered_json vertices = ordered_json::array();
                        for (std::size_t v : w.vertices) {
                            vertices.push_back(g.vertex_id(v));
                        }
                        line["edges"] = edges;
                        line["vertices"] = vertices;
                        line["metric_len"] = w.metric_length;
                        line["comb_len"] = w.combinatorial_length();
                        line["reflectionless"] = w.reflectionless();
                        dump << line.dump() << '\n';
                        ++total;
                    }
                }
            }
        }
    }

    ordered_json doc = header("walks");
    doc["cutoff"] = c.cutoff;
    doc["walks"] = total;
    ordered_json series = ordered_json::array();
    const auto points = probe_points(g);
    bool all_ok = true;
    for (double kappa : kappas_or(c, {4.0, 6.0, 10.0})) {
        for (const auto& x : points) {
            for (const auto& y : points) {
                SeriesResult r = walk_series_green(g, p.bc, x, y, kappa, c.cutoff);
                const cplx closed = greens_function(g, p.bc, x, y, cplx(0.0, kappa));
                const double diff = std::abs(r.value - closed);
                const bool ok = diff <= r.bound();
                all_ok = all_ok && ok;
                ordered_json row;
                row["kappa"] = kappa;
                row["edge_x"] = g.edge_id(x.edge);
                row["x"] = x.x;
                row["edge_y"] = g.edge_id(y.edge);
                row["y"] = y.x;
                row["series"] = complex_json(r.value);
                row["closed_form"] = complex_json(closed);
                row["difference"] = diff;
                row["tail_bound"] = r.tail_bound;
                row["rounding_bound"] = r.rounding_bound;
                row["walk_count"] = r.walk_count;
                row["within_bound"] = ok;
                series.push_back(row);
            }
        }
    }
    doc["series"] = series;
    doc["all_within_bound"] = all_ok;
    write_json(c.out / "walks.json", doc);
    log << total << " walks up to metric length " << c.cutoff << "; series "
        << (all_ok ? "agrees with" : "DISAGREES with") << " the closed form\n";
    return EXIT_OK;
}

double bump(double x)
{
    return std::max(0.0, 1.0 - std::abs(x - 1.0));
}

int cmd_heat(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const HeatKernelSpec spec = detect_heat_family(p.graph, p.bc);
    const StarHeatKernel kernel(spec);
    if (c.times.empty()) {
        throw std::invalid_argument("--times needs at least one value");
    }
    const double t_max = *std::max_element(c.times.begin(), c.times.end());
    const double x_max = c.x_max.value_or(default_heat_cutoff(spec, t_max));
    const std::size_t d = spec.degree;

    ordered_json doc = header("heat");
    doc["family"] = spec.family == HeatFamily::standard ? "standard" : "robin";
    if (spec.family == HeatFamily::robin) {
        doc["H"] = matrix_json(spec.H);
    }
    doc["x_max"] = x_max;

    StarSamples psi0 = make_star_samples(d, x_max, 401);
    for (std::size_t i = 0; i < psi0.grid.size(); ++i) {
        psi0.values[0][i] = bump(psi0.grid[i]);
    }
    std::ofstream evo = open_csv(c.out / "heat_evolution.csv");
    evo << "t,edge,x,value\n";
    for (std::size_t e = 0; e < d; ++e) {
        for (std::size_t i = 0; i < psi0.grid.size(); ++i) {
            evo << "0," << p.graph.edge_id(e) << ',' << format_double(psi0.grid[i]) << ','
                << format_double(psi0.values[e][i]) << '\n';
        }
    }

    ordered_json runs = ordered_json::array();
    std::vector<double> grid = edge_samples(p.graph, 0, c.grid, x_max);
    for (std::size_t n = 0; n < c.times.size(); ++n) {
        const double t = c.times[n];
        const std::string name = "heat_kernel_t" + std::to_string(n) + ".csv";
        std::ofstream csv = open_csv(c.out / name);
        csv << "x,y,edge_x,edge_y,value\n";
        double min_entry = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < d; ++e) {
            for (std::size_t f = 0; f < d; ++f) {
                for (double x : grid) {
                    for (double y : grid) {
                        const double v = kernel.entry(t, e, x, f, y).real();
                        min_entry = std::min(min_entry, v);
                        csv << format_double(x) << ',' << format_double(y) << ',' << p.graph.edge_id(e) << ','
                            << p.graph.edge_id(f) << ',' << format_double(v) << '\n';
                    }
                }
            }
        }
        HeatApplyResult out = heat_apply(kernel, psi0, t);
        for (std::size_t e = 0; e < d; ++e) {
            for (std::size_t i = 0; i < out.output.grid.size(); ++i) {
                evo << format_double(t) << ',' << p.graph.edge_id(e) << ',' << format_double(out.output.grid[i])
                    << ',' << format_double(out.output.values[e][i]) << '\n';
            }
        }
        ordered_json run;
        run["t"] = t;
        run["csv"] = name;
        run["min_kernel_entry"] = min_entry;
        run["min_evolved_value"] = out.min_value;
        run["max_abs_imag"] = out.max_imag;
        run["notes"] = notes_json(out.notes);
        runs.push_back(run);
    }
    doc["runs"] = runs;
    doc["initial_data"] = "hat function centred at x = 1 on the first edge";
    write_json(c.out / "heat.json", doc);
    log << "heat: " << doc["family"].get<std::string>() << " star of degree " << d << ", " << c.times.size()
        << " times written to " << c.out.string() << '\n';
    return EXIT_OK;
}

int cmd_oracle(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const double x_max = c.x_max.value_or(20.0);
    DiscreteForm form = assemble(p.graph, p.bc, c.mesh_h, x_max);
    const std::size_t count = std::min(c.count, form.dimension());
    std::vector<double> ev = oracle_eigenvalues(form, count);
    ordered_json doc = header("oracle");
    doc["mesh_h"] = c.mesh_h;
    if (!p.graph.is_compact()) {
        doc["x_max"] = x_max;
    }
    doc["dimension"] = form.dimension();
    doc["eigenvalues"] = ev;
    doc["notes"] = notes_json(form.notes);
    write_json(c.out / "oracle.json", doc);
    std::vector<std::string> shown;
    for (std::size_t i = 0; i < std::min<std::size_t>(ev.size(), 5); ++i) {
        shown.push_back(fmt(ev[i]));
    }
    log << "oracle: " << ev.size() << " eigenvalues, lowest [" << join(shown, ", ") << "]\n";
    return EXIT_OK;
}

// ---------------------------------------------------------------- verify

struct Check {
    std::string name;
    std::string status;   // pass, fail, skipped
    std::string detail;
};

Check pass_or_fail(std::string name, bool ok, std::string detail)
{
    return {std::move(name), ok ? "pass" : "fail", std::move(detail)};
}

int cmd_verify(const RunConfig& c, const Problem& p, std::ostream& log)
{
    const MetricGraph& g = p.graph;
    const BoundaryConditions& bc = p.bc;
    std::vector<Check> checks;

    const Inertia in = inertia(bc);
    const PositivityReport pos = positivity_class(bc, default_kappa_grid(bc));
    const SpectrumPart neg = negative_spectrum(g, bc);
    const Certificates cert = certificates(g, bc);
    std::size_t count = 0;
    for (const auto& e : neg.values) {
        count += e.multiplicity;
    }

    {
        bool ok = count <= cert.n_plus_bound;
        std::string detail = std::to_string(count) + " negative eigenvalues, n+ = " + std::to_string(cert.n_plus_bound);
        if (g.internal_count() == 0) {
            ok = ok && count == cert.n_plus_bound;
            detail += " (equality expected without internal edges)";
        }
        checks.push_back(pass_or_fail("negative count bound", ok, detail));
    }

    if (g.internal_count() > 0) {
        bool ok = true;
        double lowest = neg.values.empty() ? 0.0 : neg.values.front().lambda;
        for (const auto& e : neg.values) {
            ok = ok && e.lambda >= cert.lower_bound - c.tol;
        }
        const std::string bound = "-s^2 = " + fmt(cert.lower_bound + 0.0);
        checks.push_back(pass_or_fail("lower bound", ok,
                                      neg.values.empty() ? "no negative eigenvalues, " + bound
                                                         : "lowest " + fmt(lowest) + ", " + bound));
    } else if (cert.n_plus_bound > 0) {
        const double expected = -cert.l_plus_norm * cert.l_plus_norm;
        const double lowest = neg.values.empty() ? 0.0 : neg.values.front().lambda;
        const bool ok = std::abs(lowest - expected) <= c.tol * std::max(1.0, std::abs(expected));
        checks.push_back(pass_or_fail("bottom eigenvalue", ok,
                                      "lowest " + fmt(lowest) + ", -||L+||^2 = " + fmt(expected)));
    } else {
        checks.push_back({"lower bound", "skipped", "no internal edges and n+ = 0: no negative spectrum"});
    }

    if (in.n_plus == 0) {
        const ZeroModes z = zero_modes(g, bc);
        checks.push_back(pass_or_fail("zero modes", z.dimension <= in.n_zero,
                                      "dim Ker = " + std::to_string(z.dimension) + ", n0 = " + std::to_string(in.n_zero)));
    } else {
        checks.push_back({"zero modes", "skipped", "needs n+ = 0"});
    }

    const double kappa = large_kappa(bc);
    const std::vector<double> kappas = kappas_or(c, {kappa, 2.0 * kappa});
    GreenScanOptions scan_options;
    scan_options.grid_density = c.grid;
    scan_options.x_max = c.x_max;
    const GreenPositivityReport green = greens_positivity_scan(g, bc, kappas, scan_options);
    if (green.applicable) {
        const KappaScan& last = green.scans.back();
        const bool ok = green.requirement == "positive" ? last.all_positive : last.all_nonnegative;
        checks.push_back(pass_or_fail("green positivity", ok,
                                      green.theorem + ": min entry " + fmt(last.min_entry) + " at kappa " +
                                          fmt(last.kappa) + " over " + std::to_string(last.samples) + " samples"));
    } else {
        checks.push_back({"green positivity", "skipped", join(green.notes, "; ")});
    }

    const bool heat_theorem = pos.strictly_positive || (g.internal_count() == 0 && pos.positive) ||
                              (pos.locally_strictly_positive && !g.has_tadpoles());
    if (!g.is_star()) {
        checks.push_back({"heat positivity", "skipped", "closed-form heat kernel needs a star graph"});
    } else if (!heat_theorem) {
        checks.push_back({"heat positivity", "skipped", "no positivity theorem applies"});
    } else {
        std::optional<HeatKernelSpec> spec;
        try {
            spec = detect_heat_family(g, bc);
        } catch (const HeatError& e) {
            checks.push_back({"heat positivity", "skipped", e.what()});
        }
        if (spec) {
            const StarHeatKernel kernel(*spec);
            double min_entry = std::numeric_limits<double>::infinity();
            double min_out = std::numeric_limits<double>::infinity();
            for (double t : c.times) {
                const double x_max = c.x_max.value_or(default_heat_cutoff(*spec, t));
                const std::vector<double> grid = edge_samples(g, 0, c.grid, x_max);
                for (std::size_t e = 0; e < spec->degree; ++e) {
                    for (std::size_t f = 0; f < spec->degree; ++f) {
                        for (double x : grid) {
                            for (double y : grid) {
                                min_entry = std::min(min_entry, kernel.entry(t, e, x, f, y).real());
                            }
                        }
                    }
                }
                StarSamples psi0 = make_star_samples(spec->degree, x_max, 201);
                for (std::size_t i = 0; i < psi0.grid.size(); ++i) {
                    psi0.values[0][i] = bump(psi0.grid[i]);
                }
                min_out = std::min(min_out, heat_apply(kernel, psi0, t).min_value);
            }
            checks.push_back(pass_or_fail("heat positivity", min_entry >= -c.tol && min_out >= -c.tol,
                                          "min kernel entry " + fmt(min_entry) + ", min evolved value " + fmt(min_out)));
        }
    }

    if (!bc.is_local()) {
        checks.push_back({"series agreement", "skipped", "boundary conditions are not local"});
    } else if (g.has_tadpoles()) {
        checks.push_back({"series agreement", "skipped", "graph has tadpoles"});
    } else {
        const auto points = probe_points(g);
        std::size_t compared = 0;
        bool ok = true;
        double worst = 0.0;
        std::vector<std::string> skipped;
        for (double k : kappas_or(c, {kappa, 1.5 * kappa, 2.5 * kappa})) {
            try {
                for (const auto& x : points) {
                    for (const auto& y : points) {
                        SeriesResult r = walk_series_green(g, bc, x, y, k, c.cutoff);
                        const double diff = std::abs(r.value - greens_function(g, bc, x, y, cplx(0.0, k)));
                        ok = ok && diff <= r.bound();
                        worst = std::max(worst, r.bound() > 0.0 ? diff / r.bound() : diff);
                        ++compared;
                    }
                }
            } catch (const ConvergenceError&) {
                skipped.push_back(fmt(k));
            }
        }
        if (compared == 0) {
            checks.push_back({"series agreement", "skipped", "series does not converge at kappa " + join(skipped, ", ")});
        } else {
            std::string detail = std::to_string(compared) + " point pairs, worst |diff|/bound " + fmt(worst);
            if (!skipped.empty()) {
                detail += "; not convergent at kappa " + join(skipped, ", ");
            }
            checks.push_back(pass_or_fail("series agreement", ok, detail));
        }
    }

    bool failed = false;
    ordered_json doc = header("verify");
    ordered_json list = ordered_json::array();
    ordered_json skipped = ordered_json::array();
    for (const auto& ch : checks) {
        list.push_back({{"name", ch.name}, {"status", ch.status}, {"detail", ch.detail}});
        if (ch.status == "skipped") {
            skipped.push_back(ch.name);
        }
        failed = failed || ch.status == "fail";
    }
    const std::string summary = pos.label() + "; " + std::to_string(count) + " negative eigenvalues ≤ n₊=" +
                                std::to_string(cert.n_plus_bound);
    doc["summary"] = summary;
    doc["positivity"] = positivity_json(pos);
    doc["checks"] = list;
    doc["skipped"] = skipped;
    doc["violation"] = failed;
    write_json(c.out / "verify.json", doc);
    for (const auto& ch : checks) {
        log << "  [" << ch.status << "] " << ch.name << ": " << ch.detail << '\n';
    }
    log << summary << '\n';
    return failed ? EXIT_VIOLATION : EXIT_OK;
}

} // namespace

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> list = {"validate", "spectrum", "green", "walks", "heat", "oracle", "verify"};
    return list;
}

void check_config(const RunConfig& c)
{
    const auto& list = commands();
    if (std::find(list.begin(), list.end(), c.command) == list.end()) {
        throw std::invalid_argument("unknown command \"" + c.command + "\"; expected one of " + join(list, ", "));
    }
    if (c.input.empty()) {
        throw std::invalid_argument("--input is required");
    }
    if (!std::filesystem::exists(c.input)) {
        throw std::invalid_argument("input file " + c.input.string() + " does not exist");
    }
    if (!(c.tol > 0.0)) {
        throw std::invalid_argument("--tol must be positive");
    }
    if (!(c.k_max > 0.0)) {
        throw std::invalid_argument("--kmax must be positive");
    }
    if (!(c.mesh_h > 0.0)) {
        throw std::invalid_argument("--mesh-h must be positive");
    }
    if (!(c.cutoff > 0.0)) {
        throw std::invalid_argument("--cutoff must be positive");
    }
    if (c.x_max && !(*c.x_max > 0.0)) {
        throw std::invalid_argument("--xmax must be positive");
    }
    for (double k : c.kappa_grid) {
        if (!(k > 0.0)) {
            throw std::invalid_argument("--kappa-grid values must be positive");
        }
    }
    for (double t : c.times) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("--times values must be positive");
        }
    }
    if (c.grid < 2) {
        throw std::invalid_argument("--grid needs at least two points per edge");
    }
}

int run(const RunConfig& config, std::ostream& log)
{
    try {
        check_config(config);
        std::filesystem::create_directories(config.out);
        const Problem problem = load_problem(config.input);
        const std::string& c = config.command;
        if (c == "validate") {
            return cmd_validate(config, problem, log);
        }
        if (c == "spectrum") {
            return cmd_spectrum(config, problem, log);
        }
        if (c == "green") {
            return cmd_green(config, problem, log);
        }
        if (c == "walks") {
            return cmd_walks(config, problem, log);
        }
        if (c == "heat") {
            return cmd_heat(config, problem, log);
        }
        if (c == "oracle") {
            return cmd_oracle(config, problem, log);
        }
        return cmd_verify(config, problem, log);
    } catch (const NearEigenvalueError& e) {
        log << "error: near-eigenvalue guard: " << e.what() << '\n';
        return EXIT_GUARD;
    } catch (const SingularScatteringError& e) {
        log << "error: numeric guard: " << e.what() << '\n';
        return EXIT_GUARD;
    } catch (const ConvergenceError& e) {
        log << "error: numeric guard: " << e.what() << '\n';
        return EXIT_GUARD;
    } catch (const WalkCapError& e) {
        log << "error: " << e.what() << " (lower --cutoff)\n";
        return EXIT_INPUT;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return EXIT_INPUT;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return EXIT_INPUT;
    }
}

} // namespace qgraph
