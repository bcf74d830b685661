#include "qgraph/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgraph/spectral.hpp"

namespace qgraph {

namespace {

struct Entry {
    Eigen::Index index;
    cplx value;
};

// Nonzero entries of the outgoing-wave row vector at a point:
// exp(ikx) at the initial (or external) endpoint, exp(ik(a-x)) at the terminal one.
int wave_entries(const MetricGraph& graph, const EndpointIndex& index, const GraphPoint& p, cplx k, Entry* out)
{
    auto minus = index.index_of(p.edge, Side::minus);
    out[0] = {static_cast<Eigen::Index>(*minus), std::exp(I_UNIT * k * p.x)};
    if (graph.kind(p.edge) == EdgeKind::external) {
        return 1;
    }
    auto plus = index.index_of(p.edge, Side::plus);
    out[1] = {static_cast<Eigen::Index>(*plus), std::exp(I_UNIT * k * (graph.edge_length(p.edge) - p.x))};
    return 2;
}

} // namespace

std::string to_string(GreenFormula formula)
{
    switch (formula) {
    case GreenFormula::automatic:
        return "automatic";
    case GreenFormula::resolvent:
        return "resolvent";
    case GreenFormula::scattering:
        return "scattering";
    }
    return "unknown";
}

GreenKernel::GreenKernel(const MetricGraph& graph, const BoundaryConditions& bc, cplx k, GreenFormula formula)
    : graph_(graph), index_(graph), k_(k), formula_(formula)
{
    if (!(k.imag() > 0.0)) {
        throw std::invalid_argument("Green's function needs Im k > 0");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(graph.endpoint_dimension());
    CMatrix zb = balanced_secular_matrix(graph, bc, k);
    RVector s = linalg::singular_values(zb);
    guard_ratio_ = (s.size() == 0 || s(0) == 0.0) ? 0.0 : s(s.size() - 1) / s(0);
    if (guard_ratio_ < GREEN_GUARD) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "k = " << k.real() << (k.imag() < 0 ? " - " : " + ") << std::abs(k.imag())
            << "i is too close to an eigenvalue (sigma_min/||Z|| = " << guard_ratio_ << ")";
        throw NearEigenvalueError(msg.str(), k, guard_ratio_);
    }
    const CMatrix& a = bc.normalized_A();
    const CMatrix& b = bc.normalized_B();
    const CMatrix plus = a + I_UNIT * k * b;
    const CMatrix minus = a - I_UNIT * k * b;

    bool scattering_ok = false;
    if (formula != GreenFormula::resolvent) {
        scattering_ok = linalg::smallest_singular_value(plus) >= 1e-12 * std::max(1.0, linalg::spectral_norm(plus));
        if (!scattering_ok && formula == GreenFormula::scattering) {
            throw SingularScatteringError("A + ikB is singular; use the resolvent representation", k);
        }
    }
    if (scattering_ok) {
        formula_ = GreenFormula::scattering;
        CMatrix sm = -plus.partialPivLu().solve(minus);
        CMatrix t = transfer_matrix(graph, k);
        core_ = (CMatrix::Identity(n, n) - sm * t).partialPivLu().solve(sm);
    } else {
        formula_ = GreenFormula::resolvent;
        core_ = -zb.fullPivLu().solve(minus);
    }
}

void GreenKernel::check_point(const GraphPoint& p) const
{
    if (p.edge >= graph_.edge_count()) {
        throw PointOutOfRangeError("edge number " + std::to_string(p.edge) + " out of range");
    }
    const double a = graph_.edge_length(p.edge);
    const bool ok = std::isfinite(p.x) && p.x >= 0.0 && (std::isinf(a) || p.x <= a * (1.0 + 1e-12));
    if (!ok) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "coordinate " << p.x << " outside edge '" << graph_.edge_id(p.edge) << "'";
        throw PointOutOfRangeError(msg.str());
    }
}

GreenValue GreenKernel::evaluate(const GraphPoint& x, const GraphPoint& y) const
{
    check_point(x);
    check_point(y);
    GreenValue out{cplx(0.0, 0.0), 0.0};
    const cplx factor = I_UNIT / (2.0 * k_);
    if (x.edge == y.edge) {
        cplx r0 = factor * std::exp(I_UNIT * k_ * std::abs(x.x - y.x));
        out.value += r0;
        out.envelope += std::abs(r0);
    }
    Entry wx[2], wy[2];
    int nx = wave_entries(graph_, index_, x, k_, wx);
    int ny = wave_entries(graph_, index_, y, k_, wy);
    for (int p = 0; p < nx; ++p) {
        for (int q = 0; q < ny; ++q) {
            cplx term = factor * wx[p].value * core_(wx[p].index, wy[q].index) * wy[q].value;
            out.value += term;
            out.envelope += std::abs(term);
        }
    }
    return out;
}

cplx greens_function(const MetricGraph& graph, const BoundaryConditions& bc, const GraphPoint& x,
                     const GraphPoint& y, cplx k, GreenFormula formula)
{
    return GreenKernel(graph, bc, k, formula)(x, y);
}

std::vector<double> edge_samples(const MetricGraph& graph, std::size_t edge, std::size_t count, double x_max)
{
    count = std::max<std::size_t>(count, 2);
    const double a = graph.kind(edge) == EdgeKind::external ? x_max : graph.edge_length(edge);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = a * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = a;
    return out;
}

GreenPositivityReport greens_positivity_scan(const MetricGraph& graph, const BoundaryConditions& bc,
                                             std::span<const double> kappas, const GreenScanOptions& options)
{
    GreenPositivityReport report;
    std::vector<double> grid = options.classification_grid;
    if (grid.empty()) {
        grid = default_kappa_grid(bc);
    }
    PositivityReport cls = positivity_class(bc, grid);
    report.classification = cls.label();

    if (cls.strictly_positive) {
        report.theorem = "strictly positive boundary conditions";
        report.requirement = "positive";
    } else if (cls.locally_strictly_positive && !graph.has_tadpoles()) {
        report.theorem = "locally strictly positive boundary conditions on a tadpole-free graph";
        report.requirement = "positive";
    } else if (graph.internal_count() == 0 && cls.positive) {
        report.theorem = "positive boundary conditions without internal edges";
        report.requirement = "nonnegative";
    } else {
        report.applicable = false;
        report.notes.push_back("no positivity theorem applies");
        if (cls.locally_strictly_positive) {
            report.notes.push_back("locally strictly positive conditions need a tadpole-free graph");
        }
        return report;
    }
    report.applicable = true;

    std::vector<double> sorted(kappas.begin(), kappas.end());
    std::sort(sorted.begin(), sorted.end());
    for (double kappa : sorted) {
        if (!(kappa > 0.0)) {
            throw std::invalid_argument("kappa must be positive");
        }
        GreenKernel kernel(graph, bc, cplx(0.0, kappa));
        const double x_max = options.x_max.value_or(5.0 * std::max(1.0, 1.0 / kappa));
        KappaScan scan;
        scan.kappa = kappa;
        scan.min_entry = std::numeric_limits<double>::infinity();
        scan.min_relative = std::numeric_limits<double>::infinity();
        scan.all_positive = true;
        scan.all_nonnegative = true;
        std::vector<std::vector<double>> samples(graph.edge_count());
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
            samples[e] = edge_samples(graph, e, options.grid_density, x_max);
        }
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
            for (std::size_t f = 0; f < graph.edge_count(); ++f) {
                for (double x : samples[e]) {
                    for (double y : samples[f]) {
                        GreenValue v = kernel.evaluate({e, x}, {f, y});
                        cplx mirror = kernel({f, y}, {e, x});
                        scan.symmetry_residual = std::max(scan.symmetry_residual, std::abs(v.value - std::conj(mirror)));
                        const double tol = GREEN_SIGN_TOLERANCE * v.envelope;
                        const double re = v.value.real();
                        const bool real = std::abs(v.value.imag()) <= tol;
                        if (!(real && re > tol)) {
                            scan.all_positive = false;
                        }
                        if (!(real && re >= -tol)) {
                            scan.all_nonnegative = false;
                        }
                        scan.min_entry = std::min(scan.min_entry, re);
                        if (v.envelope > 0.0) {
                            scan.min_relative = std::min(scan.min_relative, re / v.envelope);
                        }
                        ++scan.samples;
                    }
                }
            }
        }
        report.scans.push_back(scan);
    }
    const bool strict = report.requirement == "positive";
    for (std::size_t i = report.scans.size(); i-- > 0;) {
        const auto& s = report.scans[i];
        if (strict ? s.all_positive : s.all_nonnegative) {
            report.threshold = s.kappa;
        } else {
            break;
        }
    }
    return report;
}

} // namespace qgraph
