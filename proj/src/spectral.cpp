#include "qgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace qgraph {

namespace {

struct Root {
    double k;
    std::size_t multiplicity;
    double residual;
};

double relative_smallest(const RVector& s)
{
    if (s.size() == 0 || s(0) == 0.0) {
        return 0.0;
    }
    return s(s.size() - 1) / s(0);
}

std::size_t count_small(const RVector& s, double accept)
{
    std::size_t m = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) < accept * s(0)) {
            ++m;
        }
    }
    return m;
}

double golden_minimum(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tol) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

// Interior local minima of sigma_min/sigma_max over a uniform grid, refined
// and filtered by the acceptance threshold.
std::vector<Root> scan_roots(const std::function<RVector(double)>& sv, double lo, double hi, double step,
                             const ScanOptions& options)
{
    auto rho = [&](double p) { return relative_smallest(sv(p)); };
    std::vector<double> grid;
    for (double p = lo; p <= hi + 0.5 * step; p += step) {
        grid.push_back(p);
    }
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = rho(grid[i]);
    }
    std::vector<Root> roots;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (!(values[i] < values[i - 1] && values[i] <= values[i + 1])) {
            continue;
        }
        double p = golden_minimum(rho, grid[i - 1], grid[i + 1], options.refine);
        RVector s = sv(p);
        double r = relative_smallest(s);
        if (r < options.accept) {
            roots.push_back({p, count_small(s, options.accept), r});
        }
    }
    return roots;
}

std::vector<Root> merge_roots(std::vector<Root> roots)
{
    std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.k < y.k; });
    std::vector<Root> out;
    for (const Root& r : roots) {
        if (!out.empty() && std::abs(r.k - out.back().k) < 1e-7 * std::max(1.0, r.k)) {
            Root& last = out.back();
            last.multiplicity = std::max(last.multiplicity, r.multiplicity);
            if (r.residual < last.residual) {
                last.k = r.k;
                last.residual = r.residual;
            }
            continue;
        }
        out.push_back(r);
    }
    return out;
}

void note_close_roots(const std::vector<Root>& roots, double step, std::vector<std::string>& notes)
{
    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (roots[i].k - roots[i - 1].k < 2.0 * step) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "scan step may be too coarse: roots at " << roots[i - 1].k << " and " << roots[i].k
                << " are closer than two grid steps";
            notes.push_back(msg.str());
        }
    }
}

double positive_step(const MetricGraph& graph)
{
    return std::min(M_PI / (4.0 * graph.max_length()), 0.05);
}

double negative_step(const MetricGraph& graph)
{
    double step = 0.01;
    if (graph.internal_count() > 0) {
        step = std::min(step, 0.1 / graph.max_length());
    }
    return step;
}

} // namespace

CMatrix transfer_matrix(const MetricGraph& graph, cplx k)
{
    const Eigen::Index n = static_cast<Eigen::Index>(graph.endpoint_dimension());
    const Eigen::Index ne = static_cast<Eigen::Index>(graph.external_count());
    const Eigen::Index ni = static_cast<Eigen::Index>(graph.internal_count());
    CMatrix t = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        cplx phase = std::exp(I_UNIT * k * graph.length(static_cast<std::size_t>(i)));
        t(ne + i, ne + ni + i) = phase;
        t(ne + ni + i, ne + i) = phase;
    }
    return t;
}

SecularSystem secular_system(const MetricGraph& graph, const BoundaryConditions& bc, cplx k)
{
    if (k == cplx(0.0, 0.0)) {
        throw std::invalid_argument("secular system needs k != 0");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(graph.endpoint_dimension());
    const Eigen::Index ne = static_cast<Eigen::Index>(graph.external_count());
    const Eigen::Index ni = static_cast<Eigen::Index>(graph.internal_count());
    SecularSystem sys;
    sys.k = k;
    sys.X = CMatrix::Identity(n, n);
    sys.Y = CMatrix::Identity(n, n);
    sys.R_plus = CMatrix::Identity(n, n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        const double a = graph.length(static_cast<std::size_t>(i));
        const cplx ep = std::exp(I_UNIT * k * a);
        const cplx em = std::exp(-I_UNIT * k * a);
        const Eigen::Index m = ne + i;
        const Eigen::Index p = ne + ni + i;
        sys.X(m, p) = 1.0;
        sys.X(p, m) = ep;
        sys.X(p, p) = em;
        sys.Y(m, p) = -1.0;
        sys.Y(p, m) = -ep;
        sys.Y(p, p) = em;
        sys.R_plus(p, p) = em;
    }
    sys.T = transfer_matrix(graph, k);
    sys.Z = bc.A() * sys.X + I_UNIT * k * bc.B() * sys.Y;
    try {
        CMatrix s = scattering_matrix(bc.A(), bc.B(), k);
        CMatrix rebuilt = (bc.A() + I_UNIT * k * bc.B()) * (CMatrix::Identity(n, n) - s * sys.T) * sys.R_plus;
        double scale = std::max(1.0, linalg::spectral_norm(sys.Z));
        sys.factorization_residual = linalg::spectral_norm(sys.Z - rebuilt) / scale;
    } catch (const SingularScatteringError&) {
        sys.factorization_residual.reset();
    }
    return sys;
}

CMatrix balanced_secular_matrix(const MetricGraph& graph, const BoundaryConditions& bc, cplx k)
{
    const CMatrix& a = bc.normalized_A();
    const CMatrix& b = bc.normalized_B();
    return (a + I_UNIT * k * b) + (a - I_UNIT * k * b) * transfer_matrix(graph, k);
}

SpectrumPart positive_spectrum(const MetricGraph& graph, const BoundaryConditions& bc, double k_max,
                               const ScanOptions& options)
{
    if (!(k_max > 0.0)) {
        throw std::invalid_argument("k_max must be positive");
    }
    SpectrumPart out;
    if (graph.internal_count() == 0) {
        out.notes.push_back("no internal edges: the positive spectrum is purely continuous");
        return out;
    }
    const double step = options.step > 0.0 ? options.step : positive_step(graph);
    out.step = step;
    auto sv = [&](double k) { return linalg::singular_values(balanced_secular_matrix(graph, bc, cplx(k, 0.0))); };
    const double lo = std::max(options.k_min, 1e-12);
    auto roots = merge_roots(scan_roots(sv, lo, k_max + 2.0 * step, step, options));
    std::erase_if(roots, [&](const Root& r) { return r.k > k_max + 1e-9; });
    note_close_roots(roots, step, out.notes);
    for (const Root& r : roots) {
        out.values.push_back({r.k * r.k, r.multiplicity, r.k, r.residual});
    }
    return out;
}

double negative_scan_limit(const MetricGraph& graph, const BoundaryConditions& bc)
{
    double limit = 2.0 * std::max(bc.l_plus_norm(), 1.0);
    if (graph.internal_count() > 0) {
        limit += 4.0 / graph.min_length();
    }
    return limit;
}

SpectrumPart negative_spectrum(const MetricGraph& graph, const BoundaryConditions& bc, const ScanOptions& options)
{
    SpectrumPart out;
    const RVector& ev = bc.l_spectrum();
    constexpr double cluster = 1e-8;

    if (graph.internal_count() == 0) {
        // A - kappa B is singular exactly at the positive eigenvalues of L.
        std::vector<Root> roots;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) <= cluster) {
                continue;
            }
            if (!roots.empty() && std::abs(ev(i) - roots.back().k) < cluster * std::max(1.0, ev(i))) {
                ++roots.back().multiplicity;
                continue;
            }
            roots.push_back({ev(i), 1, 0.0});
        }
        for (const Root& r : roots) {
            out.values.push_back({-r.k * r.k, r.multiplicity, r.k, r.residual});
        }
        std::reverse(out.values.begin(), out.values.end());
        return out;
    }

    const double step = options.step > 0.0 ? std::min(options.step, negative_step(graph)) : negative_step(graph);
    out.step = step;
    auto sv = [&](double kappa) {
        return linalg::singular_values(balanced_secular_matrix(graph, bc, cplx(0.0, kappa)));
    };
    const double limit = negative_scan_limit(graph, bc);
    const double lo = std::max(options.k_min, 0.5 * step);
    std::vector<Root> roots = scan_roots(sv, lo, limit + 2.0 * step, step, options);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) <= lo) {
            continue;
        }
        RVector s = sv(ev(i));
        double r = relative_smallest(s);
        if (r < options.accept) {
            roots.push_back({ev(i), count_small(s, options.accept), r});
        }
    }
    roots = merge_roots(std::move(roots));
    note_close_roots(roots, step, out.notes);
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
        out.values.push_back({-it->k * it->k, it->multiplicity, it->k, it->residual});
    }
    return out;
}

ZeroModes zero_modes(const MetricGraph& graph, const BoundaryConditions& bc)
{
    ZeroModes out;
    const Eigen::Index n = static_cast<Eigen::Index>(graph.endpoint_dimension());
    const Eigen::Index ne = static_cast<Eigen::Index>(graph.external_count());
    const Eigen::Index ni = static_cast<Eigen::Index>(graph.internal_count());
    if (ni == 0) {
        out.basis = CMatrix::Zero(0, 0);
        return out;
    }
    CMatrix trace = CMatrix::Zero(n, 2 * ni);
    CMatrix dtrace = CMatrix::Zero(n, 2 * ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        const double a = graph.length(static_cast<std::size_t>(i));
        const Eigen::Index m = ne + i;
        const Eigen::Index p = ne + ni + i;
        trace(m, i) = 1.0;
        trace(p, i) = 1.0;
        trace(p, ni + i) = a;
        dtrace(m, ni + i) = 1.0;
        dtrace(p, ni + i) = -1.0;
    }
    CMatrix system = bc.normalized_A() * trace + bc.normalized_B() * dtrace;
    out.basis = linalg::null_space(system, RANK_TOLERANCE, 1.0);
    out.dimension = static_cast<std::size_t>(out.basis.cols());
    return out;
}

double solve_s(double t, double a, double tol)
{
    if (!(a > 0.0)) {
        throw std::invalid_argument("length must be positive");
    }
    if (t <= 0.0) {
        return 0.0;
    }
    double lo = t;
    double hi = t + 2.0 / a;
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (mid * std::tanh(0.5 * a * mid) < t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Certificates certificates(const MetricGraph& graph, const BoundaryConditions& bc)
{
    Certificates c;
    c.n_plus_bound = inertia(bc).n_plus;
    c.l_plus_norm = bc.l_plus_norm();
    if (graph.internal_count() == 0) {
        c.s_value = c.l_plus_norm;
    } else {
        c.min_length = graph.min_length();
        c.s_value = solve_s(c.l_plus_norm, *c.min_length);
    }
    c.lower_bound = -c.s_value * c.s_value;
    return c;
}

SpectrumReport spectrum_report(const MetricGraph& graph, const BoundaryConditions& bc, double k_max,
                               const ScanOptions& options)
{
    SpectrumReport r;
    r.negative = negative_spectrum(graph, bc, options);
    r.zero = zero_modes(graph, bc);
    r.positive = positive_spectrum(graph, bc, k_max, options);
    r.certificates = certificates(graph, bc);
    for (const auto& e : r.negative.values) {
        r.negative_count += e.multiplicity;
    }
    r.count_ok = r.negative_count <= r.certificates.n_plus_bound;
    r.lower_bound_ok = true;
    for (const auto& e : r.negative.values) {
        if (e.lambda < r.certificates.lower_bound - 1e-8) {
            r.lower_bound_ok = false;
        }
    }
    return r;
}

} // namespace qgraph
