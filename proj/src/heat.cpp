#include "qgraph/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qgraph {

namespace {

void check_time(double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw HeatError("heat kernel needs t > 0");
    }
}

void check_hermitian(const CMatrix& h)
{
    if (h.rows() != h.cols()) {
        throw HeatError("H must be square");
    }
    if (h.size() == 0) {
        return;
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw HeatError("H is not Hermitian");
    }
}

} // namespace

double heat_gaussian(double x, double t)
{
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

double erfcx(double w)
{
    if (w < 25.0) {
        return std::exp(w * w) * std::erfc(w);
    }
    // Asymptotic series, seven terms suffice for w >= 25.
    const double inv = 1.0 / (2.0 * w * w);
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n <= 6; ++n) {
        term *= -(2.0 * n - 1.0) * inv;
        sum += term;
    }
    return sum / (w * std::sqrt(M_PI));
}

double h_scalar(double s, double t, double lambda)
{
    check_time(t);
    if (lambda == 0.0) {
        return 0.0;
    }
    const double rt = std::sqrt(t);
    const double w = s / (2.0 * rt) - lambda * rt;
    if (w >= 0.0) {
        return -lambda * std::exp(-s * s / (4.0 * t)) * erfcx(w);
    }
    return -lambda * std::exp(lambda * lambda * t - lambda * s) * std::erfc(w);
}

CMatrix h_matrix(double s, double t, const CMatrix& h)
{
    check_time(t);
    check_hermitian(h);
    if (h.size() == 0) {
        return h;
    }
    return linalg::hermitian_function(h, [&](double lambda) { return h_scalar(s, t, lambda); });
}

HeatKernelSpec HeatKernelSpec::standard(std::size_t degree)
{
    if (degree == 0) {
        throw HeatError("star degree must be positive");
    }
    HeatKernelSpec spec;
    spec.degree = degree;
    spec.family = HeatFamily::standard;
    return spec;
}

HeatKernelSpec HeatKernelSpec::robin(CMatrix h)
{
    check_hermitian(h);
    if (h.rows() == 0) {
        throw HeatError("star degree must be positive");
    }
    HeatKernelSpec spec;
    spec.degree = static_cast<std::size_t>(h.rows());
    spec.family = HeatFamily::robin;
    spec.H = linalg::hermitian_part(h);
    return spec;
}

StarHeatKernel::StarHeatKernel(HeatKernelSpec spec) : spec_(std::move(spec))
{
    if (spec_.family == HeatFamily::robin) {
        check_hermitian(spec_.H);
        if (static_cast<std::size_t>(spec_.H.rows()) != spec_.degree) {
            throw HeatError("H does not match the star degree");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(spec_.H);
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
    }
}

CMatrix StarHeatKernel::h(double s, double t) const
{
    check_time(t);
    const Eigen::Index d = static_cast<Eigen::Index>(spec_.degree);
    if (spec_.family != HeatFamily::robin) {
        return CMatrix::Zero(d, d);
    }
    CVector values(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        values(i) = h_scalar(s, t, eigenvalues_(i));
    }
    return eigenvectors_ * values.asDiagonal() * eigenvectors_.adjoint();
}

cplx StarHeatKernel::entry(double t, std::size_t e, double x, std::size_t e_prime, double y) const
{
    check_time(t);
    if (e >= spec_.degree || e_prime >= spec_.degree) {
        throw std::out_of_range("edge number out of range");
    }
    const bool same = e == e_prime;
    if (spec_.family == HeatFamily::standard) {
        const double d = static_cast<double>(spec_.degree);
        if (same) {
            return heat_gaussian(x - y, t) - (d - 2.0) / d * heat_gaussian(x + y, t);
        }
        return 2.0 / d * heat_gaussian(x + y, t);
    }
    cplx f(0.0, 0.0);
    const auto r = static_cast<Eigen::Index>(e);
    const auto c = static_cast<Eigen::Index>(e_prime);
    for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
        f += eigenvectors_(r, i) * h_scalar(x + y, t, eigenvalues_(i)) * std::conj(eigenvectors_(c, i));
    }
    cplx out = -f;
    if (same) {
        out += heat_gaussian(x - y, t) + heat_gaussian(x + y, t);
    }
    return out;
}

cplx star_heat_kernel(const HeatKernelSpec& spec, double t, std::size_t e, double x, std::size_t e_prime, double y)
{
    return StarHeatKernel(spec).entry(t, e, x, e_prime, y);
}

HeatKernelSpec detect_heat_family(const MetricGraph& graph, const BoundaryConditions& bc)
{
    if (!graph.is_star()) {
        throw HeatError("closed-form heat kernels need a star graph (one vertex, no internal edges)");
    }
    if (bc_equivalent(bc, make_standard(graph))) {
        return HeatKernelSpec::standard(graph.external_count());
    }
    const CanonicalForm& cf = bc.canonical();
    if (cf.P.cwiseAbs().maxCoeff() < 1e-10) {
        return HeatKernelSpec::robin(cf.L);
    }
    throw HeatError("no closed-form heat kernel: conditions are neither standard nor of the form A = H, B = 1");
}

StarSamples make_star_samples(std::size_t degree, double x_max, std::size_t points)
{
    if (!(x_max > 0.0)) {
        throw HeatError("x_max must be positive");
    }
    points = std::max<std::size_t>(points, 3);
    if (points % 2 == 0) {
        ++points;
    }
    StarSamples out;
    out.x_max = x_max;
    out.grid.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        out.grid[i] = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    out.grid.back() = x_max;
    out.values.assign(degree, std::vector<double>(points, 0.0));
    return out;
}

HeatApplyResult heat_apply(const StarHeatKernel& kernel, const StarSamples& psi0, double t)
{
    check_time(t);
    const std::size_t d = kernel.degree();
    const std::size_t n = psi0.grid.size();
    if (psi0.values.size() != d) {
        throw HeatError("initial data must have one sample vector per edge");
    }
    if (n < 3 || n % 2 == 0) {
        throw HeatError("Simpson quadrature needs an odd number of at least three points");
    }
    for (const auto& v : psi0.values) {
        if (v.size() != n) {
            throw HeatError("sample vectors must match the grid");
        }
    }
    const double step = psi0.x_max / static_cast<double>(n - 1);
    std::vector<double> weight(n);
    for (std::size_t j = 0; j < n; ++j) {
        double w = (j == 0 || j + 1 == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        weight[j] = w * step / 3.0;
    }

    HeatApplyResult result;
    result.output = psi0;
    result.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < d; ++e) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx sum(0.0, 0.0);
            for (std::size_t f = 0; f < d; ++f) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double v = psi0.values[f][j];
                    if (v != 0.0) {
                        sum += weight[j] * kernel.entry(t, e, psi0.grid[i], f, psi0.grid[j]) * v;
                    }
                }
            }
            result.output.values[e][i] = sum.real();
            result.min_value = std::min(result.min_value, sum.real());
            result.max_imag = std::max(result.max_imag, std::abs(sum.imag()));
        }
    }
    if (std::sqrt(t) < 2.0 * step) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "grid step " << step << " is coarse relative to sqrt(t) = " << std::sqrt(t);
        result.notes.push_back(msg.str());
    }
    return result;
}

double default_heat_cutoff(const HeatKernelSpec& spec, double t)
{
    check_time(t);
    double scale = 1.0;
    if (spec.family == HeatFamily::robin) {
        RVector ev = linalg::hermitian_eigenvalues(spec.H);
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i)) > 1e-12) {
                scale = std::min(scale, std::abs(ev(i)));
            }
        }
    }
    return std::max(8.0 * std::sqrt(t), 5.0 / std::max(scale, 0.1));
}

} // namespace qgraph
