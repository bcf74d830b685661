#ifndef QGRAPH_TESTS_SUPPORT_HPP
#define QGRAPH_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph::testing {

inline MetricGraph star(std::size_t degree)
{
    GraphDescription d;
    d.vertices = {"v"};
    for (std::size_t e = 0; e < degree; ++e) {
        d.external_edges.push_back({"e" + std::to_string(e + 1), "v"});
    }
    return build_graph(d);
}

inline MetricGraph interval(double a)
{
    GraphDescription d;
    d.vertices = {"u", "v"};
    d.internal_edges = {{"i", "u", "v", a}};
    return build_graph(d);
}

// [0, a] from u to v with a half-line at u.
inline MetricGraph lollipop_line(double a)
{
    GraphDescription d;
    d.vertices = {"u", "v"};
    d.internal_edges = {{"i", "u", "v", a}};
    d.external_edges = {{"e", "u"}};
    return build_graph(d);
}

// Interval u-v with two half-lines at u and two at v.
inline MetricGraph interval_star(double a)
{
    GraphDescription d;
    d.vertices = {"u", "v"};
    d.internal_edges = {{"i", "u", "v", a}};
    d.external_edges = {{"e1", "u"}, {"e2", "u"}, {"e3", "v"}, {"e4", "v"}};
    return build_graph(d);
}

inline MetricGraph triangle(double a, double b, double c)
{
    GraphDescription d;
    d.vertices = {"x", "y", "z"};
    d.internal_edges = {{"i1", "x", "y", a}, {"i2", "y", "z", b}, {"i3", "z", "x", c}};
    return build_graph(d);
}

inline MetricGraph tadpole(double a)
{
    GraphDescription d;
    d.vertices = {"v"};
    d.internal_edges = {{"t", "v", "v", a}};
    d.external_edges = {{"e", "v"}};
    return build_graph(d);
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        }
    }
    return m;
}

inline CMatrix random_unitary(Rng& rng, Eigen::Index n)
{
    Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

// Well conditioned random invertible matrix.
inline CMatrix random_invertible(Rng& rng, Eigen::Index n)
{
    CMatrix d = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = uniform(rng, 0.5, 2.0);
    }
    return random_unitary(rng, n) * d * random_unitary(rng, n);
}

struct RandomBcOptions {
    double l_min = -3.0;      // eigenvalues of L on Ran P^perp
    double l_max = 3.0;
    int kernel_dim = -1;      // dim Ker B; -1 random
    int zero_eigs = 0;        // forced zero eigenvalues of L on Ran P^perp
    bool real = false;
};

// A = C (P + L), B = C (1 - P) with a random projection P, Hermitian L on
// Ran(1 - P) and invertible C.
struct RandomPair {
    CMatrix A;
    CMatrix B;
    CMatrix P;
    CMatrix L;
};

inline RandomPair random_pair(Rng& rng, Eigen::Index n, const RandomBcOptions& o = {})
{
    const int k = o.kernel_dim >= 0 ? o.kernel_dim : static_cast<int>(std::uniform_int_distribution<int>(0, n)(rng));
    CMatrix u = random_unitary(rng, n);
    if (o.real) {
        Eigen::HouseholderQR<RMatrix> qr(random_complex(rng, n, n).real());
        u = (qr.householderQ() * RMatrix::Identity(n, n)).cast<cplx>();
    }
    CMatrix p = u.leftCols(k) * u.leftCols(k).adjoint();
    const Eigen::Index m = n - k;
    CMatrix diag = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        diag(i, i) = i < o.zero_eigs ? 0.0 : uniform(rng, o.l_min, o.l_max);
    }
    CMatrix rot = o.real ? CMatrix::Identity(m, m) : random_unitary(rng, m);
    CMatrix w = u.rightCols(m) * rot;
    CMatrix l = w * diag * w.adjoint();
    CMatrix c = o.real ? CMatrix(random_invertible(rng, n).real().cast<cplx>()) : random_invertible(rng, n);
    if (o.real) {
        while (std::abs(c.determinant()) < 0.05) {
            c = random_invertible(rng, n).real().cast<cplx>();
        }
    }
    RandomPair out;
    out.P = p;
    out.L = l;
    out.A = c * (p + l);
    out.B = c * (CMatrix::Identity(n, n) - p);
    return out;
}

inline BoundaryConditions random_bc(Rng& rng, const MetricGraph& g, const RandomBcOptions& o = {})
{
    RandomPair r = random_pair(rng, static_cast<Eigen::Index>(g.endpoint_dimension()), o);
    return validate_bc(g, r.A, r.B);
}

inline CMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0)
{
    CMatrix m = random_complex(rng, n, n) * scale;
    return 0.5 * (m + m.adjoint());
}

} // namespace qgraph::testing

#endif
