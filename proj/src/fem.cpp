#include "qgraph/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qgraph {

namespace {

using Triplet = Eigen::Triplet<cplx>;

// Orthonormal basis of Ran(1 - P), real when P is real.
CMatrix constraint_basis(const CMatrix& p, bool real)
{
    const Eigen::Index n = p.rows();
    const CMatrix q = CMatrix::Identity(n, n) - p;
    std::vector<Eigen::Index> keep;
    CMatrix vectors;
    RVector values;
    if (real) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(q.real());
        values = es.eigenvalues();
        vectors = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(q));
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (values(i) > 0.5) {
            keep.push_back(i);
        }
    }
    CMatrix u(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        u.col(static_cast<Eigen::Index>(c)) = vectors.col(keep[c]);
    }
    return u;
}

struct Pencil {
    RVector values;
    CMatrix vectors;   // M-orthonormal columns in reduced coordinates
};

Pencil solve_pencil(const DiscreteForm& form, bool vectors = true)
{
    const int options = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    Pencil out;
    if (form.real) {
        RMatrix k = form.K.real();
        RMatrix m = form.M.real();
        k = 0.5 * (k + k.transpose()).eval();
        m = 0.5 * (m + m.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(k, m, options | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success) {
            throw FemError("generalized eigensolver failed");
        }
        out.values = es.eigenvalues();
        if (vectors) {
            out.vectors = es.eigenvectors().cast<cplx>();
        }
    } else {
        Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(form.K),
                                                             linalg::hermitian_part(form.M), options | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success) {
            throw FemError("generalized eigensolver failed");
        }
        out.values = es.eigenvalues();
        if (vectors) {
            out.vectors = es.eigenvectors();
        }
    }
    return out;
}

CVector flatten(const DiscreteForm& form, const NodalFunction& f)
{
    if (f.size() != form.nodes.size()) {
        throw FemError("nodal function needs one vector per edge");
    }
    CVector out(static_cast<Eigen::Index>(form.unconstrained));
    for (std::size_t e = 0; e < f.size(); ++e) {
        if (f[e].size() != form.nodes[e].size()) {
            throw FemError("nodal function does not match the mesh");
        }
        for (std::size_t i = 0; i < f[e].size(); ++i) {
            out(static_cast<Eigen::Index>(form.offset[e] + i)) = f[e][i];
        }
    }
    return out;
}

} // namespace

DiscreteForm assemble(const MetricGraph& graph, const BoundaryConditions& bc, double h, double x_max)
{
    if (!(h > 0.0)) {
        throw FemError("mesh size must be positive");
    }
    if (graph.internal_count() > 0 && !(h < graph.min_length() / 4.0)) {
        std::ostringstream msg;
        msg << "mesh too coarse: h = " << h << " must be below a_min/4 = " << graph.min_length() / 4.0;
        throw FemError(msg.str());
    }
    if (graph.external_count() > 0 && !(h < x_max / 4.0)) {
        throw FemError("mesh too coarse for the external cutoff x_max");
    }

    DiscreteForm form;
    form.h = h;
    form.x_max = x_max;
    EndpointIndex index(graph);
    const std::size_t edges = graph.edge_count();
    std::vector<std::size_t> elements(edges);
    std::vector<double> spacing(edges);
    form.nodes.resize(edges);
    form.offset.resize(edges);
    std::size_t total = 0;
    for (std::size_t e = 0; e < edges; ++e) {
        const bool external = graph.kind(e) == EdgeKind::external;
        const double len = external ? x_max : graph.edge_length(e);
        elements[e] = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(len / h - 1e-9)));
        spacing[e] = len / static_cast<double>(elements[e]);
        // The cap node of an external edge is pinned to zero and dropped.
        const std::size_t count = external ? elements[e] : elements[e] + 1;
        form.nodes[e].resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            form.nodes[e][i] = spacing[e] * static_cast<double>(i);
        }
        if (!external) {
            form.nodes[e].back() = len;
        }
        form.offset[e] = total;
        total += count;
    }
    form.unconstrained = total;

    std::vector<Triplet> kt, mt;
    for (std::size_t e = 0; e < edges; ++e) {
        const double l = spacing[e];
        const std::size_t count = form.nodes[e].size();
        for (std::size_t el = 0; el < elements[e]; ++el) {
            const std::size_t a = form.offset[e] + el;
            const std::size_t b = a + 1;
            const bool b_free = el + 1 < count;
            kt.emplace_back(a, a, 1.0 / l);
            mt.emplace_back(a, a, l / 3.0);
            if (b_free) {
                kt.emplace_back(b, b, 1.0 / l);
                kt.emplace_back(a, b, -1.0 / l);
                kt.emplace_back(b, a, -1.0 / l);
                mt.emplace_back(b, b, l / 3.0);
                mt.emplace_back(a, b, l / 6.0);
                mt.emplace_back(b, a, l / 6.0);
            }
        }
    }
    const auto n_full = static_cast<Eigen::Index>(total);
    form.K_full.resize(n_full, n_full);
    form.M_full.resize(n_full, n_full);
    form.K_full.setFromTriplets(kt.begin(), kt.end());
    form.M_full.setFromTriplets(mt.begin(), mt.end());

    // Endpoint nodes carry psi = U c with U spanning Ran(1 - P).
    const CanonicalForm& cf = bc.canonical();
    form.real = linalg::is_real(cf.P) && linalg::is_real(cf.L);
    const CMatrix u = constraint_basis(cf.P, form.real);
    std::vector<std::size_t> endpoint_node(index.dimension());
    std::vector<bool> is_endpoint(total, false);
    for (std::size_t k = 0; k < index.dimension(); ++k) {
        const Endpoint& ep = index.endpoint(k);
        std::size_t node = form.offset[ep.edge];
        if (ep.kind == EndpointKind::terminal) {
            node += form.nodes[ep.edge].size() - 1;
        }
        endpoint_node[k] = node;
        is_endpoint[node] = true;
    }
    std::vector<Triplet> ct;
    Eigen::Index reduced = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (!is_endpoint[i]) {
            ct.emplace_back(i, reduced++, 1.0);
        }
    }
    const Eigen::Index first_boundary = reduced;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        for (std::size_t k = 0; k < index.dimension(); ++k) {
            const cplx value = u(static_cast<Eigen::Index>(k), c);
            if (value != cplx(0.0, 0.0)) {
                ct.emplace_back(endpoint_node[k], reduced, value);
            }
        }
        ++reduced;
    }
    form.C.resize(n_full, reduced);
    form.C.setFromTriplets(ct.begin(), ct.end());

    DiscreteForm::Sparse ct_adj = form.C.adjoint();
    form.K = CMatrix(ct_adj * form.K_full * form.C);
    form.M = CMatrix(ct_adj * form.M_full * form.C);
    const Eigen::Index r = u.cols();
    if (r > 0) {
        form.K.block(first_boundary, first_boundary, r, r) -= u.adjoint() * cf.L * u;
    }

    if (graph.external_count() > 0) {
        const RVector& ev = bc.l_spectrum();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) > 1e-12 && ev(i) * x_max < 18.0) {
                std::ostringstream msg;
                msg.precision(6);
                msg << "kappa * x_max = " << ev(i) * x_max << " < 18: truncation may affect bound states";
                form.notes.push_back(msg.str());
                break;
            }
        }
    }
    return form;
}

std::vector<double> oracle_eigenvalues(const DiscreteForm& form, std::size_t count)
{
    if (count > form.dimension()) {
        throw FemError("requested " + std::to_string(count) + " eigenvalues, constrained dimension is " +
                       std::to_string(form.dimension()));
    }
    Pencil p = solve_pencil(form, false);
    return std::vector<double>(p.values.data(), p.values.data() + count);
}

NodalFunction sample_nodal(const DiscreteForm& form, const std::function<double(std::size_t, double)>& f)
{
    NodalFunction out(form.nodes.size());
    for (std::size_t e = 0; e < form.nodes.size(); ++e) {
        for (double x : form.nodes[e]) {
            out[e].push_back(f(e, x));
        }
    }
    return out;
}

RMatrix oracle_heat_kernel(const DiscreteForm& form, double t)
{
    if (!(t >= 0.0)) {
        throw FemError("t must be nonnegative");
    }
    Pencil p = solve_pencil(form);
    // drop modes with e^{-lambda t} < 1e-40
    Eigen::Index keep = 0;
    while (keep < p.values.size() && -t * p.values(keep) > -92.0) {
        ++keep;
    }
    CMatrix nodal = form.C * p.vectors.leftCols(keep);
    RVector decay = (-t * p.values.head(keep).array()).exp();
    if (form.real) {
        RMatrix v = nodal.real();
        RMatrix scaled = v * decay.asDiagonal();
        return scaled * v.transpose();
    }
    CMatrix scaled = nodal * decay.cast<cplx>().asDiagonal();
    CMatrix kernel = scaled * nodal.adjoint();
    return kernel.real();
}

NodalFunction oracle_heat_apply(const DiscreteForm& form, const NodalFunction& psi0, double t)
{
    CVector v = flatten(form, psi0);
    CVector weighted = form.M_full * v;
    RMatrix kernel = oracle_heat_kernel(form, t);
    CVector u = kernel.cast<cplx>() * weighted;
    NodalFunction out(form.nodes.size());
    for (std::size_t e = 0; e < form.nodes.size(); ++e) {
        for (std::size_t i = 0; i < form.nodes[e].size(); ++i) {
            out[e].push_back(u(static_cast<Eigen::Index>(form.offset[e] + i)).real());
        }
    }
    return out;
}

} // namespace qgraph
