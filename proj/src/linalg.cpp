#include "qgraph/linalg.hpp"

#include <algorithm>

namespace qgraph::linalg {

RVector singular_values(const CMatrix& m)
{
    if (m.size() == 0) {
        return RVector();
    }
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues();
}

double smallest_singular_value(const CMatrix& m)
{
    RVector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s.minCoeff();
}

double spectral_norm(const CMatrix& m)
{
    RVector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s(0);
}

std::size_t rank(const CMatrix& m, double rel_tol)
{
    RVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) >= rel_tol * s(0)) {
            ++r;
        }
    }
    return r;
}

CMatrix null_space(const CMatrix& m, double rel_tol, double scale)
{
    const Eigen::Index n = m.cols();
    if (m.rows() == 0) {
        return CMatrix::Identity(n, n);
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    Eigen::Index r = 0;
    const double ref = s.size() > 0 ? std::max(s(0), scale) : 0.0;
    if (ref > 0.0) {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) >= rel_tol * ref) {
                ++r;
            }
        }
    }
    return svd.matrixV().rightCols(n - r);
}

CMatrix hermitian_part(const CMatrix& m)
{
    return 0.5 * (m + m.adjoint());
}

RVector hermitian_eigenvalues(const CMatrix& m)
{
    if (m.size() == 0) {
        return RVector();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

InertiaCounts inertia_of(const CMatrix& hermitian, double abs_tol)
{
    InertiaCounts out;
    RVector ev = hermitian_eigenvalues(hermitian);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > abs_tol) {
            ++out.positive;
        } else if (ev(i) < -abs_tol) {
            ++out.negative;
        } else {
            ++out.zero;
        }
    }
    return out;
}

bool is_real(const CMatrix& m, double tol)
{
    if (m.size() == 0) {
        return true;
    }
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return m.imag().cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace qgraph::linalg
