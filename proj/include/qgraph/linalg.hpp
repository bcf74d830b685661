#ifndef QGRAPH_LINALG_HPP
#define QGRAPH_LINALG_HPP

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qgraph {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Relative cutoff below which a singular value counts as zero.
inline constexpr double RANK_TOLERANCE = 1e-10;

namespace linalg {

RVector singular_values(const CMatrix& m);
double smallest_singular_value(const CMatrix& m);
double spectral_norm(const CMatrix& m);

// Numerical rank with sigma < rel_tol * sigma_max counted as zero.
std::size_t rank(const CMatrix& m, double rel_tol = RANK_TOLERANCE);

// Orthonormal basis (columns) of Ker m, using the same relative cutoff.
// A zero matrix has the full space as kernel.
// `scale` is a floor for sigma_max, so that a tiny matrix is not mistaken for an
// invertible one.
CMatrix null_space(const CMatrix& m, double rel_tol = RANK_TOLERANCE, double scale = 0.0);

// Orthogonal projection onto the column span of an orthonormal basis.
inline CMatrix projector(const CMatrix& basis) { return basis * basis.adjoint(); }

CMatrix hermitian_part(const CMatrix& m);

// Eigenvalues of a Hermitian matrix, ascending.
RVector hermitian_eigenvalues(const CMatrix& m);

// f(H) through the spectral theorem.
template <typename F>
CMatrix hermitian_function(const CMatrix& h, F&& f)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
    const auto& u = es.eigenvectors();
    CVector d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        d(i) = f(es.eigenvalues()(i));
    }
    return u * d.asDiagonal() * u.adjoint();
}

struct InertiaCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t zero = 0;
};

InertiaCounts inertia_of(const CMatrix& hermitian, double abs_tol);

bool is_real(const CMatrix& m, double tol = 1e-13);

} // namespace linalg
} // namespace qgraph

#endif
