#ifndef QGRAPH_BOUNDARY_HPP
#define QGRAPH_BOUNDARY_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

class BoundaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// (A,B) does not have rank |E|+2|I|.
class RankDeficientError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

// A B^dagger is not self-adjoint.
class NonHermitianError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

class DimensionMismatchError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

class InvalidBlockError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

// A + ikB is (numerically) singular. For k = i*kappa the offending kappa is an
// eigenvalue of L, i.e. a candidate for the negative spectrum.
class SingularScatteringError : public BoundaryError {
public:
    SingularScatteringError(const std::string& what, cplx k) : BoundaryError(what), k_(k) {}
    cplx k() const { return k_; }
    double kappa() const { return k_.imag(); }

private:
    cplx k_;
};

class NonLocalError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

class PositivityGridError : public BoundaryError {
public:
    using BoundaryError::BoundaryError;
};

// Per-vertex pair acting on L_v. Rows and columns follow the ascending
// K-index order of the vertex set.
struct LocalBlock {
    CMatrix A;
    CMatrix B;
};

struct CanonicalForm {
    CMatrix P;       // orthogonal projection onto Ker B
    CMatrix L;       // Hermitian, L P = P L = 0
    CMatrix A_hat;   // P + L
    CMatrix B_hat;   // 1 - P
};

struct Inertia {
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::size_t n_zero = 0;
};

// Validated boundary conditions A psi + B psi' = 0 on the endpoint basis.
// Keeps the pair as given plus a row-normalized representative
// (A A^dagger + B B^dagger = 1) that all numerics run on.
class BoundaryConditions {
public:
    static BoundaryConditions validate(const MetricGraph& graph, CMatrix a, CMatrix b);

    std::size_t dimension() const { return static_cast<std::size_t>(a_.rows()); }
    const CMatrix& A() const { return a_; }
    const CMatrix& B() const { return b_; }
    const CMatrix& normalized_A() const { return an_; }
    const CMatrix& normalized_B() const { return bn_; }

    const CanonicalForm& canonical() const { return canonical_; }
    // Eigenvalues of L, ascending.
    const RVector& l_spectrum() const { return l_spectrum_; }
    // ||L_+|| = max(largest eigenvalue of L, 0)
    double l_plus_norm() const;

    const std::vector<std::vector<std::size_t>>& vertex_sets() const { return vertex_sets_; }
    const std::optional<std::vector<LocalBlock>>& locality_witness() const { return witness_; }
    // Witness if recorded, otherwise blocks recovered from a block-diagonal
    // scattering matrix; nullopt for non-local conditions.
    std::optional<std::vector<LocalBlock>> local_blocks() const;
    bool is_local() const { return local_blocks().has_value(); }

    BoundaryConditions with_witness(std::vector<LocalBlock> blocks) const;

private:
    BoundaryConditions() = default;

    CMatrix a_, b_, an_, bn_;
    CanonicalForm canonical_;
    RVector l_spectrum_;
    std::vector<std::vector<std::size_t>> vertex_sets_;
    std::optional<std::vector<LocalBlock>> witness_;
};

inline BoundaryConditions validate_bc(const MetricGraph& graph, CMatrix a, CMatrix b)
{
    return BoundaryConditions::validate(graph, std::move(a), std::move(b));
}

CanonicalForm canonical_form(const BoundaryConditions& bc);

// S(k) = -(A + ikB)^{-1} (A - ikB)
CMatrix scattering_matrix(const BoundaryConditions& bc, cplx k);
CMatrix scattering_matrix(const CMatrix& a, const CMatrix& b, cplx k);

bool bc_equivalent(const BoundaryConditions& first, const BoundaryConditions& second);

Inertia inertia(const BoundaryConditions& bc);

BoundaryConditions make_standard(const MetricGraph& graph);
LocalBlock standard_block(std::size_t degree);

// blocks are indexed by vertex number.
BoundaryConditions assemble_local(const MetricGraph& graph, const std::vector<LocalBlock>& blocks);

struct PositivityReport {
    bool positive = false;
    bool strictly_positive = false;
    bool locally_strictly_positive = false;
    // Smallest grid kappa from which the property holds on the rest of the grid.
    std::optional<double> positive_from;
    std::optional<double> strict_from;
    std::optional<double> local_from;
    // Sign pattern of 1 + S(i kappa) as kappa -> infinity.
    bool asymptotic_positive = false;
    bool asymptotic_strict = false;
    bool asymptotic_local = false;
    bool local = false;
    std::string method;

    std::string label() const;
};

// Entrywise sign tolerance for the order relations on 1 + S(i kappa).
inline constexpr double SIGN_TOLERANCE = 1e-9;

PositivityReport positivity_class(const BoundaryConditions& bc, std::span<const double> kappa_grid);

// Geometric grid starting just above the positive spectrum of L.
std::vector<double> default_kappa_grid(const BoundaryConditions& bc, std::size_t points = 60);

struct FormMatrices {
    CMatrix P_M;   // projection onto M in K + K
    CMatrix Q_M;   // P_M Q P_M
};

FormMatrices form_matrices(const BoundaryConditions& bc);

} // namespace qgraph

#endif
