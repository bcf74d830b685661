#ifndef QGRAPH_FEM_HPP
#define QGRAPH_FEM_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

class FemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Piecewise-linear discretization of sum int |psi'|^2 - <psi, L psi> on
// {P psi = 0}. Every edge carries its own nodes; external edges stop at x_max
// with a Dirichlet cap.
struct DiscreteForm {
    double h = 0.0;
    double x_max = 0.0;
    std::vector<std::vector<double>> nodes;   // coordinates per dense edge
    std::vector<std::size_t> offset;           // first unconstrained dof per edge
    std::size_t unconstrained = 0;

    using Sparse = Eigen::SparseMatrix<cplx>;
    Sparse C;           // unconstrained nodal values = C * reduced coordinates
    Sparse K_full;      // stiffness on unconstrained nodes
    Sparse M_full;      // mass on unconstrained nodes
    CMatrix K;          // C^dagger K_full C - C^dagger (boundary term) C
    CMatrix M;          // C^dagger M_full C
    bool real = false;
    std::vector<std::string> notes;

    std::size_t dimension() const { return static_cast<std::size_t>(K.rows()); }
};

DiscreteForm assemble(const MetricGraph& graph, const BoundaryConditions& bc, double h, double x_max = 20.0);

std::vector<double> oracle_eigenvalues(const DiscreteForm& form, std::size_t count);

// Nodal values per edge, in the layout of DiscreteForm::nodes.
using NodalFunction = std::vector<std::vector<double>>;

NodalFunction sample_nodal(const DiscreteForm& form, const std::function<double(std::size_t, double)>& f);

// e^{t Delta} psi0 by spectral evolution of the constrained pencil.
NodalFunction oracle_heat_apply(const DiscreteForm& form, const NodalFunction& psi0, double t);

// Discrete heat kernel on unconstrained nodes: u(x_a) = sum_b kernel(a, b) (M psi0)_b.
RMatrix oracle_heat_kernel(const DiscreteForm& form, double t);

} // namespace qgraph

#endif
