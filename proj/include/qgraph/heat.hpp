#ifndef QGRAPH_HEAT_HPP
#define QGRAPH_HEAT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

class HeatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Free heat kernel on the line.
double heat_gaussian(double x, double t);

// exp(w^2) erfc(w)
double erfcx(double w);

// h_t(s; lambda) = -lambda exp(lambda^2 t - lambda s) erfc(s/(2 sqrt t) - lambda sqrt t)
double h_scalar(double s, double t, double lambda);

// h_t(s; H) by the spectral theorem.
CMatrix h_matrix(double s, double t, const CMatrix& h);

enum class HeatFamily { standard, robin };

struct HeatKernelSpec {
    std::size_t degree = 0;
    HeatFamily family = HeatFamily::standard;
    CMatrix H;   // robin only: A = H, B = 1

    static HeatKernelSpec standard(std::size_t degree);
    static HeatKernelSpec robin(CMatrix h);
};

// Closed-form heat kernel of a star graph.
class StarHeatKernel {
public:
    explicit StarHeatKernel(HeatKernelSpec spec);

    const HeatKernelSpec& spec() const { return spec_; }
    std::size_t degree() const { return spec_.degree; }

    // [p_t(x, y)]_{e, e'} with x on edge e and y on edge e'.
    cplx entry(double t, std::size_t e, double x, std::size_t e_prime, double y) const;
    // h_t(s; H) from the cached eigendecomposition.
    CMatrix h(double s, double t) const;

private:
    HeatKernelSpec spec_;
    RVector eigenvalues_;
    CMatrix eigenvectors_;
};

cplx star_heat_kernel(const HeatKernelSpec& spec, double t, std::size_t e, double x, std::size_t e_prime, double y);

// Reads the family off validated star-graph conditions: standard if equivalent to
// the standard conditions, robin if B is invertible (then H = L).
HeatKernelSpec detect_heat_family(const MetricGraph& graph, const BoundaryConditions& bc);

// Uniformly sampled function on the edges of a star, x in [0, x_max].
struct StarSamples {
    double x_max = 0.0;
    std::vector<double> grid;                  // shared by all edges
    std::vector<std::vector<double>> values;   // values[e][i]
};

StarSamples make_star_samples(std::size_t degree, double x_max, std::size_t points);

struct HeatApplyResult {
    StarSamples output;
    double min_value = 0.0;
    double max_imag = 0.0;
    std::vector<std::string> notes;
};

// Sum over e' of the Simpson rule for int p_t(x, y) psi0(y) dy on [0, x_max].
HeatApplyResult heat_apply(const StarHeatKernel& kernel, const StarSamples& psi0, double t);

// Default quadrature cutoff for time t.
double default_heat_cutoff(const HeatKernelSpec& spec, double t);

} // namespace qgraph

#endif
