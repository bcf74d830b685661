#ifndef QGRAPH_GREEN_HPP
#define QGRAPH_GREEN_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

struct GraphPoint {
    std::size_t edge = 0;   // dense edge number
    double x = 0.0;
};

class GreenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PointOutOfRangeError : public GreenError {
public:
    using GreenError::GreenError;
};

// k^2 is at or too close to an eigenvalue.
class NearEigenvalueError : public GreenError {
public:
    NearEigenvalueError(const std::string& what, cplx k, double ratio) : GreenError(what), k_(k), ratio_(ratio) {}
    cplx k() const { return k_; }
    double ratio() const { return ratio_; }

private:
    cplx k_;
    double ratio_;
};

enum class GreenFormula { automatic, resolvent, scattering };

std::string to_string(GreenFormula formula);

struct GreenValue {
    cplx value;
    // Sum of the moduli of all contributions; scale for rounding error.
    double envelope = 0.0;
};

inline constexpr double GREEN_GUARD = 1e-8;

// Green's matrix at a fixed spectral parameter with Im k > 0.
class GreenKernel {
public:
    GreenKernel(const MetricGraph& graph, const BoundaryConditions& bc, cplx k,
                GreenFormula formula = GreenFormula::automatic);

    cplx k() const { return k_; }
    GreenFormula formula() const { return formula_; }
    // sigma_min / ||.|| of the balanced secular matrix.
    double guard_ratio() const { return guard_ratio_; }

    GreenValue evaluate(const GraphPoint& x, const GraphPoint& y) const;
    cplx operator()(const GraphPoint& x, const GraphPoint& y) const { return evaluate(x, y).value; }

    void check_point(const GraphPoint& p) const;

private:
    MetricGraph graph_;
    EndpointIndex index_;
    cplx k_;
    GreenFormula formula_;
    double guard_ratio_ = 0.0;
    CMatrix core_;   // r = r0 + (i/2k) w(x)^T core w(y)
};

cplx greens_function(const MetricGraph& graph, const BoundaryConditions& bc, const GraphPoint& x,
                     const GraphPoint& y, cplx k, GreenFormula formula = GreenFormula::automatic);

struct KappaScan {
    double kappa = 0.0;
    double min_entry = 0.0;
    double min_relative = 0.0;   // min of value / envelope
    std::size_t samples = 0;
    bool all_positive = false;
    bool all_nonnegative = false;
    double symmetry_residual = 0.0;
};

struct GreenPositivityReport {
    std::string classification;
    std::string theorem;        // empty when none applies
    std::string requirement;    // "positive" or "nonnegative"
    bool applicable = false;
    std::vector<KappaScan> scans;
    std::optional<double> threshold;
    std::vector<std::string> notes;
};

struct GreenScanOptions {
    std::size_t grid_density = 10;       // sample points per edge, endpoints included
    std::optional<double> x_max;         // external cutoff; default 5 max(1, 1/kappa)
    std::vector<double> classification_grid;   // empty: default grid
};

// Relative tolerance for sign decisions on sampled entries.
inline constexpr double GREEN_SIGN_TOLERANCE = 1e-12;

GreenPositivityReport greens_positivity_scan(const MetricGraph& graph, const BoundaryConditions& bc,
                                             std::span<const double> kappas, const GreenScanOptions& options = {});

// Sample points on one edge, endpoints included.
std::vector<double> edge_samples(const MetricGraph& graph, std::size_t edge, std::size_t count, double x_max);

} // namespace qgraph

#endif
