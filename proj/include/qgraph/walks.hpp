#ifndef QGRAPH_WALKS_HPP
#define QGRAPH_WALKS_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/green.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

class WalkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class WalkCapError : public WalkError {
public:
    WalkCapError(const std::string& what, double estimate) : WalkError(what), estimate_(estimate) {}
    // Upper estimate for the number of walks below the cutoff.
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

class ConvergenceError : public WalkError {
public:
    using WalkError::WalkError;
};

// A walk {j, v0, j1, v1, ..., jn, vn, j'} stored through endpoints of K: it
// leaves j through `start`, enters the internal edges j1..jn through
// `steps[l]` (and leaves through the opposite endpoint), and enters j'
// through `end`.
struct Walk {
    std::size_t start = 0;
    std::size_t end = 0;
    std::vector<std::size_t> steps;

    std::vector<std::size_t> edges;      // j, j1, ..., jn, j'
    std::vector<std::size_t> vertices;   // v0, ..., vn
    std::vector<bool> transmitted;       // one flag per vertex visit
    double metric_length = 0.0;

    std::size_t combinatorial_length() const { return steps.size(); }
    bool trivial() const { return steps.empty(); }
    bool reflectionless() const;
    // n_i(w) per internal edge.
    std::vector<std::size_t> score(const MetricGraph& graph) const;
};

inline constexpr std::size_t DEFAULT_WALK_CAP = 1000000;

// All walks from endpoint `start` to endpoint `end` with metric length <= cutoff.
std::vector<Walk> enumerate_endpoint_walks(const MetricGraph& graph, std::size_t start, std::size_t end,
                                           double metric_cutoff, std::size_t cap = DEFAULT_WALK_CAP);

// W^{(sigma, sigma')}_{j, j'} truncated at the cutoff. External edges only have
// the minus side; asking for their plus side gives an empty set.
std::vector<Walk> enumerate_walks(const MetricGraph& graph, std::size_t j, std::size_t j_prime, Side sigma,
                                  Side sigma_prime, double metric_cutoff, std::size_t cap = DEFAULT_WALK_CAP);

// Upper estimate for the number of walks between two endpoints below the cutoff.
double walk_count_estimate(const MetricGraph& graph, double metric_cutoff);

// Per-vertex scattering blocks at k = i kappa.
class VertexScattering {
public:
    VertexScattering(const MetricGraph& graph, const BoundaryConditions& bc, double kappa);
    // Entry of S(i kappa; M(v)) between two endpoints at the same vertex.
    cplx entry(std::size_t from, std::size_t to) const;
    // Block-diagonal assembly on K.
    CMatrix global() const;
    const EndpointIndex& index() const { return index_; }

private:
    EndpointIndex index_;
    std::vector<CMatrix> blocks_;
};

cplx walk_weight(const Walk& walk, const VertexScattering& scattering);
cplx walk_weight(const MetricGraph& graph, const Walk& walk, const BoundaryConditions& bc, double kappa);

struct SeriesResult {
    cplx value;
    double tail_bound = 0.0;       // bound on the omitted walks
    double rounding_bound = 0.0;   // floating-point allowance
    double ratio = 0.0;            // ||S(i kappa)|| exp(-kappa a_min)
    double tail_kappa = 0.0;       // auxiliary kappa' used for the tail bound
    std::size_t walk_count = 0;

    double bound() const { return tail_bound + rounding_bound; }
};

SeriesResult walk_series_green(const MetricGraph& graph, const BoundaryConditions& bc, const GraphPoint& x,
                               const GraphPoint& y, double kappa, double metric_cutoff,
                               std::size_t cap = DEFAULT_WALK_CAP);

} // namespace qgraph

#endif
