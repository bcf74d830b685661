#include "qgraph/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qgraph/spectral.hpp"

namespace qgraph {

namespace {

constexpr double LENGTH_SLACK = 1e-12;

class Enumerator {
public:
    Enumerator(const MetricGraph& graph, std::size_t start, std::size_t end, double cutoff, std::size_t cap)
        : graph_(graph), index_(graph), start_(start), end_(end), cutoff_(cutoff), cap_(cap)
    {
    }

    std::vector<Walk> run()
    {
        visit(start_, 0.0);
        return std::move(walks_);
    }

private:
    double length_of(std::size_t k) const { return graph_.edge_length(index_.endpoint(k).edge); }

    void visit(std::size_t arrival, double length)
    {
        const std::size_t v = index_.endpoint(arrival).vertex;
        if (v == index_.endpoint(end_).vertex) {
            record(length);
        }
        for (std::size_t p : index_.at_vertex(v)) {
            auto q = index_.opposite(p);
            if (!q) {
                continue;
            }
            double next = length + length_of(p);
            if (next > cutoff_ * (1.0 + LENGTH_SLACK)) {
                continue;
            }
            path_.push_back(p);
            visit(*q, next);
            path_.pop_back();
        }
    }

    void record(double length)
    {
        if (walks_.size() >= cap_) {
            double estimate = walk_count_estimate(graph_, cutoff_);
            std::ostringstream msg;
            msg << "more than " << cap_ << " walks below metric length " << cutoff_ << " (estimate up to "
                << estimate << "); lower the cutoff";
            throw WalkCapError(msg.str(), estimate);
        }
        Walk w;
        w.start = start_;
        w.end = end_;
        w.steps = path_;
        w.metric_length = length;
        w.edges.push_back(index_.endpoint(start_).edge);
        w.vertices.push_back(index_.endpoint(start_).vertex);
        std::size_t incoming = start_;
        for (std::size_t p : path_) {
            w.transmitted.push_back(index_.endpoint(incoming).edge != index_.endpoint(p).edge);
            w.edges.push_back(index_.endpoint(p).edge);
            incoming = *index_.opposite(p);
            w.vertices.push_back(index_.endpoint(incoming).vertex);
        }
        w.transmitted.push_back(index_.endpoint(incoming).edge != index_.endpoint(end_).edge);
        w.edges.push_back(index_.endpoint(end_).edge);
        walks_.push_back(std::move(w));
    }

    const MetricGraph& graph_;
    EndpointIndex index_;
    std::size_t start_;
    std::size_t end_;
    double cutoff_;
    std::size_t cap_;
    std::vector<std::size_t> path_;
    std::vector<Walk> walks_;
};

void check_point(const MetricGraph& graph, const GraphPoint& p)
{
    if (p.edge >= graph.edge_count()) {
        throw PointOutOfRangeError("edge number " + std::to_string(p.edge) + " out of range");
    }
    const double a = graph.edge_length(p.edge);
    if (!std::isfinite(p.x) || p.x < 0.0 || (std::isfinite(a) && p.x > a * (1.0 + 1e-12))) {
        throw PointOutOfRangeError("coordinate outside edge '" + graph.edge_id(p.edge) + "'");
    }
}

struct Decay {
    std::size_t endpoint;
    double factor;
};

// exp(-kappa x) at the minus endpoint, exp(-kappa (a - x)) at the plus endpoint.
std::vector<Decay> decays(const MetricGraph& graph, const EndpointIndex& index, const GraphPoint& p, double kappa)
{
    std::vector<Decay> out;
    out.push_back({*index.index_of(p.edge, Side::minus), std::exp(-kappa * p.x)});
    if (graph.kind(p.edge) == EdgeKind::internal) {
        out.push_back({*index.index_of(p.edge, Side::plus), std::exp(-kappa * (graph.edge_length(p.edge) - p.x))});
    }
    return out;
}

double spectral_radius(const RMatrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<RMatrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

bool Walk::reflectionless() const
{
    return std::all_of(transmitted.begin(), transmitted.end(), [](bool t) { return t; });
}

std::vector<std::size_t> Walk::score(const MetricGraph& graph) const
{
    std::vector<std::size_t> out(graph.internal_count(), 0);
    for (std::size_t l = 1; l + 1 < edges.size(); ++l) {
        ++out[graph.internal_index(edges[l])];
    }
    return out;
}

std::vector<Walk> enumerate_endpoint_walks(const MetricGraph& graph, std::size_t start, std::size_t end,
                                           double metric_cutoff, std::size_t cap)
{
    if (!(metric_cutoff > 0.0) || !std::isfinite(metric_cutoff)) {
        throw std::invalid_argument("metric cutoff must be positive and finite");
    }
    if (start >= graph.endpoint_dimension() || end >= graph.endpoint_dimension()) {
        throw std::out_of_range("endpoint index out of range");
    }
    return Enumerator(graph, start, end, metric_cutoff, cap).run();
}

std::vector<Walk> enumerate_walks(const MetricGraph& graph, std::size_t j, std::size_t j_prime, Side sigma,
                                  Side sigma_prime, double metric_cutoff, std::size_t cap)
{
    if (j >= graph.edge_count() || j_prime >= graph.edge_count()) {
        throw std::out_of_range("edge number out of range");
    }
    EndpointIndex index(graph);
    auto start = index.index_of(j, sigma);
    auto end = index.index_of(j_prime, sigma_prime);
    if (!start || !end) {
        return {};
    }
    return enumerate_endpoint_walks(graph, *start, *end, metric_cutoff, cap);
}

double walk_count_estimate(const MetricGraph& graph, double metric_cutoff)
{
    if (graph.internal_count() == 0) {
        return 1.0;
    }
    EndpointIndex index(graph);
    const Eigen::Index n = static_cast<Eigen::Index>(index.dimension());
    RMatrix step = RMatrix::Zero(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (std::size_t p : index.at_vertex(index.endpoint(static_cast<std::size_t>(q)).vertex)) {
            if (auto o = index.opposite(p)) {
                step(q, static_cast<Eigen::Index>(*o)) += 1.0;
            }
        }
    }
    const auto m = static_cast<std::size_t>(std::floor(metric_cutoff / graph.min_length()));
    RMatrix power = RMatrix::Identity(n, n);
    RMatrix total = power;
    for (std::size_t i = 0; i < m; ++i) {
        power = power * step;
        total += power;
        if (!total.allFinite()) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return total.maxCoeff();
}

VertexScattering::VertexScattering(const MetricGraph& graph, const BoundaryConditions& bc, double kappa)
    : index_(graph)
{
    auto blocks = bc.local_blocks();
    if (!blocks) {
        throw NonLocalError("walk weights need local boundary conditions");
    }
    for (const auto& block : *blocks) {
        blocks_.push_back(scattering_matrix(block.A, block.B, cplx(0.0, kappa)));
    }
}

cplx VertexScattering::entry(std::size_t from, std::size_t to) const
{
    const std::size_t v = index_.endpoint(from).vertex;
    if (index_.endpoint(to).vertex != v) {
        throw std::logic_error("scattering entry between endpoints at different vertices");
    }
    return blocks_[v](static_cast<Eigen::Index>(index_.local_position(from)),
                      static_cast<Eigen::Index>(index_.local_position(to)));
}

CMatrix VertexScattering::global() const
{
    const Eigen::Index n = static_cast<Eigen::Index>(index_.dimension());
    CMatrix out = CMatrix::Zero(n, n);
    for (std::size_t v = 0; v < blocks_.size(); ++v) {
        const auto& set = index_.at_vertex(v);
        for (std::size_t r = 0; r < set.size(); ++r) {
            for (std::size_t c = 0; c < set.size(); ++c) {
                out(static_cast<Eigen::Index>(set[r]), static_cast<Eigen::Index>(set[c])) =
                    blocks_[v](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    }
    return out;
}

cplx walk_weight(const Walk& walk, const VertexScattering& scattering)
{
    cplx w(1.0, 0.0);
    std::size_t incoming = walk.start;
    for (std::size_t p : walk.steps) {
        w *= scattering.entry(incoming, p);
        incoming = *scattering.index().opposite(p);
    }
    return w * scattering.entry(incoming, walk.end);
}

cplx walk_weight(const MetricGraph& graph, const Walk& walk, const BoundaryConditions& bc, double kappa)
{
    return walk_weight(walk, VertexScattering(graph, bc, kappa));
}

SeriesResult walk_series_green(const MetricGraph& graph, const BoundaryConditions& bc, const GraphPoint& x,
                               const GraphPoint& y, double kappa, double metric_cutoff, std::size_t cap)
{
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("kappa must be positive");
    }
    check_point(graph, x);
    check_point(graph, y);
    EndpointIndex index(graph);
    VertexScattering scattering(graph, bc, kappa);
    const CMatrix s = scattering.global();

    const double s_norm = linalg::spectral_norm(s);
    SeriesResult out;
    if (graph.internal_count() > 0) {
        out.ratio = s_norm * std::exp(-kappa * graph.min_length());
        if (!(out.ratio < 1.0)) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "walk series needs ||S(i kappa)|| exp(-kappa a_min) < 1, got " << out.ratio;
            throw ConvergenceError(msg.str());
        }
    }

    const double half = 1.0 / (2.0 * kappa);
    double r0 = 0.0;
    if (x.edge == y.edge) {
        r0 = half * std::exp(-kappa * std::abs(x.x - y.x));
    }
    cplx sum(0.0, 0.0);
    double abs_sum = 0.0;
    double entry_sum = 0.0;   // absolute error of the scattering entries, propagated
    const auto dx = decays(graph, index, x, kappa);
    const auto dy = decays(graph, index, y, kappa);
    for (const Decay& a : dx) {
        for (const Decay& b : dy) {
            auto walks = enumerate_endpoint_walks(graph, a.endpoint, b.endpoint, metric_cutoff, cap);
            out.walk_count += walks.size();
            for (const Walk& w : walks) {
                cplx term = a.factor * walk_weight(w, scattering) * std::exp(-kappa * w.metric_length) * b.factor;
                sum += term;
                abs_sum += std::abs(term);
                const double n = static_cast<double>(w.combinatorial_length() + 1);
                entry_sum += std::abs(a.factor * b.factor) * n * std::pow(s_norm, n) * std::exp(-kappa * w.metric_length);
            }
        }
    }
    out.value = r0 + half * sum;
    const double eps = std::numeric_limits<double>::epsilon();
    const double dim = static_cast<double>(index.dimension());
    out.rounding_bound = 1e-13 * (half * abs_sum + r0) + static_cast<double>(out.walk_count) * eps * half * abs_sum +
                         8.0 * dim * eps * half * entry_sum;

    if (graph.internal_count() == 0) {
        out.tail_bound = 0.0;
        return out;
    }
    // Omitted walks have |w| > cutoff, so for kappa' < kappa
    //   sum |W| e^{-kappa |w|} <= e^{-(kappa - kappa') cutoff} [(1 - |S||T(i kappa')|)^{-1} |S|].
    const RMatrix abs_s = s.cwiseAbs();
    const Eigen::Index n = abs_s.rows();
    out.tail_bound = std::numeric_limits<double>::infinity();
    for (int step = 10; step <= 19; ++step) {
        const double kp = kappa * 0.05 * step;
        RMatrix t = transfer_matrix(graph, cplx(0.0, kp)).cwiseAbs();
        RMatrix st = abs_s * t;
        if (!(spectral_radius(st) < 1.0)) {
            continue;
        }
        RMatrix resolvent = (RMatrix::Identity(n, n) - st).partialPivLu().solve(abs_s);
        double total = 0.0;
        for (const Decay& a : dx) {
            for (const Decay& b : dy) {
                total += a.factor * b.factor *
                         resolvent(static_cast<Eigen::Index>(a.endpoint), static_cast<Eigen::Index>(b.endpoint));
            }
        }
        double bound = half * std::exp(-(kappa - kp) * metric_cutoff) * total;
        if (bound < out.tail_bound) {
            out.tail_bound = bound;
            out.tail_kappa = kp;
        }
    }
    return out;
}

} // namespace qgraph
