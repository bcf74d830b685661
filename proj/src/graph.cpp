#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace qgraph {

MetricGraph MetricGraph::build(const GraphDescription& description)
{
    MetricGraph g;
    if (description.vertices.empty()) {
        throw DisconnectedGraphError("graph has no vertices");
    }
    for (const auto& id : description.vertices) {
        if (!g.vertex_lookup_.emplace(id, g.vertex_ids_.size()).second) {
            throw DuplicateIdentifierError("duplicate vertex id '" + id + "'");
        }
        g.vertex_ids_.push_back(id);
    }

    auto lookup = [&](const std::string& vertex, const std::string& edge) {
        auto it = g.vertex_lookup_.find(vertex);
        if (it == g.vertex_lookup_.end()) {
            throw DanglingEndpointError("edge '" + edge + "' references unknown vertex '" + vertex + "'");
        }
        return it->second;
    };
    auto add_edge_id = [&](const std::string& id) {
        if (!g.edge_lookup_.emplace(id, g.edge_ids_.size()).second) {
            throw DuplicateIdentifierError("duplicate edge id '" + id + "'");
        }
        g.edge_ids_.push_back(id);
    };

    g.degrees_.assign(g.vertex_ids_.size(), 0);
    for (const auto& e : description.external_edges) {
        add_edge_id(e.id);
        std::size_t v = lookup(e.vertex, e.id);
        g.anchors_.push_back(v);
        ++g.degrees_[v];
    }
    for (const auto& i : description.internal_edges) {
        add_edge_id(i.id);
        if (!(i.length > 0.0) || !std::isfinite(i.length)) {
            throw NonPositiveLengthError("internal edge '" + i.id + "' has nonpositive length");
        }
        std::size_t from = lookup(i.from, i.id);
        std::size_t to = lookup(i.to, i.id);
        g.initial_.push_back(from);
        g.terminal_.push_back(to);
        g.lengths_.push_back(i.length);
        ++g.degrees_[from];
        ++g.degrees_[to];
    }

    // Connectivity over vertex adjacency induced by internal edges.
    std::vector<std::vector<std::size_t>> adjacent(g.vertex_count());
    for (std::size_t i = 0; i < g.internal_count(); ++i) {
        adjacent[g.initial_[i]].push_back(g.terminal_[i]);
        adjacent[g.terminal_[i]].push_back(g.initial_[i]);
    }
    std::vector<bool> seen(g.vertex_count(), false);
    std::queue<std::size_t> pending;
    pending.push(0);
    seen[0] = true;
    while (!pending.empty()) {
        std::size_t v = pending.front();
        pending.pop();
        for (std::size_t w : adjacent[v]) {
            if (!seen[w]) {
                seen[w] = true;
                pending.push(w);
            }
        }
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (!seen[v]) {
            throw DisconnectedGraphError("vertex '" + g.vertex_ids_[v] + "' is not reachable from '" +
                                         g.vertex_ids_[0] + "'");
        }
        if (g.degrees_[v] == 0) {
            throw DisconnectedGraphError("vertex '" + g.vertex_ids_[v] + "' has no incident edge");
        }
    }
    return g;
}

std::optional<std::size_t> MetricGraph::find_vertex(std::string_view id) const
{
    auto it = vertex_lookup_.find(std::string(id));
    if (it == vertex_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> MetricGraph::find_edge(std::string_view id) const
{
    auto it = edge_lookup_.find(std::string(id));
    if (it == edge_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double MetricGraph::edge_length(std::size_t edge) const
{
    if (kind(edge) == EdgeKind::external) {
        return std::numeric_limits<double>::infinity();
    }
    return lengths_.at(internal_index(edge));
}

double MetricGraph::min_length() const
{
    if (lengths_.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    return *std::min_element(lengths_.begin(), lengths_.end());
}

double MetricGraph::max_length() const
{
    if (lengths_.empty()) {
        return 0.0;
    }
    return *std::max_element(lengths_.begin(), lengths_.end());
}

std::size_t MetricGraph::vertex_at(std::size_t edge, Side side) const
{
    if (kind(edge) == EdgeKind::external) {
        if (side == Side::plus) {
            throw std::invalid_argument("external edge '" + edge_ids_.at(edge) + "' has no terminal vertex");
        }
        return anchors_.at(edge);
    }
    std::size_t i = internal_index(edge);
    return side == Side::minus ? initial_.at(i) : terminal_.at(i);
}

std::vector<std::size_t> MetricGraph::tadpoles() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < internal_count(); ++i) {
        if (is_tadpole(i)) {
            out.push_back(i);
        }
    }
    return out;
}

EndpointIndex::EndpointIndex(const MetricGraph& graph)
    : n_external_(graph.external_count()), n_internal_(graph.internal_count())
{
    endpoints_.reserve(graph.endpoint_dimension());
    for (std::size_t e = 0; e < n_external_; ++e) {
        endpoints_.push_back({e, EndpointKind::external, graph.anchor(e)});
    }
    for (std::size_t i = 0; i < n_internal_; ++i) {
        endpoints_.push_back({graph.edge_of_internal(i), EndpointKind::initial, graph.initial_vertex(i)});
    }
    for (std::size_t i = 0; i < n_internal_; ++i) {
        endpoints_.push_back({graph.edge_of_internal(i), EndpointKind::terminal, graph.terminal_vertex(i)});
    }
    by_vertex_.assign(graph.vertex_count(), {});
    local_pos_.assign(endpoints_.size(), 0);
    for (std::size_t k = 0; k < endpoints_.size(); ++k) {
        auto& set = by_vertex_[endpoints_[k].vertex];
        local_pos_[k] = set.size();
        set.push_back(k);
    }
}

std::optional<std::size_t> EndpointIndex::index_of(std::size_t edge, Side side) const
{
    if (edge < n_external_) {
        if (side == Side::plus) {
            return std::nullopt;
        }
        return edge;
    }
    std::size_t i = edge - n_external_;
    if (i >= n_internal_) {
        throw std::out_of_range("edge number out of range");
    }
    return side == Side::minus ? initial(i) : terminal(i);
}

std::optional<std::size_t> EndpointIndex::opposite(std::size_t k) const
{
    switch (endpoints_.at(k).kind) {
    case EndpointKind::external:
        return std::nullopt;
    case EndpointKind::initial:
        return k + n_internal_;
    case EndpointKind::terminal:
        return k - n_internal_;
    }
    return std::nullopt;
}

} // namespace qgraph
