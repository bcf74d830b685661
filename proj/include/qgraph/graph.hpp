#ifndef QGRAPH_GRAPH_HPP
#define QGRAPH_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qgraph {

// Input records, identifiers are opaque strings.
struct InternalEdgeSpec {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
};

struct ExternalEdgeSpec {
    std::string id;
    std::string vertex;
};

struct GraphDescription {
    std::vector<std::string> vertices;
    std::vector<InternalEdgeSpec> internal_edges;
    std::vector<ExternalEdgeSpec> external_edges;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DisconnectedGraphError : public GraphError {
public:
    using GraphError::GraphError;
};

class NonPositiveLengthError : public GraphError {
public:
    using GraphError::GraphError;
};

class DanglingEndpointError : public GraphError {
public:
    using GraphError::GraphError;
};

class DuplicateIdentifierError : public GraphError {
public:
    using GraphError::GraphError;
};

// Dense edge numbering used by every kernel matrix: external edges first
// (input order), then internal edges (input order).
enum class EdgeKind { external, internal };

enum class Side { minus, plus };

// Finite connected metric graph. Immutable after construction.
class MetricGraph {
public:
    static MetricGraph build(const GraphDescription& description);

    std::size_t vertex_count() const { return vertex_ids_.size(); }
    std::size_t internal_count() const { return lengths_.size(); }
    std::size_t external_count() const { return anchors_.size(); }
    std::size_t edge_count() const { return internal_count() + external_count(); }
    // dim K = |E| + 2|I|
    std::size_t endpoint_dimension() const { return external_count() + 2 * internal_count(); }

    bool is_compact() const { return anchors_.empty(); }
    bool is_star() const { return vertex_count() == 1 && internal_count() == 0; }

    const std::string& vertex_id(std::size_t v) const { return vertex_ids_.at(v); }
    const std::string& edge_id(std::size_t edge) const { return edge_ids_.at(edge); }
    std::optional<std::size_t> find_vertex(std::string_view id) const;
    std::optional<std::size_t> find_edge(std::string_view id) const;

    EdgeKind kind(std::size_t edge) const {
        return edge < external_count() ? EdgeKind::external : EdgeKind::internal;
    }
    std::size_t internal_index(std::size_t edge) const { return edge - external_count(); }
    std::size_t edge_of_internal(std::size_t i) const { return external_count() + i; }

    double length(std::size_t internal) const { return lengths_.at(internal); }
    // Length of a dense-numbered edge; +inf for external edges.
    double edge_length(std::size_t edge) const;
    const std::vector<double>& lengths() const { return lengths_; }
    double min_length() const;
    double max_length() const;

    std::size_t initial_vertex(std::size_t internal) const { return initial_.at(internal); }
    std::size_t terminal_vertex(std::size_t internal) const { return terminal_.at(internal); }
    std::size_t anchor(std::size_t external) const { return anchors_.at(external); }
    // Vertex at the given side of a dense-numbered edge. External edges only
    // have the minus side.
    std::size_t vertex_at(std::size_t edge, Side side) const;

    std::size_t degree(std::size_t v) const { return degrees_.at(v); }
    bool is_tadpole(std::size_t internal) const { return initial_[internal] == terminal_[internal]; }
    std::vector<std::size_t> tadpoles() const;
    bool has_tadpoles() const { return !tadpoles().empty(); }

private:
    MetricGraph() = default;

    std::vector<std::string> vertex_ids_;
    std::vector<std::string> edge_ids_;
    std::unordered_map<std::string, std::size_t> vertex_lookup_;
    std::unordered_map<std::string, std::size_t> edge_lookup_;
    std::vector<std::size_t> anchors_;
    std::vector<std::size_t> initial_;
    std::vector<std::size_t> terminal_;
    std::vector<double> lengths_;
    std::vector<std::size_t> degrees_;
};

inline MetricGraph build_graph(const GraphDescription& description)
{
    return MetricGraph::build(description);
}

enum class EndpointKind { external, initial, terminal };

struct Endpoint {
    std::size_t edge;    // dense edge number
    EndpointKind kind;
    std::size_t vertex;
};

// Ordered basis of K: external edges, then initial endpoints of internal
// edges, then terminal endpoints, each block in input order. The vertex
// sets partition {0, ..., dim-1}; indices inside each set are ascending.
class EndpointIndex {
public:
    explicit EndpointIndex(const MetricGraph& graph);

    std::size_t dimension() const { return endpoints_.size(); }
    const Endpoint& endpoint(std::size_t k) const { return endpoints_.at(k); }
    const std::vector<std::size_t>& at_vertex(std::size_t v) const { return by_vertex_.at(v); }
    const std::vector<std::vector<std::size_t>>& partition() const { return by_vertex_; }

    std::size_t external(std::size_t e) const { return e; }
    std::size_t initial(std::size_t i) const { return n_external_ + i; }
    std::size_t terminal(std::size_t i) const { return n_external_ + n_internal_ + i; }
    // K-index of an edge side; nullopt for the plus side of an external edge.
    std::optional<std::size_t> index_of(std::size_t edge, Side side) const;
    // The other endpoint of the same internal edge; nullopt for external.
    std::optional<std::size_t> opposite(std::size_t k) const;
    // Position of k inside its vertex set.
    std::size_t local_position(std::size_t k) const { return local_pos_.at(k); }

private:
    std::size_t n_external_ = 0;
    std::size_t n_internal_ = 0;
    std::vector<Endpoint> endpoints_;
    std::vector<std::vector<std::size_t>> by_vertex_;
    std::vector<std::size_t> local_pos_;
};

inline EndpointIndex endpoint_index(const MetricGraph& graph) { return EndpointIndex(graph); }

} // namespace qgraph

#endif
