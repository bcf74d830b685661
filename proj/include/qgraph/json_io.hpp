#ifndef QGRAPH_JSON_IO_HPP
#define QGRAPH_JSON_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

// Malformed or inconsistent input document.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Problem {
    MetricGraph graph;
    BoundaryConditions bc;
};

GraphDescription parse_graph(const nlohmann::json& doc);

// "bc" is {"type": "standard"}, {"type": "matrices", "A": ..., "B": ...} or
// {"type": "local", "blocks": {vertex: {"A": ..., "B": ...}}}. A missing
// "bc" key means standard conditions.
BoundaryConditions parse_bc(const MetricGraph& graph, const nlohmann::json& bc);

// Entries are numbers or [re, im] pairs.
CMatrix parse_matrix(const nlohmann::json& rows, const std::string& what);

Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::filesystem::path& path);

nlohmann::ordered_json complex_json(cplx z);
nlohmann::ordered_json matrix_json(const CMatrix& m);
nlohmann::ordered_json spectrum_json(const SpectrumReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

// printf %.17g
std::string format_double(double value);

} // namespace qgraph

#endif
