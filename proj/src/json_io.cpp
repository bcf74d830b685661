#include "qgraph/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qgraph {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const json& require(const json& doc, const char* key, const std::string& where)
{
    if (!doc.is_object() || !doc.contains(key)) {
        throw InputError(where + ": missing key \"" + key + "\"");
    }
    return doc.at(key);
}

std::string require_string(const json& doc, const char* key, const std::string& where)
{
    const json& v = require(doc, key, where);
    if (!v.is_string()) {
        throw InputError(where + ": \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

cplx parse_entry(const json& v, const std::string& what)
{
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw InputError(what + ": entries must be numbers or [re, im] pairs");
}

} // namespace

GraphDescription parse_graph(const json& doc)
{
    GraphDescription d;
    const json& vertices = require(doc, "vertices", "graph");
    if (!vertices.is_array()) {
        throw InputError("graph: \"vertices\" must be an array of strings");
    }
    for (const auto& v : vertices) {
        if (!v.is_string()) {
            throw InputError("graph: vertex identifiers must be strings");
        }
        d.vertices.push_back(v.get<std::string>());
    }
    if (doc.contains("internal_edges")) {
        const json& edges = doc.at("internal_edges");
        if (!edges.is_array()) {
            throw InputError("graph: \"internal_edges\" must be an array");
        }
        for (const auto& e : edges) {
            InternalEdgeSpec s;
            s.id = require_string(e, "id", "internal edge");
            s.from = require_string(e, "from", "internal edge " + s.id);
            s.to = require_string(e, "to", "internal edge " + s.id);
            const json& len = require(e, "length", "internal edge " + s.id);
            if (!len.is_number()) {
                throw InputError("internal edge " + s.id + ": \"length\" must be a number");
            }
            s.length = len.get<double>();
            d.internal_edges.push_back(s);
        }
    }
    if (doc.contains("external_edges")) {
        const json& edges = doc.at("external_edges");
        if (!edges.is_array()) {
            throw InputError("graph: \"external_edges\" must be an array");
        }
        for (const auto& e : edges) {
            ExternalEdgeSpec s;
            s.id = require_string(e, "id", "external edge");
            s.vertex = require_string(e, "vertex", "external edge " + s.id);
            d.external_edges.push_back(s);
        }
    }
    return d;
}

CMatrix parse_matrix(const json& rows, const std::string& what)
{
    if (!rows.is_array()) {
        throw InputError(what + ": expected an array of rows");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::Index cols = -1;
    CMatrix m;
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array()) {
            throw InputError(what + ": row " + std::to_string(r) + " is not an array");
        }
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(n, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw InputError(what + ": rows have different lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = parse_entry(row[static_cast<std::size_t>(c)], what);
        }
    }
    return m;
}

BoundaryConditions parse_bc(const MetricGraph& graph, const json& bc)
{
    const std::string type = require_string(bc, "type", "bc");
    if (type == "standard") {
        return make_standard(graph);
    }
    if (type == "matrices") {
        CMatrix a = parse_matrix(require(bc, "A", "bc"), "bc.A");
        CMatrix b = parse_matrix(require(bc, "B", "bc"), "bc.B");
        return validate_bc(graph, std::move(a), std::move(b));
    }
    if (type == "local") {
        const json& blocks = require(bc, "blocks", "bc");
        if (!blocks.is_object()) {
            throw InputError("bc.blocks must map vertex identifiers to {\"A\", \"B\"}");
        }
        std::vector<LocalBlock> out(graph.vertex_count());
        std::vector<bool> seen(graph.vertex_count(), false);
        for (const auto& [id, block] : blocks.items()) {
            auto v = graph.find_vertex(id);
            if (!v) {
                throw InputError("bc.blocks: unknown vertex \"" + id + "\"");
            }
            out[*v].A = parse_matrix(require(block, "A", "bc.blocks." + id), "bc.blocks." + id + ".A");
            out[*v].B = parse_matrix(require(block, "B", "bc.blocks." + id), "bc.blocks." + id + ".B");
            seen[*v] = true;
        }
        for (std::size_t v = 0; v < seen.size(); ++v) {
            if (!seen[v]) {
                throw InputError("bc.blocks: no block for vertex \"" + graph.vertex_id(v) + "\"");
            }
        }
        return assemble_local(graph, out);
    }
    throw InputError("bc.type must be \"standard\", \"matrices\" or \"local\", got \"" + type + "\"");
}

Problem parse_problem(const json& doc)
{
    if (!doc.is_object()) {
        throw InputError("input document must be a JSON object");
    }
    MetricGraph graph = build_graph(parse_graph(doc));
    BoundaryConditions bc = doc.contains("bc") ? parse_bc(graph, doc.at("bc")) : make_standard(graph);
    return Problem{std::move(graph), std::move(bc)};
}

Problem load_problem(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open input file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_problem(doc);
}

ordered_json complex_json(cplx z)
{
    return ordered_json::array({z.real(), z.imag()});
}

ordered_json matrix_json(const CMatrix& m)
{
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_json(m(r, c)));
        }
        rows.push_back(row);
    }
    return rows;
}

ordered_json spectrum_json(const SpectrumReport& report)
{
    auto expand = [](const SpectrumPart& part) {
        ordered_json out = ordered_json::array();
        for (const auto& ev : part.values) {
            for (std::size_t m = 0; m < ev.multiplicity; ++m) {
                out.push_back(ev.lambda);
            }
        }
        return out;
    };
    auto detail = [](const SpectrumPart& part) {
        ordered_json out = ordered_json::array();
        for (const auto& ev : part.values) {
            out.push_back({{"lambda", ev.lambda},
                           {"multiplicity", ev.multiplicity},
                           {"k", ev.k},
                           {"residual", ev.residual}});
        }
        return out;
    };
    ordered_json doc;
    doc["negative"] = expand(report.negative);
    doc["zero_dim"] = report.zero.dimension;
    doc["positive"] = expand(report.positive);
    ordered_json cert;
    cert["n_plus"] = report.certificates.n_plus_bound;
    cert["negative_count"] = report.negative_count;
    cert["count_ok"] = report.count_ok;
    cert["l_plus_norm"] = report.certificates.l_plus_norm;
    if (report.certificates.min_length) {
        cert["a_min"] = *report.certificates.min_length;
        cert["s"] = report.certificates.s_value;
    }
    cert["lower_bound"] = report.certificates.lower_bound + 0.0;
    cert["lower_bound_ok"] = report.lower_bound_ok;
    doc["certificates"] = cert;
    doc["negative_detail"] = detail(report.negative);
    doc["positive_detail"] = detail(report.positive);
    ordered_json notes = ordered_json::array();
    for (const auto& n : report.negative.notes) {
        notes.push_back(n);
    }
    for (const auto& n : report.positive.notes) {
        notes.push_back(n);
    }
    doc["notes"] = notes;
    return doc;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace qgraph
