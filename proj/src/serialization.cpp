#include "relu_dissect/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "relu_dissect/errors.hpp"

namespace relu_dissect {

using nlohmann::json;

namespace {

double to_number(const json& value, const std::string& where) {
    if (!value.is_number()) throw SchemaError(where + ": expected a number");
    return value.get<double>();
}

Eigen::VectorXd to_vector(const json& value, const std::string& where) {
    if (!value.is_array()) throw SchemaError(where + ": expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_number(value[i], where);
    return v;
}

Eigen::MatrixXd to_matrix(const json& value, const std::string& where) {
    if (!value.is_array()) throw SchemaError(where + ": expected an array of rows");
    if (value.empty()) return Eigen::MatrixXd(0, 0);
    const std::size_t cols = value[0].is_array() ? value[0].size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(value.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < value.size(); ++i) {
        const json& row = value[i];
        if (!row.is_array()) throw SchemaError(where + ": row " + std::to_string(i) + " is not an array");
        if (row.size() != cols) throw SchemaError(where + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_number(row[j], where);
    }
    return m;
}

json from_matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json from_vector(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

const json& field(const json& object, const char* name, const std::string& where) {
    if (!object.is_object()) throw SchemaError(where + ": expected an object");
    auto it = object.find(name);
    if (it == object.end()) throw SchemaError(where + ": missing field \"" + name + "\"");
    return *it;
}

HPolyhedron to_polyhedron(const json& h, Eigen::Index dim, const std::string& where) {
    Eigen::MatrixXd m = to_matrix(h, where);
    if (m.rows() == 0) return HPolyhedron(dim);
    if (m.cols() != dim + 1)
        throw SchemaError(where + ": H rows need " + std::to_string(dim + 1) + " entries");
    if (!m.allFinite()) throw SchemaError(where + ": non-finite entry");
    return HPolyhedron(std::move(m));
}

}  // namespace

Network load_network(const json& document) {
    const json& input_dim = field(document, "input_dim", "network");
    if (!input_dim.is_number_integer() || input_dim.get<long long>() < 1)
        throw SchemaError("network: input_dim must be a positive integer");
    const json& layers = field(document, "layers", "network");
    if (!layers.is_array()) throw SchemaError("network: layers must be an array");

    std::vector<LayerNode> nodes;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string where = "layer " + std::to_string(i);
        const json& type = field(layers[i], "type", where);
        if (!type.is_string()) throw SchemaError(where + ": type must be a string");
        const auto kind = type.get<std::string>();
        if (kind == "relu") {
            nodes.emplace_back(Relu{});
        } else if (kind == "dense") {
            DenseLayer dense;
            dense.weights = to_matrix(field(layers[i], "weights", where), where + " weights");
            dense.bias = to_vector(field(layers[i], "bias", where), where + " bias");
            if (!dense.weights.allFinite() || !dense.bias.allFinite())
                throw NonFiniteWeight(where + ": non-finite weight or bias");
            nodes.emplace_back(std::move(dense));
        } else {
            throw SchemaError(where + ": unknown layer type \"" + kind + "\"");
        }
    }
    return Network(static_cast<Eigen::Index>(input_dim.get<long long>()), std::move(nodes));
}

json save_network(const Network& net) {
    json layers = json::array();
    for (const auto& node : net.layers()) {
        if (const auto* dense = std::get_if<DenseLayer>(&node))
            layers.push_back({{"type", "dense"}, {"weights", from_matrix(dense->weights)}, {"bias", from_vector(dense->bias)}});
        else
            layers.push_back({{"type", "relu"}});
    }
    return {{"input_dim", net.input_dim()}, {"layers", std::move(layers)}};
}

json save_pwa(const PwaFunction& pwa) {
    json regions = json::array();
    for (const auto& r : pwa.regions)
        regions.push_back({{"H", from_matrix(r.region.matrix())}, {"P", from_matrix(r.matrix)}, {"pattern", r.pattern.bits}});
    return {{"input_dim", pwa.input_dim},
            {"output_dim", pwa.output_dim},
            {"domain", {{"H", from_matrix(pwa.domain.matrix())}}},
            {"regions", std::move(regions)}};
}

PwaFunction load_pwa(const json& document) {
    PwaFunction pwa;
    const json& input_dim = field(document, "input_dim", "pwa");
    const json& output_dim = field(document, "output_dim", "pwa");
    if (!input_dim.is_number_integer() || input_dim.get<long long>() < 1 || !output_dim.is_number_integer() ||
        output_dim.get<long long>() < 1)
        throw SchemaError("pwa: input_dim and output_dim must be positive integers");
    pwa.input_dim = input_dim.get<long long>();
    pwa.output_dim = output_dim.get<long long>();
    pwa.domain = to_polyhedron(field(field(document, "domain", "pwa"), "H", "pwa domain"), pwa.input_dim, "pwa domain");

    const json& regions = field(document, "regions", "pwa");
    if (!regions.is_array()) throw SchemaError("pwa: regions must be an array");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const std::string where = "region " + std::to_string(i);
        LinearRegion region{to_polyhedron(field(regions[i], "H", where), pwa.input_dim, where),
                            to_matrix(field(regions[i], "P", where), where + " P"),
                            {}};
        if (region.matrix.rows() != pwa.output_dim + 1 || region.matrix.cols() != pwa.input_dim + 1)
            throw SchemaError(where + ": P must be (output_dim+1) x (input_dim+1)");
        const json& pattern = field(regions[i], "pattern", where);
        if (!pattern.is_string()) throw SchemaError(where + ": pattern must be a string");
        region.pattern.bits = pattern.get<std::string>();
        if (region.pattern.bits.find_first_not_of("+-") != std::string::npos)
            throw SchemaError(where + ": pattern may only contain '+' and '-'");
        pwa.regions.push_back(std::move(region));
    }
    return pwa;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace relu_dissect
