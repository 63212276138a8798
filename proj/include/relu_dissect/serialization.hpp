#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "relu_dissect/network.hpp"
#include "relu_dissect/pwa.hpp"

namespace relu_dissect {

/// Network document:
///   {"input_dim": 2, "layers": [{"type": "dense", "weights": [[..], ..], "bias": [..]},
///                               {"type": "relu"}]}
/// Weights are row-major, out x in. Throws SchemaError, DimensionChainError or
/// NonFiniteWeight; messages name the offending layer index.
Network load_network(const nlohmann::json& document);
nlohmann::json save_network(const Network& net);

/// PWA document:
///   {"input_dim": d, "output_dim": m, "domain": {"H": [[w.., b], ..]},
///    "regions": [{"H": [[w.., b], ..], "P": [[..], ..], "pattern": "+-+"}]}
nlohmann::json save_pwa(const PwaFunction& pwa);
PwaFunction load_pwa(const nlohmann::json& document);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace relu_dissect
