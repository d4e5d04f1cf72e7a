#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mltrust/graph_builder.hpp"
#include "mltrust/ingestion.hpp"
#include "mltrust/model.hpp"
#include "mltrust/trust.hpp"

namespace mltrust {

// Everything downstream commands need from a build: the adjacency blocks,
// per-layer ratings and baseline features, and cleaning provenance.
struct NetworkBundle {
  MultiLayerNetwork network;
  std::array<LayerProfile, 3> profiles;
  Provenance provenance;
  SimilarityMode similarity = SimilarityMode::kIntersectionCount;
  std::vector<std::string> warnings;
};

NetworkBundle make_bundle(const EntityStore& cleaned, const BuildOptions& options);

nlohmann::json bundle_to_json(const NetworkBundle& bundle);
// Rejects a missing or unknown schema_version and structurally invalid
// networks.
NetworkBundle bundle_from_json(const nlohmann::json& doc);

void write_bundle(const std::filesystem::path& path, const NetworkBundle& bundle);
NetworkBundle read_bundle(const std::filesystem::path& path);

nlohmann::json trust_set_to_json(const TrustSet& trust, const MultiLayerNetwork& network);

// Throws SchemaVersion unless doc["schema_version"] is the current version.
void require_schema_version(const nlohmann::json& doc, std::string_view source);

}  // namespace mltrust
