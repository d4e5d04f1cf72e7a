#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mltrust/ingestion.hpp"
#include "mltrust/model.hpp"

namespace mltrust {

enum class SimilarityMode { kIntersectionCount, kJaccard };

std::string_view similarity_name(SimilarityMode mode);
std::optional<SimilarityMode> parse_similarity(std::string_view text);

// Shared-attribute weight between two distinct nodes of one layer.
double intra_weight(const std::set<std::string>& attrs_i,
                    const std::set<std::string>& attrs_j,
                    SimilarityMode mode = SimilarityMode::kIntersectionCount);

// Priority scores of special equipment, keyed by (hospital id, department id).
using EquipmentPriorities = std::map<std::pair<std::string, std::string>, std::vector<double>>;

// doctor_count + sum(priorities). Throws NegativePriority.
double equipment_adjusted_weight(std::int64_t doctor_count,
                                 std::span<const double> equipment_priorities);

// Nodes and attribute sets of one layer: hospitals are described by their
// departments, departments by their doctors, doctors by their hospitals.
LayerGraph build_layer_graph(const EntityStore& store, LayerId layer);

AdjacencyBlock build_intra_layer(const EntityStore& store, LayerId layer,
                                 SimilarityMode mode = SimilarityMode::kIntersectionCount);

// Supported pairs are (Hospital, Department) and (Department, Doctor).
//
// Hospital x Department: doctors of department d working at hospital h. An
// explicit count in the hospital's department list wins; otherwise doctors
// whose hospital and department sets contain h and d are counted.
//
// Department x Doctor: the belongs-to weight of doctor p in department d. An
// explicit weight in the department's doctor list wins; otherwise the
// doctor's qualification score.
AdjacencyBlock build_inter_layer(const EntityStore& store, LayerId rows, LayerId cols,
                                 const EquipmentPriorities& equipment = {});

struct BuildOptions {
  SimilarityMode similarity = SimilarityMode::kIntersectionCount;
  EquipmentPriorities equipment;
};

MultiLayerNetwork build_network(const EntityStore& store, const BuildOptions& options = {});

}  // namespace mltrust
