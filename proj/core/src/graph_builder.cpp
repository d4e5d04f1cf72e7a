#include "mltrust/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

template <typename Map>
std::vector<std::string> sorted_keys(const Map& map) {
  std::vector<std::string> keys;
  keys.reserve(map.size());
  for (const auto& [k, v] : map) keys.push_back(k);
  return keys;
}

}  // namespace

std::string_view similarity_name(SimilarityMode mode) {
  return mode == SimilarityMode::kJaccard ? "jaccard" : "intersection";
}

std::optional<SimilarityMode> parse_similarity(std::string_view text) {
  if (text == "intersection" || text == "intersection_count") {
    return SimilarityMode::kIntersectionCount;
  }
  if (text == "jaccard") return SimilarityMode::kJaccard;
  return std::nullopt;
}

double intra_weight(const std::set<std::string>& attrs_i, const std::set<std::string>& attrs_j,
                    SimilarityMode mode) {
  const auto common = static_cast<double>(intersection_size(attrs_i, attrs_j));
  if (mode == SimilarityMode::kIntersectionCount) return common;
  const double joint = static_cast<double>(attrs_i.size() + attrs_j.size()) - common;
  return joint == 0.0 ? 0.0 : common / joint;
}

double equipment_adjusted_weight(std::int64_t doctor_count,
                                 std::span<const double> equipment_priorities) {
  if (doctor_count < 0) {
    throw Error(ErrorCode::kOutOfRange, "doctor count must be non-negative");
  }
  double weight = static_cast<double>(doctor_count);
  for (double p : equipment_priorities) {
    if (!std::isfinite(p)) throw Error(ErrorCode::kInvalidConfig, "priority is not finite");
    if (p < 0.0) throw Error(ErrorCode::kNegativePriority, "equipment priority is negative");
    weight += p;
  }
  return weight;
}

LayerGraph build_layer_graph(const EntityStore& store, LayerId layer) {
  LayerGraph g;
  g.layer = layer;
  switch (layer) {
    case LayerId::kHospital:
      g.node_ids = sorted_keys(store.hospitals);
      for (const auto& [id, h] : store.hospitals) {
        g.attributes.push_back(hospital_departments(store, h));
      }
      for (const auto& [id, d] : store.departments) g.parameter_universe.insert(id);
      break;
    case LayerId::kDepartment:
      g.node_ids = sorted_keys(store.departments);
      for (const auto& [id, d] : store.departments) {
        g.attributes.push_back(department_doctors(store, d));
      }
      for (const auto& [id, d] : store.doctors) g.parameter_universe.insert(id);
      break;
    case LayerId::kDoctor:
      g.node_ids = sorted_keys(store.doctors);
      for (const auto& [id, d] : store.doctors) g.attributes.push_back(d.hospital_ids);
      for (const auto& [id, h] : store.hospitals) g.parameter_universe.insert(id);
      break;
    default:
      throw Error(ErrorCode::kUnknownLayer, "layer must be hospital, department or doctor");
  }
  return g;
}

AdjacencyBlock build_intra_layer(const EntityStore& store, LayerId layer,
                                 SimilarityMode mode) {
  const LayerGraph g = build_layer_graph(store, layer);
  AdjacencyBlock block{layer, layer, DenseMatrix(g.size(), g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double w = intra_weight(g.attributes[i], g.attributes[j], mode);
      block.weights(i, j) = w;
      block.weights(j, i) = w;
    }
  }
  return block;
}

AdjacencyBlock build_inter_layer(const EntityStore& store, LayerId rows, LayerId cols,
                                 const EquipmentPriorities& equipment) {
  if (rows == LayerId::kHospital && cols == LayerId::kDepartment) {
    AdjacencyBlock block{rows, cols,
                         DenseMatrix(store.hospitals.size(), store.departments.size())};
    std::size_t i = 0;
    for (const auto& [hid, hospital] : store.hospitals) {
      std::size_t j = 0;
      for (const auto& [did, dept] : store.departments) {
        std::int64_t count = 0;
        // Explicit counts describe the whole row; unlisted departments get 0.
        if (!hospital.department_doctor_counts.empty()) {
          auto it = hospital.department_doctor_counts.find(did);
          if (it != hospital.department_doctor_counts.end()) {
            count = static_cast<std::int64_t>(it->second);
          }
        } else {
          count = std::count_if(store.doctors.begin(), store.doctors.end(), [&](const auto& kv) {
            return kv.second.hospital_ids.contains(hid) && kv.second.department_ids.contains(did);
          });
        }
        if (count > 0) {
          auto pr = equipment.find({hid, did});
          block.weights(i, j) = pr == equipment.end()
                                    ? equipment_adjusted_weight(count, {})
                                    : equipment_adjusted_weight(count, pr->second);
        }
        ++j;
      }
      ++i;
    }
    return block;
  }
  if (rows == LayerId::kDepartment && cols == LayerId::kDoctor) {
    AdjacencyBlock block{rows, cols,
                         DenseMatrix(store.departments.size(), store.doctors.size())};
    std::size_t i = 0;
    for (const auto& [did, dept] : store.departments) {
      const auto members = department_doctors(store, dept);
      std::size_t j = 0;
      for (const auto& [pid, doctor] : store.doctors) {
        if (members.contains(pid)) {
          auto it = dept.doctor_weights.find(pid);
          block.weights(i, j) = it != dept.doctor_weights.end()
                                    ? it->second
                                    : doctor.qualification_score.value_or(0.0);
        }
        ++j;
      }
      ++i;
    }
    return block;
  }
  throw Error(ErrorCode::kUnsupportedLayerPair,
              "no inter-layer block for " + std::string(layer_name(rows)) + " x " +
                  std::string(layer_name(cols)));
}

MultiLayerNetwork build_network(const EntityStore& store, const BuildOptions& options) {
  MultiLayerNetwork network;
  for (LayerId layer : kAllLayers) {
    network.layers[layer_index(layer)] = build_layer_graph(store, layer);
    network.intra[layer_index(layer)] = build_intra_layer(store, layer, options.similarity);
  }
  network.hospital_department =
      build_inter_layer(store, LayerId::kHospital, LayerId::kDepartment, options.equipment);
  network.department_doctor = build_inter_layer(store, LayerId::kDepartment, LayerId::kDoctor);
  return network;
}

}  // namespace mltrust
