#include "mltrust/bundle.hpp"

#include <fstream>

#include "mltrust/csv.hpp"
#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

using nlohmann::json;

json matrix_to_json(const DenseMatrix& m) { return m.to_rows(); }

DenseMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                             const std::string& name) {
  auto data = j.get<std::vector<std::vector<double>>>();
  if (data.size() != rows || (rows > 0 && data.front().size() != cols)) {
    throw Error(ErrorCode::kDimensionMismatch, name + " does not match the layer sizes");
  }
  if (rows == 0) return DenseMatrix(0, cols);
  return DenseMatrix::from_rows(data);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json optional_count(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void require_schema_version(const json& doc, std::string_view source) {
  if (!doc.is_object() || !doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersion,
                std::string(source) + ": expected schema_version " + std::to_string(kSchemaVersion));
  }
}

NetworkBundle make_bundle(const EntityStore& cleaned, const BuildOptions& options) {
  NetworkBundle bundle;
  bundle.network = build_network(cleaned, options);
  for (LayerId layer : kAllLayers) {
    bundle.profiles[layer_index(layer)] = layer_profile(cleaned, layer);
    if (bundle.network.layer(layer).size() == 0) {
      bundle.warnings.push_back(std::string(layer_name(layer)) + " layer is empty");
    }
  }
  bundle.provenance = cleaned.provenance;
  bundle.similarity = options.similarity;
  return bundle;
}

json bundle_to_json(const NetworkBundle& bundle) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["similarity"] = std::string(similarity_name(bundle.similarity));
  const auto& p = bundle.provenance;
  doc["provenance"] = {
      {"raw", {{"doctors", p.raw_doctors}, {"hospitals", p.raw_hospitals},
               {"departments", p.raw_departments}}},
      {"filtered",
       {{"doctors", optional_count(p.filtered_doctors)},
        {"hospitals", optional_count(p.filtered_hospitals)},
        {"departments", optional_count(p.filtered_departments)}}}};
  json layers = json::object();
  for (LayerId layer : kAllLayers) {
    const LayerGraph& g = bundle.network.layer(layer);
    const LayerProfile& profile = bundle.profiles[layer_index(layer)];
    json nodes = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
      json node = {{"id", g.node_ids[i]}, {"attributes", g.attributes[i]}};
      if (i < profile.ids.size()) {
        node["rating"] = optional_number(profile.ratings[i]);
        json features = json::object();
        for (const auto& [name, values] : profile.features) features[name] = values[i];
        node["features"] = features;
      }
      nodes.push_back(node);
    }
    layers[std::string(layer_name(layer))] = {{"nodes", nodes},
                                              {"parameter_universe", g.parameter_universe}};
  }
  doc["layers"] = layers;
  doc["blocks"] = {
      {"h", matrix_to_json(bundle.network.intra_block(LayerId::kHospital).weights)},
      {"d", matrix_to_json(bundle.network.intra_block(LayerId::kDepartment).weights)},
      {"p", matrix_to_json(bundle.network.intra_block(LayerId::kDoctor).weights)},
      {"hd", matrix_to_json(bundle.network.hospital_department.weights)},
      {"dp", matrix_to_json(bundle.network.department_doctor.weights)}};
  doc["warnings"] = bundle.warnings;
  return doc;
}

NetworkBundle bundle_from_json(const json& doc) {
  require_schema_version(doc, "network bundle");
  NetworkBundle bundle;
  try {
    auto sim = parse_similarity(doc.at("similarity").get<std::string>());
    if (!sim) throw Error(ErrorCode::kMalformedRow, "unknown similarity mode");
    bundle.similarity = *sim;
    const json& prov = doc.at("provenance");
    bundle.provenance.raw_doctors = prov.at("raw").at("doctors").get<std::size_t>();
    bundle.provenance.raw_hospitals = prov.at("raw").at("hospitals").get<std::size_t>();
    bundle.provenance.raw_departments = prov.at("raw").at("departments").get<std::size_t>();
    auto filtered = [&prov](const char* key) -> std::optional<std::size_t> {
      const json& v = prov.at("filtered").at(key);
      if (v.is_null()) return std::nullopt;
      return v.get<std::size_t>();
    };
    bundle.provenance.filtered_doctors = filtered("doctors");
    bundle.provenance.filtered_hospitals = filtered("hospitals");
    bundle.provenance.filtered_departments = filtered("departments");

    for (LayerId layer : kAllLayers) {
      const json& lj = doc.at("layers").at(std::string(layer_name(layer)));
      LayerGraph& g = bundle.network.layers[layer_index(layer)];
      LayerProfile& profile = bundle.profiles[layer_index(layer)];
      g.layer = layer;
      profile.layer = layer;
      g.parameter_universe = lj.at("parameter_universe").get<std::set<std::string>>();
      for (const json& node : lj.at("nodes")) {
        g.node_ids.push_back(node.at("id").get<std::string>());
        g.attributes.push_back(node.at("attributes").get<std::set<std::string>>());
        profile.ids.push_back(g.node_ids.back());
        const json& rating = node.value("rating", json(nullptr));
        profile.ratings.push_back(rating.is_null() ? std::nullopt
                                                   : std::optional(rating.get<double>()));
        if (node.contains("features")) {
          for (const auto& [name, value] : node["features"].items()) {
            profile.features[name].push_back(value.get<double>());
          }
        }
      }
    }
    const json& blocks = doc.at("blocks");
    const auto nh = bundle.network.layer(LayerId::kHospital).size();
    const auto nd = bundle.network.layer(LayerId::kDepartment).size();
    const auto np = bundle.network.layer(LayerId::kDoctor).size();
    bundle.network.intra[0] = {LayerId::kHospital, LayerId::kHospital,
                               matrix_from_json(blocks.at("h"), nh, nh, "A^[h]")};
    bundle.network.intra[1] = {LayerId::kDepartment, LayerId::kDepartment,
                               matrix_from_json(blocks.at("d"), nd, nd, "A^[d]")};
    bundle.network.intra[2] = {LayerId::kDoctor, LayerId::kDoctor,
                               matrix_from_json(blocks.at("p"), np, np, "A^[p]")};
    bundle.network.hospital_department = {LayerId::kHospital, LayerId::kDepartment,
                                          matrix_from_json(blocks.at("hd"), nh, nd, "A^[hd]")};
    bundle.network.department_doctor = {LayerId::kDepartment, LayerId::kDoctor,
                                        matrix_from_json(blocks.at("dp"), nd, np, "A^[dp]")};
    bundle.warnings = doc.value("warnings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRow, std::string("network bundle: ") + e.what());
  }
  for (const auto& profile : bundle.profiles) {
    for (const auto& [name, values] : profile.features) {
      if (values.size() != profile.ids.size()) {
        throw Error(ErrorCode::kMalformedRow, "network bundle: feature " + name + " is ragged");
      }
    }
  }
  const auto report = validate_network(bundle.network);
  if (!report.ok()) {
    throw Error(ErrorCode::kInvariantViolation, "network bundle: " + report.violations.front());
  }
  return bundle;
}

void write_bundle(const std::filesystem::path& path, const NetworkBundle& bundle) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << bundle_to_json(bundle).dump(2) << '\n';
}

NetworkBundle read_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": " + e.what());
  }
  return bundle_from_json(doc);
}

json trust_set_to_json(const TrustSet& trust, const MultiLayerNetwork& network) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json matrices = json::object();
  for (const TrustMatrix& m : trust.ordered()) {
    matrices[m.tag()] = {{"rows", network.layer(m.row_layer()).node_ids},
                         {"cols", network.layer(m.col_layer()).node_ids},
                         {"values", matrix_to_json(m.values())}};
  }
  doc["matrices"] = matrices;
  return doc;
}

}  // namespace mltrust
