#include "mltrust_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mltrust/errors.hpp"

namespace mltrust::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, "config: " + what);
}

void allow_keys(const json& obj, const std::string& where, std::set<std::string> keys) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) bad("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

ResidualDistribution parse_residual(const json& j, const std::string& where) {
  allow_keys(j, where, {"distribution", "value", "lo", "hi", "mean", "stdev", "alpha", "beta",
                        "seed"});
  const auto name = get<std::string>(j, "distribution", where, "constant");
  if (name == "constant") return ConstantResidual{get(j, "value", where, ConstantResidual{}.value)};
  if (name == "uniform") {
    UniformResidual d;
    return UniformResidual{get(j, "lo", where, d.lo), get(j, "hi", where, d.hi)};
  }
  if (name == "normal") {
    NormalResidual d;
    return NormalResidual{get(j, "mean", where, d.mean), get(j, "stdev", where, d.stdev)};
  }
  if (name == "skewed") {
    SkewedResidual d;
    return SkewedResidual{get(j, "alpha", where, d.alpha), get(j, "beta", where, d.beta)};
  }
  bad(where + ".distribution '" + name + "' is not constant, uniform, normal or skewed");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::array<ResidualConfig, 3> scenario_residuals(const RunConfig& config,
                                                 const ResidualDistribution& distribution) {
  std::array<ResidualConfig, 3> out;
  for (LayerId layer : kAllLayers) {
    out[layer_index(layer)] = {distribution, config.seed + layer_index(layer)};
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  allow_keys(doc, "config",
             {"inputs", "similarity", "equipment_priorities", "residuals", "department_feed",
              "convergence", "damping", "evaluation", "generator", "seeds", "seed",
              "output_dir"});
  RunConfig config;
  config.seed = get<std::uint64_t>(doc, "seed", "config", 0);

  const json inputs = doc.value("inputs", json::object());
  allow_keys(inputs, "inputs", {"doctors", "hospitals", "departments"});
  config.doctors = resolve(base_dir, get<std::string>(inputs, "doctors", "inputs", "doctors.csv"));
  config.hospitals =
      resolve(base_dir, get<std::string>(inputs, "hospitals", "inputs", "hospitals.csv"));
  config.departments =
      resolve(base_dir, get<std::string>(inputs, "departments", "inputs", "departments.csv"));

  const auto similarity = get<std::string>(doc, "similarity", "config", "intersection");
  const auto mode = parse_similarity(similarity);
  if (!mode) bad("similarity '" + similarity + "' is not intersection or jaccard");
  config.build.similarity = *mode;

  if (doc.contains("equipment_priorities")) {
    const json& list = doc["equipment_priorities"];
    if (!list.is_array()) bad("equipment_priorities must be a list");
    for (const json& e : list) {
      allow_keys(e, "equipment_priorities entry", {"hospital", "department", "priorities"});
      const auto h = get<std::string>(e, "hospital", "equipment_priorities", "");
      const auto d = get<std::string>(e, "department", "equipment_priorities", "");
      if (h.empty() || d.empty()) bad("equipment_priorities entries need hospital and department");
      const auto p = get<std::vector<double>>(e, "priorities", "equipment_priorities", {});
      for (double v : p) {
        if (v < 0.0) {
          throw Error(ErrorCode::kNegativePriority,
                      "config: negative equipment priority for " + h + "/" + d);
        }
      }
      config.build.equipment[{h, d}] = p;
    }
  }

  const json residuals = doc.value("residuals", json::object());
  allow_keys(residuals, "residuals", {"hospital", "department", "doctor"});
  for (LayerId layer : kAllLayers) {
    const std::string name(layer_name(layer));
    auto& rc = config.scoring.residuals[layer_index(layer)];
    rc.seed = config.seed + layer_index(layer);
    if (residuals.contains(name)) {
      rc.distribution = parse_residual(residuals[name], "residuals." + name);
      rc.seed = get<std::uint64_t>(residuals[name], "seed", "residuals." + name, rc.seed);
    }
    rc.validate();
  }

  const auto feed = get<std::string>(doc, "department_feed", "config", "hospital");
  if (feed == "hospital") {
    config.scoring.department_feed = DepartmentFeed::kHospital;
  } else if (feed == "doctor") {
    config.scoring.department_feed = DepartmentFeed::kDoctor;
  } else {
    bad("department_feed '" + feed + "' is not hospital or doctor");
  }

  const json conv = doc.value("convergence", json::object());
  allow_keys(conv, "convergence", {"epsilon", "max_iterations", "norm"});
  auto& cc = config.scoring.convergence;
  cc.epsilon = get(conv, "epsilon", "convergence", cc.epsilon);
  cc.max_iterations = get<std::size_t>(conv, "max_iterations", "convergence", cc.max_iterations);
  const auto norm = get<std::string>(conv, "norm", "convergence", "max_abs");
  if (norm == "max_abs") {
    cc.norm = ConvergenceNorm::kMaxAbs;
  } else if (norm == "l1") {
    cc.norm = ConvergenceNorm::kL1;
  } else {
    bad("convergence.norm '" + norm + "' is not max_abs or l1");
  }
  cc.damping = get(doc, "damping", "config", cc.damping);
  cc.validate();

  const json eval = doc.value("evaluation", json::object());
  allow_keys(eval, "evaluation", {"ks", "baselines", "scenarios", "scores"});
  config.ks = get(eval, "ks", "evaluation", config.ks);
  for (auto k : config.ks) {
    if (k == 0) bad("evaluation.ks entries must be >= 1");
  }
  config.baselines = get(eval, "baselines", "evaluation", config.baselines);
  config.scenarios = get(eval, "scenarios", "evaluation", config.scenarios);
  for (const auto& s : config.scenarios) {
    if (!residual_scenario(s)) bad("unknown evaluation scenario '" + s + "'");
  }
  if (eval.contains("scores")) {
    config.eval_scores = resolve(base_dir, get<std::string>(eval, "scores", "evaluation", ""));
  }

  const json gen = doc.value("generator", json::object());
  allow_keys(gen, "generator", {"method", "concentration"});
  const auto method = get<std::string>(gen, "method", "generator", "identity");
  if (method == "identity") {
    config.generator = IdentityGenerator{};
  } else if (method == "dirichlet") {
    config.generator = DirichletPerturb{get(gen, "concentration", "generator", 1.0)};
  } else if (method == "bootstrap") {
    config.generator = BootstrapGenerator{};
  } else {
    bad("generator.method '" + method + "' is not identity, dirichlet or bootstrap");
  }
  GeneratorConfig{config.generator, 0}.validate();

  config.seeds = get(doc, "seeds", "config", std::vector<std::uint64_t>{config.seed});
  config.output_dir = resolve(base_dir, get<std::string>(doc, "output_dir", "config", "out"));

  if (overrides.seed) {
    const auto delta = *overrides.seed;
    config.seed = delta;
    config.seeds = {delta};
    for (LayerId layer : kAllLayers) {
      config.scoring.residuals[layer_index(layer)].seed = delta + layer_index(layer);
    }
  }
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path(), overrides);
}

}  // namespace mltrust::cli
