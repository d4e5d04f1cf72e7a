#include "mltrust_cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mltrust/bundle.hpp"
#include "mltrust/csv.hpp"
#include "mltrust/evaluation.hpp"
#include "mltrust/ingestion.hpp"
#include "mltrust/stress.hpp"
#include "mltrust/trust.hpp"

namespace mltrust::cli {
namespace {

using nlohmann::json;

constexpr int kValueDigits = 12;

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
  return config.output_dir / name;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

void prepare_output_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create output directory " + config.output_dir.string() + ": " +
                    ec.message());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": " + e.what());
  }
  require_schema_version(doc, path.string());
  return doc;
}

NetworkBundle load_bundle(const RunConfig& config) {
  const auto path = out_path(config, kNetworkFile);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIoError, "missing " + path.string() + " (run build first)");
  }
  return read_bundle(path);
}

std::string num(double v) { return format_double(v, kValueDigits); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const MetricsReport& r) {
  return {{"layer", std::string(layer_name(r.layer))},
          {"baseline", r.baseline_name},
          {"scenario", r.scenario},
          {"k", r.k ? json(*r.k) : json(nullptr)},
          {"precision_at_k", r.k ? json(r.precision_at_k) : json(nullptr)},
          {"recall_at_k", r.k ? json(r.recall_at_k) : json(nullptr)},
          {"f1_at_k", r.k ? json(r.f1_at_k) : json(nullptr)},
          {"rmse", r.rmse},
          {"mae", r.mae},
          {"spearman", opt_json(r.spearman)},
          {"kendall", opt_json(r.kendall)},
          {"n", r.n}};
}

const std::vector<std::string> kMetricsHeader = {
    "layer", "baseline", "scenario", "k",        "precision_at_k", "recall_at_k",
    "f1_at_k", "rmse",   "mae",      "spearman", "kendall",        "n"};

std::vector<std::string> metrics_row(const MetricsReport& r) {
  const bool has_k = r.k.has_value();
  return {std::string(layer_name(r.layer)),
          r.baseline_name,
          r.scenario,
          has_k ? std::to_string(*r.k) : "",
          has_k ? num(r.precision_at_k) : "",
          has_k ? num(r.recall_at_k) : "",
          has_k ? num(r.f1_at_k) : "",
          num(r.rmse),
          num(r.mae),
          opt_num(r.spearman),
          opt_num(r.kendall),
          std::to_string(r.n)};
}

void warn(std::ostream& log, const std::string& message) { log << "warning: " << message << '\n'; }

std::array<LayerScore, 3> score_bundle(const TrustSet& trust, const ScoringOptions& options,
                                       std::ostream& log) {
  auto scores = score_network(trust, options);
  for (const auto& s : scores) {
    if (s.result.scores.size() > 0 && !s.result.converged) {
      warn(log, std::string(layer_name(s.layer)) + " scores did not converge within " +
                    std::to_string(s.result.iterations) + " iterations");
    }
  }
  return scores;
}

// Evaluates one predicted vector against the layer's ratings. Unrated
// entities are left out.
void evaluate_layer(const LayerProfile& profile, const std::string& baseline,
                    const std::string& scenario, const std::vector<double>& predicted,
                    const RunConfig& config, std::vector<MetricsReport>& rows, std::ostream& log) {
  EvaluationInput input;
  input.layer = profile.layer;
  input.baseline_name = baseline;
  input.scenario = scenario;
  for (std::size_t i = 0; i < profile.ids.size(); ++i) {
    if (!profile.ratings[i]) continue;
    input.ids.push_back(profile.ids[i]);
    input.truth.push_back(*profile.ratings[i]);
    input.predicted.push_back(predicted[i]);
  }
  const std::string layer(layer_name(profile.layer));
  if (input.ids.empty()) {
    warn(log, layer + " layer has no rated entities; " + baseline + " skipped");
    return;
  }
  std::vector<std::size_t> skipped;
  auto reports = evaluate(input, config.ks, &skipped);
  for (auto k : skipped) {
    warn(log, "k=" + std::to_string(k) + " exceeds " + layer + " size " +
                  std::to_string(input.ids.size()) + "; row omitted for " + baseline + "/" +
                  scenario);
  }
  rows.insert(rows.end(), reports.begin(), reports.end());
}

// Final scores keyed by (layer, entity id) from a scores.csv file.
std::map<std::pair<std::string, std::string>, double> read_scores(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const auto source = path.string();
  const auto table = read_csv(in, source);
  const auto layer = table.column("layer", source);
  const auto id = table.column("entity_id", source);
  const auto final_col = table.column("final", source);
  std::map<std::pair<std::string, std::string>, double> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto value = parse_double(table.rows[r][final_col]);
    if (!value) {
      throw Error(ErrorCode::kMalformedRow,
                  source + ":" + std::to_string(table.line_numbers[r]) + ": bad final score");
    }
    out[{std::string(trim(table.rows[r][layer])), std::string(trim(table.rows[r][id]))}] = *value;
  }
  return out;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kNegativePriority:
      return kExitConfigError;
    default:
      return kExitInputError;
  }
}

void cmd_build(const RunConfig& config, std::ostream& log) {
  const auto store = clean(parse_store(config.doctors, config.hospitals, config.departments));
  const auto bundle = make_bundle(store, config.build);
  for (const auto& w : bundle.warnings) warn(log, w);
  const auto report = validate_network(bundle.network);
  if (!report.ok()) throw Error(ErrorCode::kInvariantViolation, report.violations.front());
  prepare_output_dir(config);
  write_bundle(out_path(config, kNetworkFile), bundle);
}

void cmd_trust(const RunConfig& config, std::ostream&) {
  const auto bundle = load_bundle(config);
  const auto trust = derive_all_trust(bundle.network);
  prepare_output_dir(config);
  write_json(out_path(config, kTrustFile), trust_set_to_json(trust, bundle.network));

  auto edges = open_output(out_path(config, kEdgesFile));
  write_edge_table(edges, export_edge_table(trust.ordered(), NetworkShape::of(bundle.network)));

  auto hist = open_output(out_path(config, kHistogramFile));
  write_schema_preamble(hist);
  write_csv_row(hist, {"matrix", "value"});
  for (const auto& m : trust.ordered()) {
    for (double v : nonzero_trust_values(m)) write_csv_row(hist, {m.tag(), num(v)});
  }
}

void cmd_score(const RunConfig& config, std::ostream& log) {
  const auto bundle = load_bundle(config);
  const auto trust = derive_all_trust(bundle.network);
  const auto scores = score_bundle(trust, config.scoring, log);
  prepare_output_dir(config);

  auto out = open_output(out_path(config, kScoresFile));
  write_schema_preamble(out);
  write_csv_row(out, {"layer", "entity_id", "residual", "initial", "final", "iterations",
                      "converged"});
  auto trace = open_output(out_path(config, kConvergenceFile));
  write_schema_preamble(trace);
  write_csv_row(trace, {"layer", "iteration", "delta"});
  for (const auto& s : scores) {
    const std::string layer(layer_name(s.layer));
    const auto& ids = bundle.network.layer(s.layer).node_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      write_csv_row(out, {layer, ids[i], format_double(s.residual[i]),
                          format_double(s.initial[i]), format_double(s.result.scores[i]),
                          std::to_string(s.result.iterations),
                          s.result.converged ? "true" : "false"});
    }
    for (std::size_t it = 0; it < s.result.deltas.size(); ++it) {
      write_csv_row(trace, {layer, std::to_string(it + 1), format_double(s.result.deltas[it])});
    }
  }
}

void cmd_eval(const RunConfig& config, std::ostream& log) {
  const auto bundle = load_bundle(config);
  const auto trust = derive_all_trust(bundle.network);
  std::vector<MetricsReport> rows;

  for (const auto& baseline : config.baselines) {
    if (baseline == "social_score") continue;
    bool found = false;
    for (const auto& profile : bundle.profiles) found |= profile.features.contains(baseline);
    if (!found) {
      throw Error(ErrorCode::kInvalidConfig, "config: unknown baseline '" + baseline + "'");
    }
  }
  const bool social =
      std::find(config.baselines.begin(), config.baselines.end(), "social_score") !=
      config.baselines.end();

  if (social && config.eval_scores) {
    const auto provided = read_scores(*config.eval_scores);
    for (const auto& profile : bundle.profiles) {
      if (profile.ids.empty()) continue;
      std::vector<double> predicted;
      for (const auto& id : profile.ids) {
        auto it = provided.find({std::string(layer_name(profile.layer)), id});
        if (it == provided.end()) {
          throw Error(ErrorCode::kMalformedRow, config.eval_scores->string() + ": no score for " +
                                                    std::string(layer_name(profile.layer)) +
                                                    " " + id);
        }
        predicted.push_back(it->second);
      }
      evaluate_layer(profile, "social_score", "provided", predicted, config, rows, log);
    }
  } else if (social) {
    for (const auto& scenario : config.scenarios) {
      ScoringOptions options = config.scoring;
      options.residuals = scenario_residuals(config, *residual_scenario(scenario));
      const auto scores = score_bundle(trust, options, log);
      for (const auto& profile : bundle.profiles) {
        if (profile.ids.empty()) continue;
        evaluate_layer(profile, "social_score", scenario,
                       scores[layer_index(profile.layer)].result.scores.values(), config, rows,
                       log);
      }
    }
  }
  for (const auto& baseline : config.baselines) {
    if (baseline == "social_score") continue;
    for (const auto& profile : bundle.profiles) {
      auto it = profile.features.find(baseline);
      if (it == profile.features.end() || profile.ids.empty()) continue;
      evaluate_layer(profile, baseline, "none", it->second, config, rows, log);
    }
  }

  prepare_output_dir(config);
  auto csv = open_output(out_path(config, kMetricsCsvFile));
  write_schema_preamble(csv);
  write_csv_row(csv, kMetricsHeader);
  json list = json::array();
  for (const auto& r : rows) {
    write_csv_row(csv, metrics_row(r));
    list.push_back(metrics_json(r));
  }
  write_json(out_path(config, kMetricsJsonFile), {{"schema_version", kSchemaVersion}, {"rows", list}});
}

void cmd_stress(const RunConfig& config, std::ostream& log) {
  const auto bundle = load_bundle(config);
  const auto trust = derive_all_trust(bundle.network);
  const auto shape = NetworkShape::of(bundle.network);
  const auto reference = score_bundle(trust, config.scoring, log);
  const auto truth = final_scores(reference);
  const auto exported = export_edge_table(trust.ordered(), shape);
  prepare_output_dir(config);

  json report = {{"schema_version", kSchemaVersion},
                 {"generator", generator_description(config.generator)},
                 {"sections", json::array()}};
  auto pairs = open_output(out_path(config, kStressPairsFile));
  write_schema_preamble(pairs);
  write_csv_row(pairs, {"seed", "matrix", "src", "dst", "true_trust", "synthetic_trust"});
  auto score_pairs = open_output(out_path(config, kStressScoresFile));
  write_schema_preamble(score_pairs);
  write_csv_row(score_pairs, {"seed", "layer", "entity_id", "true_score", "synthetic_score"});

  if (exported.empty()) {
    warn(log, "network has no trust edges; stress test skipped");
    write_json(out_path(config, kStressReportFile), report);
    return;
  }
  for (auto seed : config.seeds) {
    const auto run =
        run_stress(trust, shape, reference, config.scoring, {config.generator, seed}, config.ks);
    const std::string edges_name = "synthetic_edges_seed" + std::to_string(seed) + ".csv";
    auto edges = open_output(out_path(config, edges_name));
    write_edge_table(edges, run.synthetic);

    for (std::size_t i = 0; i < exported.size(); ++i) {
      const auto& e = exported[i];
      write_csv_row(pairs, {std::to_string(seed), e.layer_tag, e.src, e.dst, num(e.trust),
                            num(run.synthetic[i].trust)});
    }
    for (LayerId layer : kAllLayers) {
      const auto& ids = shape.layer(layer);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        write_csv_row(score_pairs,
                      {std::to_string(seed), std::string(layer_name(layer)), ids[i],
                       format_double(truth[layer_index(layer)][i]),
                       format_double(run.synthetic_scores[layer_index(layer)][i])});
      }
    }
    json metrics = json::array();
    for (const auto& m : run.metrics) metrics.push_back(metrics_json(m));
    report["sections"].push_back({{"seed", seed},
                                  {"synthetic_edges", edges_name},
                                  {"dropped_diagonal", run.rebuild.dropped_diagonal},
                                  {"dropped_nonpositive", run.rebuild.dropped_nonpositive},
                                  {"merged_duplicates", run.rebuild.merged_duplicates},
                                  {"metrics", metrics}});
  }
  write_json(out_path(config, kStressReportFile), report);
}

void cmd_report(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const auto bundle = load_bundle(config);
  json summary = {{"schema_version", kSchemaVersion}};
  json layers = json::object();
  for (LayerId layer : kAllLayers) {
    layers[std::string(layer_name(layer))] = bundle.network.layer(layer).size();
  }
  summary["layers"] = layers;
  out << "layers:";
  for (LayerId layer : kAllLayers) {
    out << ' ' << layer_name(layer) << '=' << bundle.network.layer(layer).size();
  }
  out << '\n';

  const auto scores_path = out_path(config, kScoresFile);
  if (std::filesystem::exists(scores_path)) {
    std::ifstream in(scores_path, std::ios::binary);
    const auto table = read_csv(in, scores_path.string());
    const auto layer = table.column("layer", scores_path.string());
    const auto iterations = table.column("iterations", scores_path.string());
    const auto converged = table.column("converged", scores_path.string());
    json by_layer = json::object();
    for (const auto& row : table.rows) {
      by_layer[row[layer]] = {{"iterations", *parse_integer(row[iterations])},
                              {"converged", row[converged] == "true"}};
    }
    summary["scores"] = by_layer;
    for (const auto& [name, info] : by_layer.items()) {
      out << "scores " << name << ": " << info["iterations"] << " iterations, "
          << (info["converged"].get<bool>() ? "converged" : "not converged") << '\n';
    }
  } else {
    warn(log, "no " + std::string(kScoresFile) + "; run score");
  }

  const auto metrics_path = out_path(config, kMetricsJsonFile);
  if (std::filesystem::exists(metrics_path)) {
    const auto doc = read_json(metrics_path);
    // Mean Spearman per (layer, baseline) over scenarios and ks.
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> means;
    for (const auto& row : doc["rows"]) {
      if (row["spearman"].is_null()) continue;
      auto& acc = means[{row["layer"].get<std::string>(), row["baseline"].get<std::string>()}];
      acc.first += row["spearman"].get<double>();
      acc.second += 1;
    }
    json mean_json = json::array();
    for (const auto& [key, acc] : means) {
      const double mean = acc.first / acc.second;
      mean_json.push_back({{"layer", key.first}, {"baseline", key.second}, {"mean_spearman", mean}});
      out << "spearman " << key.first << '/' << key.second << ": " << num(mean) << '\n';
    }
    summary["metrics"] = {{"rows", doc["rows"].size()}, {"mean_spearman", mean_json}};
  } else {
    warn(log, "no " + std::string(kMetricsJsonFile) + "; run eval");
  }

  const auto stress_path = out_path(config, kStressReportFile);
  if (std::filesystem::exists(stress_path)) {
    const auto doc = read_json(stress_path);
    std::map<std::string, double> worst;
    for (const auto& section : doc["sections"]) {
      for (const auto& m : section["metrics"]) {
        if (m["spearman"].is_null()) continue;
        const auto name = m["layer"].get<std::string>();
        const double v = m["spearman"].get<double>();
        auto [it, fresh] = worst.try_emplace(name, v);
        if (!fresh) it->second = std::min(it->second, v);
      }
    }
    summary["stress"] = {{"generator", doc["generator"]},
                         {"sections", doc["sections"].size()},
                         {"min_spearman", worst}};
    out << "stress " << doc["generator"].get<std::string>() << ": " << doc["sections"].size()
        << " seeds";
    for (const auto& [name, v] : worst) out << ", " << name << " min spearman " << num(v);
    out << '\n';
  } else {
    warn(log, "no " + std::string(kStressReportFile) + "; run stress");
  }
  prepare_output_dir(config);
  write_json(out_path(config, kReportFile), summary);
}

}  // namespace mltrust::cli
