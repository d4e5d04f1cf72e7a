#include "mltrust/stress.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include "mltrust/csv.hpp"
#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

constexpr int kEdgeDigits = 12;

std::pair<LayerId, LayerId> layers_of_tag(const std::string& tag) {
  auto bad = [&tag]() {
    return Error(ErrorCode::kOutOfShape, "unknown matrix tag '" + tag + "'");
  };
  if (tag.size() == 1) {
    auto layer = parse_layer(tag);
    if (!layer) throw bad();
    return {*layer, *layer};
  }
  if (tag.size() == 2) {
    auto rows = parse_layer(tag.substr(0, 1));
    auto cols = parse_layer(tag.substr(1, 1));
    if (!rows || !cols || *rows == *cols) throw bad();
    // Only adjacent layers are linked.
    if ((*rows == LayerId::kHospital && *cols == LayerId::kDoctor) ||
        (*rows == LayerId::kDoctor && *cols == LayerId::kHospital)) {
      throw bad();
    }
    return {*rows, *cols};
  }
  throw bad();
}

std::map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
  return out;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

NetworkShape NetworkShape::of(const MultiLayerNetwork& network) {
  NetworkShape shape;
  for (LayerId layer : kAllLayers) shape.ids[layer_index(layer)] = network.layer(layer).node_ids;
  return shape;
}

EdgeTable export_edge_table(std::span<const TrustMatrix> matrices, const NetworkShape& shape) {
  EdgeTable table;
  for (const TrustMatrix& m : matrices) {
    const auto& rows = shape.layer(m.row_layer());
    const auto& cols = shape.layer(m.col_layer());
    const DenseMatrix& v = m.values();
    if (v.rows() != rows.size() || v.cols() != cols.size()) {
      throw Error(ErrorCode::kOutOfShape, "tau^[" + m.tag() + "] does not match the network shape");
    }
    for (std::size_t i = 0; i < v.rows(); ++i) {
      for (std::size_t j = 0; j < v.cols(); ++j) {
        if (v(i, j) > 0.0) table.push_back({m.tag(), rows[i], cols[j], v(i, j)});
      }
    }
  }
  return table;
}

void GeneratorConfig::validate() const {
  if (const auto* d = std::get_if<DirichletPerturb>(&method)) {
    if (!(d->concentration > 0.0) || !std::isfinite(d->concentration)) {
      throw Error(ErrorCode::kInvalidConfig, "Dirichlet concentration must be positive");
    }
  }
}

std::string generator_description(const GeneratorMethod& method) {
  return std::visit(Overloaded{
                        [](const IdentityGenerator&) { return std::string("identity"); },
                        [](const DirichletPerturb& d) {
                          return "dirichlet(" + format_double(d.concentration) + ")";
                        },
                        [](const BootstrapGenerator&) { return std::string("bootstrap"); },
                    },
                    method);
}

EdgeTable generate_synthetic(const EdgeTable& table, const GeneratorConfig& config) {
  config.validate();
  if (table.empty()) throw Error(ErrorCode::kEmptyTable, "cannot regenerate an empty edge table");
  EdgeTable out = table;
  std::mt19937_64 rng(config.seed);
  std::visit(
      Overloaded{
          [](const IdentityGenerator&) {},
          [&](const DirichletPerturb& d) {
            // Rows in first-appearance order, cells in record order.
            std::vector<std::vector<std::size_t>> rows;
            std::map<std::pair<std::string, std::string>, std::size_t> row_of;
            for (std::size_t i = 0; i < table.size(); ++i) {
              auto [it, fresh] = row_of.try_emplace({table[i].layer_tag, table[i].src}, rows.size());
              if (fresh) rows.emplace_back();
              rows[it->second].push_back(i);
            }
            for (const auto& row : rows) {
              double sum = 0.0;
              for (std::size_t i : row) sum += table[i].trust;
              std::vector<double> draws;
              double total = 0.0;
              for (std::size_t i : row) {
                const double shape = d.concentration * table[i].trust / sum;
                double g = std::gamma_distribution<double>(shape, 1.0)(rng);
                // A vanishing draw would delete the edge; keep the support.
                g = std::max(g, std::numeric_limits<double>::min());
                draws.push_back(g);
                total += g;
              }
              for (std::size_t t = 0; t < row.size(); ++t) out[row[t]].trust = draws[t] / total;
            }
          },
          [&](const BootstrapGenerator&) {
            std::map<std::string, std::vector<double>> pools;
            for (const auto& r : table) pools[r.layer_tag].push_back(r.trust);
            for (auto& r : out) {
              const auto& pool = pools[r.layer_tag];
              std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
              r.trust = pool[pick(rng)];
            }
          },
      },
      config.method);
  return out;
}

RebuildResult rebuild_trust(const EdgeTable& table, const NetworkShape& shape,
                            const std::vector<std::string>& tags) {
  RebuildResult result;
  std::map<std::string, DenseMatrix> raw;
  std::map<std::string, std::pair<LayerId, LayerId>> layers;
  for (const auto& tag : tags) {
    const auto lr = layers_of_tag(tag);
    layers.emplace(tag, lr);
    raw.emplace(tag, DenseMatrix(shape.layer(lr.first).size(), shape.layer(lr.second).size()));
  }
  std::array<std::map<std::string, std::size_t>, 3> index;
  for (LayerId layer : kAllLayers) index[layer_index(layer)] = index_ids(shape.layer(layer));
  std::map<std::string, std::vector<bool>> seen;

  for (const auto& rec : table) {
    const auto [rows, cols] = layers_of_tag(rec.layer_tag);
    auto m = raw.find(rec.layer_tag);
    if (m == raw.end()) continue;  // tag not requested
    const auto& ri = index[layer_index(rows)];
    const auto& ci = index[layer_index(cols)];
    auto src = ri.find(rec.src);
    auto dst = ci.find(rec.dst);
    if (src == ri.end() || dst == ci.end()) {
      throw Error(ErrorCode::kOutOfShape, "record (" + rec.layer_tag + ", " + rec.src + ", " +
                                              rec.dst + ") is outside the network shape");
    }
    if (!std::isfinite(rec.trust) || rec.trust <= 0.0) {
      ++result.report.dropped_nonpositive;
      continue;
    }
    if (rows == cols && src->second == dst->second) {
      ++result.report.dropped_diagonal;
      continue;
    }
    auto& flags = seen[rec.layer_tag];
    if (flags.empty()) flags.assign(m->second.rows() * m->second.cols(), false);
    const std::size_t cell = src->second * m->second.cols() + dst->second;
    if (flags[cell]) ++result.report.merged_duplicates;
    flags[cell] = true;
    m->second(src->second, dst->second) += rec.trust;
  }

  for (auto& [tag, weights] : raw) {
    for (std::size_t i = 0; i < weights.rows(); ++i) {
      auto row = weights.row(i);
      double sum = 0.0;
      for (double w : row) sum += w;
      if (sum == 0.0) continue;
      for (double& w : row) w /= sum;
    }
    const auto [rows, cols] = layers.at(tag);
    result.matrices.insert(TrustMatrix(rows, cols, std::move(weights)));
  }
  return result;
}

std::vector<MetricsReport> stress_compare(const std::array<ScoreVector, 3>& true_scores,
                                          const std::array<ScoreVector, 3>& synth_scores,
                                          const NetworkShape& shape,
                                          std::span<const std::size_t> ks) {
  std::vector<MetricsReport> reports;
  for (LayerId layer : kAllLayers) {
    const auto& t = true_scores[layer_index(layer)];
    const auto& s = synth_scores[layer_index(layer)];
    if (t.size() != s.size() || t.size() != shape.layer(layer).size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  std::string(layer_name(layer)) + " score vectors are not aligned");
    }
    if (t.size() == 0) continue;
    EvaluationInput input;
    input.layer = layer;
    input.baseline_name = "synthetic";
    input.ids = shape.layer(layer);
    input.predicted = s.values();
    input.truth = t.values();
    input.rescale_for_error = false;
    auto layer_reports = evaluate(input, ks);
    reports.insert(reports.end(), layer_reports.begin(), layer_reports.end());
  }
  return reports;
}

std::array<ScoreVector, 3> final_scores(const std::array<LayerScore, 3>& scores) {
  return {scores[0].result.scores, scores[1].result.scores, scores[2].result.scores};
}

StressRun run_stress(const TrustSet& trust, const NetworkShape& shape,
                     const std::array<LayerScore, 3>& reference, const ScoringOptions& options,
                     const GeneratorConfig& generator, std::span<const std::size_t> ks) {
  const auto ordered = trust.ordered();
  const EdgeTable exported = export_edge_table(ordered, shape);
  EdgeTable synthetic = generate_synthetic(exported, generator);
  RebuildResult rebuilt = rebuild_trust(synthetic, shape);
  const std::array<ScoreVector, 3> residuals = {reference[0].residual, reference[1].residual,
                                                reference[2].residual};
  auto rescored = score_network(rebuilt.matrices, residuals, options);
  auto synth = final_scores(rescored);
  auto metrics = stress_compare(final_scores(reference), synth, shape, ks);
  return StressRun{generator.seed,         std::move(synthetic),     rebuilt.report,
                   std::move(rebuilt.matrices), std::move(synth), std::move(metrics)};
}

void write_edge_table(std::ostream& out, const EdgeTable& table) {
  write_schema_preamble(out);
  write_csv_row(out, {"layer", "src", "dst", "trust"});
  for (const auto& r : table) {
    write_csv_row(out, {r.layer_tag, r.src, r.dst, format_double(r.trust, kEdgeDigits)});
  }
}

EdgeTable read_edge_table(std::istream& in, std::string_view source) {
  const CsvTable csv = read_csv(in, source);
  const std::size_t layer = csv.column("layer", source);
  const std::size_t src = csv.column("src", source);
  const std::size_t dst = csv.column("dst", source);
  const std::size_t trust = csv.column("trust", source);
  EdgeTable table;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    auto value = parse_double(row[trust]);
    if (!value) {
      throw Error(ErrorCode::kMalformedRow, std::string(source) + ":" +
                                                std::to_string(csv.line_numbers[r]) +
                                                ": trust is not a number");
    }
    table.push_back({std::string(trim(row[layer])), std::string(trim(row[src])),
                     std::string(trim(row[dst])), *value});
  }
  return table;
}

}  // namespace mltrust
