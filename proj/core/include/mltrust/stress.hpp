#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mltrust/evaluation.hpp"
#include "mltrust/model.hpp"
#include "mltrust/social_score.hpp"
#include "mltrust/trust.hpp"

namespace mltrust {

// One strictly positive trust cell. layer_tag names the matrix (h, d, p, hd,
// dh, dp, pd).
struct EdgeRecord {
  std::string layer_tag;
  std::string src;
  std::string dst;
  double trust = 0.0;

  bool operator==(const EdgeRecord&) const = default;
};

using EdgeTable = std::vector<EdgeRecord>;

// Canonical node ids per layer; labels the rows and columns of every matrix.
struct NetworkShape {
  std::array<std::vector<std::string>, 3> ids;

  static NetworkShape of(const MultiLayerNetwork& network);
  const std::vector<std::string>& layer(LayerId id) const { return ids[layer_index(id)]; }
};

EdgeTable export_edge_table(std::span<const TrustMatrix> matrices, const NetworkShape& shape);

struct IdentityGenerator {};
// Each source row is redrawn from Dirichlet(concentration * row values).
struct DirichletPerturb {
  double concentration = 1.0;
};
// Trust values are resampled with replacement within each layer tag.
struct BootstrapGenerator {};

using GeneratorMethod = std::variant<IdentityGenerator, DirichletPerturb, BootstrapGenerator>;

struct GeneratorConfig {
  GeneratorMethod method = IdentityGenerator{};
  std::uint64_t seed = 0;

  void validate() const;
};

std::string generator_description(const GeneratorMethod& method);

// Keeps the (tag, src, dst) support of the input. Throws EmptyTable.
EdgeTable generate_synthetic(const EdgeTable& table, const GeneratorConfig& config);

struct RebuildReport {
  std::size_t dropped_diagonal = 0;
  std::size_t dropped_nonpositive = 0;
  std::size_t merged_duplicates = 0;
};

struct RebuildResult {
  TrustSet matrices;
  RebuildReport report;
};

// Pivots records back into row-stochastic matrices. Every requested tag gets
// a matrix, all-zero when it has no records. Intra-layer diagonal records are
// dropped and counted. Throws OutOfShape for unknown tags or ids.
RebuildResult rebuild_trust(const EdgeTable& table, const NetworkShape& shape,
                            const std::vector<std::string>& tags = TrustSet::canonical_tags());

// Per-layer metrics with the true scores as ground truth; one report per
// valid k. Raw scores are compared directly (no rescaling).
std::vector<MetricsReport> stress_compare(const std::array<ScoreVector, 3>& true_scores,
                                          const std::array<ScoreVector, 3>& synth_scores,
                                          const NetworkShape& shape,
                                          std::span<const std::size_t> ks);

struct StressRun {
  std::uint64_t seed = 0;
  EdgeTable synthetic;
  RebuildReport rebuild;
  TrustSet synthetic_trust;
  std::array<ScoreVector, 3> synthetic_scores;
  std::vector<MetricsReport> metrics;
};

// export -> generate -> rebuild -> rescore -> compare. Rescoring reuses the
// residual vectors of the reference run.
StressRun run_stress(const TrustSet& trust, const NetworkShape& shape,
                     const std::array<LayerScore, 3>& reference, const ScoringOptions& options,
                     const GeneratorConfig& generator, std::span<const std::size_t> ks);

std::array<ScoreVector, 3> final_scores(const std::array<LayerScore, 3>& scores);

void write_edge_table(std::ostream& out, const EdgeTable& table);
EdgeTable read_edge_table(std::istream& in, std::string_view source = "edge table");

}  // namespace mltrust
