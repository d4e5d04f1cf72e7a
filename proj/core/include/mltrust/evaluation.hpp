#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mltrust/model.hpp"

namespace mltrust {

struct ScoredId {
  std::string id;
  double score = 0.0;
};

// Spearman rank correlation with average ranks for ties. NaN when either
// side has no variance. Throws LengthMismatch, TooFewSamples.
double spearman(std::span<const double> a, std::span<const double> b);

// Kendall tau-b. NaN when either side is constant. Throws LengthMismatch,
// TooFewSamples.
double kendall(std::span<const double> a, std::span<const double> b);

struct TopKOverlap {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Overlap of the two top-k sets divided by k. Both sets have k members, so
// recall and F1 equal precision. Ranking is by descending score, ties by
// ascending id. Throws KTooLarge, IdUniverseMismatch.
TopKOverlap precision_at_k(std::span<const ScoredId> predicted, std::span<const ScoredId> truth,
                           std::size_t k);

// Ids of the k best entries under the ranking rule above.
std::vector<std::string> top_k_ids(std::span<const ScoredId> scored, std::size_t k);

struct ErrorSummary {
  double rmse = 0.0;
  double mae = 0.0;
};

ErrorSummary rmse_mae(std::span<const double> a, std::span<const double> b);

// Min-max rescales scores onto [min(ratings), max(ratings)]; a constant score
// vector maps to the midpoint of the rating range.
std::vector<double> normalize_scores_for_error(std::span<const double> scores,
                                               std::span<const double> ratings);

struct MetricsReport {
  LayerId layer = LayerId::kHospital;
  std::string baseline_name;
  std::string scenario;
  std::optional<std::size_t> k;
  double precision_at_k = 0.0;
  double recall_at_k = 0.0;
  double f1_at_k = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  // Absent with fewer than two samples or a constant side.
  std::optional<double> spearman;
  std::optional<double> kendall;
  std::size_t n = 0;
};

struct EvaluationInput {
  LayerId layer = LayerId::kHospital;
  std::string baseline_name;
  std::string scenario;
  std::vector<std::string> ids;
  std::vector<double> predicted;
  std::vector<double> truth;
  // Rescale predictions onto the truth range before RMSE/MAE.
  bool rescale_for_error = true;
};

// One report per k, plus a single k-less report when ks is empty. A k larger
// than the sample count is skipped; its value is appended to skipped_ks.
std::vector<MetricsReport> evaluate(const EvaluationInput& input, std::span<const std::size_t> ks,
                                    std::vector<std::size_t>* skipped_ks = nullptr);

}  // namespace mltrust
