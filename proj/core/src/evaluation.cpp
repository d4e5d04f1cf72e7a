#include "mltrust/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_size) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "vectors have lengths " + std::to_string(a.size()) +
                                                " and " + std::to_string(b.size()));
  }
  if (a.size() < min_size) {
    throw Error(ErrorCode::kTooFewSamples, "need at least " + std::to_string(min_size) +
                                               " samples, got " + std::to_string(a.size()));
  }
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&v](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Number of tied pairs within runs of equal values of a sorted sequence.
template <typename It, typename Eq>
double tied_pairs(It first, It last, Eq eq) {
  double total = 0.0;
  while (first != last) {
    It run = first;
    double len = 0.0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++len;
    }
    total += len * (len - 1.0) / 2.0;
    first = run;
  }
  return total;
}

// Merge sort counting inversions.
double sort_counting_swaps(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo < 2) return 0.0;
  const std::size_t mid = lo + (hi - lo) / 2;
  double swaps = sort_counting_swaps(v, scratch, lo, mid) + sort_counting_swaps(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, out = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<double>(mid - i);
      scratch[out++] = v[j++];
    } else {
      scratch[out++] = v[i++];
    }
  }
  while (i < mid) scratch[out++] = v[i++];
  while (j < hi) scratch[out++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::vector<const ScoredId*> ranked(std::span<const ScoredId> scored) {
  std::vector<const ScoredId*> order;
  order.reserve(scored.size());
  for (const auto& s : scored) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const ScoredId* x, const ScoredId* y) {
    if (x->score != y->score) return x->score > y->score;
    return x->id < y->id;
  });
  return order;
}

std::optional<double> defined(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, 2);
  return pearson(average_ranks(a), average_ranks(b));
}

// Knight's O(n log n) tau-b: sort by (a, b), count ties, then count the
// inversions left in b.
double kendall(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, 2);
  const std::size_t n = a.size();
  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {a[i], b[i]};
  std::sort(pairs.begin(), pairs.end());

  const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double ties_a = tied_pairs(pairs.begin(), pairs.end(),
                                   [](const auto& x, const auto& y) { return x.first == y.first; });
  const double ties_ab = tied_pairs(pairs.begin(), pairs.end(),
                                    [](const auto& x, const auto& y) { return x == y; });

  std::vector<double> bs(n);
  for (std::size_t i = 0; i < n; ++i) bs[i] = pairs[i].second;
  std::vector<double> scratch(n);
  const double swaps = sort_counting_swaps(bs, scratch, 0, n);
  const double ties_b =
      tied_pairs(bs.begin(), bs.end(), [](double x, double y) { return x == y; });

  const double denom = (n0 - ties_a) * (n0 - ties_b);
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double numer = n0 - ties_a - ties_b + ties_ab - 2.0 * swaps;
  return std::clamp(numer / std::sqrt(denom), -1.0, 1.0);
}

std::vector<std::string> top_k_ids(std::span<const ScoredId> scored, std::size_t k) {
  if (k == 0 || k > scored.size()) {
    throw Error(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " with " +
                                           std::to_string(scored.size()) + " items");
  }
  auto order = ranked(scored);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k; ++i) ids.push_back(order[i]->id);
  return ids;
}

TopKOverlap precision_at_k(std::span<const ScoredId> predicted, std::span<const ScoredId> truth,
                           std::size_t k) {
  std::set<std::string> pred_ids, truth_ids;
  for (const auto& s : predicted) pred_ids.insert(s.id);
  for (const auto& s : truth) truth_ids.insert(s.id);
  if (pred_ids.size() != predicted.size() || truth_ids.size() != truth.size() ||
      pred_ids != truth_ids) {
    throw Error(ErrorCode::kIdUniverseMismatch,
                "predicted and truth lists must score the same unique ids");
  }
  const auto top_pred = top_k_ids(predicted, k);
  const auto top_truth = top_k_ids(truth, k);
  const std::set<std::string> truth_set(top_truth.begin(), top_truth.end());
  const auto hits = std::count_if(top_pred.begin(), top_pred.end(),
                                  [&truth_set](const auto& id) { return truth_set.contains(id); });
  const double p = static_cast<double>(hits) / static_cast<double>(k);
  return {p, p, p};
}

ErrorSummary rmse_mae(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, 1);
  double sq = 0.0, abs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
    abs += std::abs(d);
  }
  const double n = static_cast<double>(a.size());
  return {std::sqrt(sq / n), abs / n};
}

std::vector<double> normalize_scores_for_error(std::span<const double> scores,
                                               std::span<const double> ratings) {
  if (ratings.empty()) throw Error(ErrorCode::kTooFewSamples, "ratings must be nonempty");
  const auto [rlo, rhi] = std::minmax_element(ratings.begin(), ratings.end());
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const auto [slo, shi] = std::minmax_element(scores.begin(), scores.end());
  if (*shi == *slo) {
    std::fill(out.begin(), out.end(), 0.5 * (*rlo + *rhi));
    return out;
  }
  const double scale = (*rhi - *rlo) / (*shi - *slo);
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = *rlo + (scores[i] - *slo) * scale;
  return out;
}

std::vector<MetricsReport> evaluate(const EvaluationInput& input, std::span<const std::size_t> ks,
                                    std::vector<std::size_t>* skipped_ks) {
  const std::size_t n = input.ids.size();
  if (input.predicted.size() != n || input.truth.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "ids, predictions and truth differ in length");
  }
  MetricsReport base;
  base.layer = input.layer;
  base.baseline_name = input.baseline_name;
  base.scenario = input.scenario;
  base.n = n;
  if (n >= 1) {
    const auto compared = input.rescale_for_error
                              ? normalize_scores_for_error(input.predicted, input.truth)
                              : input.predicted;
    const auto err = rmse_mae(compared, input.truth);
    base.rmse = err.rmse;
    base.mae = err.mae;
  }
  if (n >= 2) {
    base.spearman = defined(spearman(input.predicted, input.truth));
    base.kendall = defined(kendall(input.predicted, input.truth));
  }

  std::vector<MetricsReport> reports;
  if (ks.empty()) {
    reports.push_back(base);
    return reports;
  }
  std::vector<ScoredId> pred, truth;
  for (std::size_t i = 0; i < n; ++i) {
    pred.push_back({input.ids[i], input.predicted[i]});
    truth.push_back({input.ids[i], input.truth[i]});
  }
  for (std::size_t k : ks) {
    if (k == 0 || k > n) {
      if (skipped_ks) skipped_ks->push_back(k);
      continue;
    }
    MetricsReport r = base;
    r.k = k;
    const auto overlap = precision_at_k(pred, truth, k);
    r.precision_at_k = overlap.precision;
    r.recall_at_k = overlap.recall;
    r.f1_at_k = overlap.f1;
    reports.push_back(r);
  }
  return reports;
}

}  // namespace mltrust
