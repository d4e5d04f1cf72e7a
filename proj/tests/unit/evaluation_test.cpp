#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "mltrust/errors.hpp"
#include "mltrust/evaluation.hpp"
#include "oracles.hpp"

namespace mltrust {
namespace {

using V = std::vector<double>;

std::vector<ScoredId> scored(const std::vector<std::string>& ids, const V& scores) {
  std::vector<ScoredId> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], scores[i]});
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(V{1, 2, 3}, V{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(V{1, 2, 3}, V{30, 20, 10}), -1.0);
  EXPECT_NEAR(spearman(V{1, 2, 2, 3}, V{1, 2, 3, 4}), testing::brute_spearman({1, 2, 2, 3}, {1, 2, 3, 4}), 1e-12);
}

TEST(Spearman, Errors) {
  EXPECT_EQ(code_of([] { spearman(V{1, 2}, V{1, 2, 3}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { spearman(V{1}, V{1}); }), ErrorCode::kTooFewSamples);
  EXPECT_TRUE(std::isnan(spearman(V{1, 1, 1}, V{1, 2, 3})));
}

TEST(Kendall, Examples) {
  EXPECT_DOUBLE_EQ(kendall(V{1, 2, 3, 4}, V{1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(kendall(V{1, 2, 3, 4}, V{4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(kendall(V{1, 2, 3}, V{1, 3, 2}), 1.0 / 3.0, 1e-15);
}

TEST(Kendall, Errors) {
  EXPECT_EQ(code_of([] { kendall(V{1, 2}, V{1}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { kendall(V{}, V{}); }), ErrorCode::kTooFewSamples);
}

TEST(Correlations, AllPermutationsOfFourMatchBruteForce) {
  V base = {1, 2, 3, 4};
  V perm = base;
  int count = 0;
  do {
    EXPECT_EQ(kendall(base, perm), testing::brute_kendall(base, perm));
    EXPECT_NEAR(spearman(base, perm), testing::brute_spearman(base, perm), 1e-15);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 24);
}

TEST(Correlations, RandomTiedVectorsMatchBruteForce) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> value(0, 4);
  std::uniform_int_distribution<int> size(2, 30);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size(rng);
    V a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = value(rng);
      b[i] = value(rng);
    }
    const double bk = testing::brute_kendall(a, b);
    const double bs = testing::brute_spearman(a, b);
    if (std::isnan(bk)) {
      EXPECT_TRUE(std::isnan(kendall(a, b)));
    } else {
      EXPECT_NEAR(kendall(a, b), bk, 1e-12);
    }
    if (std::isnan(bs)) {
      EXPECT_TRUE(std::isnan(spearman(a, b)));
    } else {
      EXPECT_NEAR(spearman(a, b), bs, 1e-12);
    }
  }
}

TEST(Correlations, SelfAndMonotoneInvariance) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    V a(12), b(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
    EXPECT_DOUBLE_EQ(kendall(a, a), 1.0);
    V ta = a;
    for (double& x : ta) x = std::exp(x) * 3.0 + 1.0;
    EXPECT_NEAR(spearman(ta, b), spearman(a, b), 1e-12);
    EXPECT_NEAR(kendall(ta, b), kendall(a, b), 1e-12);
  }
}

TEST(PrecisionAtK, Examples) {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  const auto truth = scored(ids, {5, 4, 3, 2, 1});
  auto p = precision_at_k(truth, truth, 3);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 1.0);
  EXPECT_EQ(p.f1, 1.0);

  const auto reversed = scored(ids, {1, 2, 3, 4, 5});
  p = precision_at_k(reversed, truth, 2);
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.f1, 0.0);

  // Ten items, truth top-5 = {a..e}, prediction top-5 shares three of them.
  const std::vector<std::string> ten = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  const auto truth10 = scored(ten, {10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  const auto pred10 = scored(ten, {10, 9, 8, 1, 2, 7, 6, 3, 4, 5});
  p = precision_at_k(pred10, truth10, 5);
  EXPECT_DOUBLE_EQ(p.precision, 0.6);
  EXPECT_DOUBLE_EQ(p.recall, 0.6);
  EXPECT_DOUBLE_EQ(p.f1, 0.6);
}

TEST(PrecisionAtK, TiesBreakByAscendingId) {
  const auto flat = scored({"c", "a", "b"}, {1, 1, 1});
  EXPECT_EQ(top_k_ids(flat, 2), (std::vector<std::string>{"a", "b"}));
}

TEST(PrecisionAtK, Errors) {
  const auto s = scored({"a", "b"}, {1, 2});
  EXPECT_EQ(code_of([&] { precision_at_k(s, s, 3); }), ErrorCode::kKTooLarge);
  EXPECT_EQ(code_of([&] { precision_at_k(s, s, 0); }), ErrorCode::kKTooLarge);
  const auto other = scored({"a", "z"}, {1, 2});
  EXPECT_EQ(code_of([&] { precision_at_k(s, other, 1); }), ErrorCode::kIdUniverseMismatch);
}

TEST(PrecisionAtK, Symmetric) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u;
  std::vector<std::string> ids;
  for (int i = 0; i < 15; ++i) ids.push_back("n" + std::to_string(i));
  for (int trial = 0; trial < 100; ++trial) {
    V a(15), b(15);
    for (int i = 0; i < 15; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    const std::size_t k = 1 + trial % 15;
    EXPECT_EQ(precision_at_k(scored(ids, a), scored(ids, b), k).precision,
              precision_at_k(scored(ids, b), scored(ids, a), k).precision);
  }
}

TEST(RmseMae, Examples) {
  auto e = rmse_mae(V{1, 2, 3}, V{1, 2, 3});
  EXPECT_EQ(e.rmse, 0.0);
  EXPECT_EQ(e.mae, 0.0);
  e = rmse_mae(V{0}, V{1});
  EXPECT_EQ(e.rmse, 1.0);
  EXPECT_EQ(e.mae, 1.0);
  e = rmse_mae(V{0, 0}, V{3, 4});
  EXPECT_DOUBLE_EQ(e.rmse, std::sqrt(12.5));
  EXPECT_DOUBLE_EQ(e.mae, 3.5);
  EXPECT_EQ(code_of([] { rmse_mae(V{1}, V{1, 2}); }), ErrorCode::kLengthMismatch);
}

TEST(RmseMae, RmseDominatesMae) {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    V a(9), b(9);
    for (int i = 0; i < 9; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const auto e = rmse_mae(a, b);
    EXPECT_GE(e.rmse + 1e-15, e.mae);
    EXPECT_GE(e.mae, 0.0);
  }
  V a = {0, 0, 0}, b = {1, -1, 1};
  const auto e = rmse_mae(a, b);
  EXPECT_DOUBLE_EQ(e.rmse, e.mae);
}

TEST(NormalizeScoresForError, Examples) {
  EXPECT_EQ(normalize_scores_for_error(V{0, 1}, V{0, 2, 5}), (V{0, 5}));
  EXPECT_EQ(normalize_scores_for_error(V{7, 7, 7}, V{2, 3, 4}), (V{3, 3, 3}));
  EXPECT_EQ(normalize_scores_for_error(V{1, 2, 3}, V{0, 4}), (V{0, 2, 4}));
}

TEST(Evaluate, RankIdenticalScoresGiveUnitCorrelations) {
  EvaluationInput in;
  in.layer = LayerId::kDepartment;
  in.baseline_name = "social_score";
  in.ids = {"D1", "D2", "D3", "D4"};
  in.truth = {4.5, 3.0, 4.0, 2.0};
  in.predicted = {0.9, 0.3, 0.6, 0.1};
  const std::vector<std::size_t> ks = {1, 2, 9};
  std::vector<std::size_t> skipped;
  const auto reports = evaluate(in, ks, &skipped);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(skipped, (std::vector<std::size_t>{9}));
  for (const auto& r : reports) {
    EXPECT_EQ(r.spearman, 1.0);
    EXPECT_EQ(r.kendall, 1.0);
    EXPECT_EQ(r.precision_at_k, 1.0);
    EXPECT_EQ(r.n, 4u);
  }
  EXPECT_EQ(reports[1].k, 2u);
}

TEST(Evaluate, SingleItemHasNoCorrelation) {
  EvaluationInput in;
  in.ids = {"H1"};
  in.truth = {4.0};
  in.predicted = {1.0};
  const auto reports = evaluate(in, {});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE(reports[0].spearman);
  EXPECT_FALSE(reports[0].kendall);
  EXPECT_FALSE(reports[0].k);
  EXPECT_EQ(reports[0].rmse, 0.0);
}

TEST(Evaluate, IdenticalValuesGiveZeroError) {
  EvaluationInput in;
  in.ids = {"a", "b", "c"};
  in.truth = {3, 1, 2};
  in.predicted = {3, 1, 2};
  in.rescale_for_error = false;
  const auto r = evaluate(in, {}).front();
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mae, 0.0);
}

}  // namespace
}  // namespace mltrust
