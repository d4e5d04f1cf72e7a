#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mltrust/errors.hpp"
#include "mltrust/graph_builder.hpp"
#include "mltrust/trust.hpp"
#include "oracles.hpp"
#include "toy.hpp"

namespace mltrust {
namespace {

using testing::kPrintedTolerance;
using testing::Rows;

void expect_near_rows(const DenseMatrix& actual, const Rows& expected, double tol) {
  ASSERT_EQ(actual.rows(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    ASSERT_EQ(actual.cols(), expected[i].size());
    for (std::size_t j = 0; j < expected[i].size(); ++j) {
      EXPECT_NEAR(actual(i, j), expected[i][j], tol) << "cell (" << i << "," << j << ")";
    }
  }
}

AdjacencyBlock block(LayerId r, LayerId c, const Rows& rows) {
  return {r, c, DenseMatrix::from_rows(rows)};
}

TEST(DeriveTrust, Examples) {
  auto t = derive_trust(block(LayerId::kHospital, LayerId::kHospital, testing::kPrintedAh));
  expect_near_rows(t.values(), testing::kPrintedTh, 1e-12 + 0.0034);
  EXPECT_EQ(t(0, 1), 0.5);
  EXPECT_EQ(t(0, 2), 0.25);

  auto dp = derive_trust(block(LayerId::kDepartment, LayerId::kDoctor, {{10, 6, 8, 0, 0}}));
  EXPECT_NEAR(dp(0, 0), 10.0 / 24.0, 1e-15);
  EXPECT_NEAR(dp(0, 0), 0.42, kPrintedTolerance);
  EXPECT_NEAR(dp(0, 2), 0.33, kPrintedTolerance);

  auto zero = derive_trust(block(LayerId::kHospital, LayerId::kDepartment, {{0, 0, 0}}));
  EXPECT_EQ(zero.values().to_rows(), (Rows{{0, 0, 0}}));
}

TEST(DeriveTrust, ToyMatchesPrintedWithinRounding) {
  const auto network = build_network(testing::load_toy());
  const auto trust = derive_all_trust(network);
  expect_near_rows(trust.at("h").values(), testing::kPrintedTh, kPrintedTolerance);
  expect_near_rows(trust.at("d").values(), testing::kPrintedTd, kPrintedTolerance);
  expect_near_rows(trust.at("hd").values(), testing::kPrintedThd, kPrintedTolerance);
  expect_near_rows(trust.at("dh").values(), testing::kPrintedTdh, kPrintedTolerance);
  expect_near_rows(trust.at("dp").values(), testing::kPrintedTdp, kPrintedTolerance);
  expect_near_rows(trust.at("pd").values(), testing::kPrintedTpd, kPrintedTolerance);
}

// The printed doctor matrix shows 1/6 as 0.17 in one column and 0.16 in
// another, so three cells cannot sit within 0.005 of any exact
// normalization of A^[p]. Those cells are pinned to 1/6; the rest must match.
TEST(DeriveTrust, ToyDoctorTrustAgainstPrinted) {
  const auto trust = derive_all_trust(build_network(testing::load_toy()));
  const auto& tp = trust.at("p");
  std::size_t out_of_tolerance = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double printed = testing::kPrintedTp[i][j];
      if (std::abs(tp(i, j) - printed) <= kPrintedTolerance) continue;
      ++out_of_tolerance;
      EXPECT_EQ(printed, 0.16) << "cell (" << i << "," << j << ")";
      EXPECT_NEAR(tp(i, j), 1.0 / 6.0, 1e-15);
    }
  }
  EXPECT_EQ(out_of_tolerance, 3u);
}

TEST(DeriveTrust, ToyMatchesExactFractions) {
  const auto network = build_network(testing::load_toy());
  const auto trust = derive_all_trust(network);
  auto to_int = [](const Rows& rows) {
    std::vector<std::vector<std::int64_t>> out;
    for (const auto& r : rows) out.emplace_back(r.begin(), r.end());
    return out;
  };
  const auto check = [](const TrustMatrix& m, const testing::FractionMatrix& exact) {
    for (std::size_t i = 0; i < exact.size(); ++i)
      for (std::size_t j = 0; j < exact[i].size(); ++j)
        EXPECT_NEAR(m(i, j), exact[i][j].value(), 1e-15);
  };
  check(trust.at("hd"), testing::exact_row_normalize(to_int(testing::kPrintedAhd)));
  check(trust.at("dh"),
        testing::exact_row_normalize(testing::transpose(to_int(testing::kPrintedAhd))));
  check(trust.at("pd"),
        testing::exact_row_normalize(testing::transpose(to_int(testing::kPrintedAdp))));
  check(trust.at("p"), testing::exact_row_normalize(to_int(testing::kPrintedAp)));
}

TEST(DeriveReverseTrust, Examples) {
  const auto hd = block(LayerId::kHospital, LayerId::kDepartment, testing::kPrintedAhd);
  const auto dh = derive_reverse_trust(hd);
  EXPECT_EQ(dh.tag(), "dh");
  EXPECT_NEAR(dh(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(dh(0, 1), 1.0 / 6.0, 1e-15);
  expect_near_rows(dh.values(), testing::kPrintedTdh, kPrintedTolerance);

  const auto pd =
      derive_reverse_trust(block(LayerId::kDepartment, LayerId::kDoctor, testing::kPrintedAdp));
  EXPECT_NEAR(pd(1, 0), 6.0 / 14.0, 1e-15);
  EXPECT_NEAR(pd(1, 2), 8.0 / 14.0, 1e-15);

  const auto single = derive_reverse_trust(block(LayerId::kHospital, LayerId::kDepartment, {{3}}));
  EXPECT_EQ(single.values().to_rows(), (Rows{{1.0}}));
}

TEST(DeriveReverseTrust, RejectsIntraLayer) {
  try {
    derive_reverse_trust(block(LayerId::kDoctor, LayerId::kDoctor, {{0, 1}, {1, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntraLayerBlock);
  }
}

TEST(NonzeroTrustValues, Examples) {
  const auto trust = derive_all_trust(build_network(testing::load_toy()));
  EXPECT_EQ(nonzero_trust_values(trust.at("h")).size(), 12u);
  const TrustMatrix zero(LayerId::kHospital, LayerId::kHospital, DenseMatrix(3, 3));
  EXPECT_TRUE(nonzero_trust_values(zero).empty());
  const auto values = nonzero_trust_values(
      derive_trust(block(LayerId::kHospital, LayerId::kDepartment, {{0, 1, 3}, {2, 0, 0}})));
  EXPECT_EQ(values, (std::vector<double>{0.25, 0.75, 1.0}));
}

// Random non-negative block with roughly half of the cells zero.
AdjacencyBlock random_block(std::mt19937_64& rng, bool intra) {
  std::uniform_int_distribution<std::size_t> size(1, 50);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  const std::size_t r = size(rng);
  const std::size_t c = intra ? r : size(rng);
  const double keep = density(rng);
  DenseMatrix w(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      if (intra && i == j) continue;
      if (density(rng) < keep) w(i, j) = weight(rng);
    }
  if (intra) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < i; ++j) w(i, j) = w(j, i);
  }
  return intra ? AdjacencyBlock{LayerId::kDoctor, LayerId::kDoctor, w}
               : AdjacencyBlock{LayerId::kHospital, LayerId::kDepartment, w};
}

TEST(DeriveTrust, RowStochasticAndSupportPreservingOnRandomBlocks) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const auto b = random_block(rng, trial % 2 == 0);
    const auto t = derive_trust(b);
    for (std::size_t i = 0; i < b.weights.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < b.weights.cols(); ++j) {
        sum += t(i, j);
        ASSERT_EQ(t(i, j) > 0.0, b.weights(i, j) > 0.0);
      }
      if (sum != 0.0) ASSERT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(DeriveTrust, ScaleInvariantPerRow) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = random_block(rng, false);
    const auto before = derive_trust(b);
    const std::size_t row = trial % b.weights.rows();
    const double c = scale(rng);
    for (double& w : b.weights.row(row)) w *= c;
    const auto after = derive_trust(b);
    for (std::size_t j = 0; j < b.weights.cols(); ++j) {
      EXPECT_NEAR(after(row, j), before(row, j), 1e-14);
    }
  }
}

TEST(DeriveReverseTrust, EqualsTrustOfTranspose) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_block(rng, false);
    const AdjacencyBlock t{b.cols, b.rows, b.weights.transposed()};
    EXPECT_EQ(derive_reverse_trust(b).values(), derive_trust(t).values());
  }
}

TEST(TrustSet, CanonicalOrderAndLookups) {
  const auto trust = derive_all_trust(build_network(testing::load_toy()));
  std::vector<std::string> tags;
  std::size_t nonzero = 0;
  for (const auto& m : trust.ordered()) {
    tags.push_back(m.tag());
    nonzero += nonzero_trust_values(m).size();
  }
  std::size_t printed_nonzero = 0;
  for (const auto* rows : {&testing::kPrintedTh, &testing::kPrintedTd, &testing::kPrintedTp,
                           &testing::kPrintedThd, &testing::kPrintedTdh, &testing::kPrintedTdp,
                           &testing::kPrintedTpd}) {
    for (const auto& r : *rows)
      for (double v : r) printed_nonzero += v > 0.0;
  }
  EXPECT_EQ(tags, TrustSet::canonical_tags());
  EXPECT_EQ(printed_nonzero, 68u);
  EXPECT_EQ(nonzero, printed_nonzero);
  EXPECT_EQ(trust.between(LayerId::kDoctor, LayerId::kDepartment).tag(), "pd");
  EXPECT_EQ(trust.intra(LayerId::kDepartment).tag(), "d");
  EXPECT_THROW(trust.at("hp"), Error);
}

}  // namespace
}  // namespace mltrust
