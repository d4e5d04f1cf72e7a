#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mltrust/errors.hpp"
#include "mltrust/graph_builder.hpp"
#include "mltrust/stress.hpp"
#include "toy.hpp"

namespace mltrust {
namespace {

struct Toy {
  MultiLayerNetwork network = build_network(testing::load_toy());
  TrustSet trust = derive_all_trust(network);
  NetworkShape shape = NetworkShape::of(network);
  ScoringOptions options;
  std::array<LayerScore, 3> reference = score_network(trust, options);
};

const std::vector<std::size_t> kKs = {1, 2, 3};

TEST(ExportEdgeTable, ToyCounts) {
  Toy toy;
  const auto all = toy.trust.ordered();
  EXPECT_EQ(export_edge_table(all, toy.shape).size(), 68u);
  const std::vector<TrustMatrix> h = {toy.trust.at("h")};
  const auto table = export_edge_table(h, toy.shape);
  ASSERT_EQ(table.size(), 12u);
  for (const auto& r : table) {
    EXPECT_EQ(r.layer_tag, "h");
    EXPECT_TRUE(std::abs(r.trust - 0.5) < 1e-12 || std::abs(r.trust - 0.25) < 1e-12 ||
                std::abs(r.trust - 1.0 / 3) < 1e-12);
  }
  EXPECT_EQ(table.front().src, "H1");
  EXPECT_EQ(table.front().dst, "H2");
}

TEST(ExportEdgeTable, ZeroMatrixIsEmpty) {
  Toy toy;
  const std::vector<TrustMatrix> zero = {
      TrustMatrix(LayerId::kHospital, LayerId::kHospital, DenseMatrix(4, 4))};
  EXPECT_TRUE(export_edge_table(zero, toy.shape).empty());
}

TEST(GenerateSynthetic, IdentityIsVerbatim) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  EXPECT_EQ(generate_synthetic(table, {IdentityGenerator{}, 4}), table);
}

TEST(GenerateSynthetic, EmptyTable) {
  try {
    generate_synthetic({}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTable);
  }
}

TEST(GenerateSynthetic, InvalidConcentration) {
  EXPECT_THROW(generate_synthetic({{"h", "a", "b", 1.0}}, {DirichletPerturb{0.0}, 1}), Error);
}

TEST(GenerateSynthetic, LargeConcentrationStaysNearOriginal) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto synth = generate_synthetic(table, {DirichletPerturb{1e6}, seed});
    ASSERT_EQ(synth.size(), table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      EXPECT_NEAR(synth[i].trust, table[i].trust, 0.01);
    }
  }
}

TEST(GenerateSynthetic, DirichletRowsSumToOne) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  const auto synth = generate_synthetic(table, {DirichletPerturb{2.0}, 5});
  std::map<std::pair<std::string, std::string>, double> sums;
  for (const auto& r : synth) sums[{r.layer_tag, r.src}] += r.trust;
  for (const auto& [row, sum] : sums) EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(GenerateSynthetic, SupportPreservedAndDeterministic) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  for (GeneratorMethod method : {GeneratorMethod{DirichletPerturb{0.5}},
                                 GeneratorMethod{BootstrapGenerator{}}}) {
    const auto a = generate_synthetic(table, {method, 11});
    const auto b = generate_synthetic(table, {method, 11});
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), table.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].layer_tag, table[i].layer_tag);
      EXPECT_EQ(a[i].src, table[i].src);
      EXPECT_EQ(a[i].dst, table[i].dst);
      EXPECT_GT(a[i].trust, 0.0);
    }
  }
}

TEST(GenerateSynthetic, BootstrapDrawsFromSameTag) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  std::map<std::string, std::set<double>> pools;
  for (const auto& r : table) pools[r.layer_tag].insert(r.trust);
  for (const auto& r : generate_synthetic(table, {BootstrapGenerator{}, 3})) {
    EXPECT_TRUE(pools[r.layer_tag].contains(r.trust));
  }
}

TEST(GenerateSynthetic, BootstrapSingleEdgeRowSurvivesRebuild) {
  Toy toy;
  // Department D4 has a single hospital H3 in dh.
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rebuilt = rebuild_trust(generate_synthetic(table, {BootstrapGenerator{}, seed}),
                                       toy.shape);
    EXPECT_EQ(rebuilt.matrices.at("dh")(3, 2), 1.0);
    EXPECT_EQ(rebuilt.matrices.at("pd")(0, 0), 1.0);
  }
}

TEST(RebuildTrust, RoundTripIsIdentity) {
  Toy toy;
  const auto rebuilt = rebuild_trust(export_edge_table(toy.trust.ordered(), toy.shape), toy.shape);
  for (const auto& m : toy.trust.ordered()) {
    const auto& r = rebuilt.matrices.at(m.tag());
    for (std::size_t i = 0; i < m.values().rows(); ++i)
      for (std::size_t j = 0; j < m.values().cols(); ++j) EXPECT_NEAR(r(i, j), m(i, j), 1e-12);
  }
}

TEST(RebuildTrust, RoundTripThroughCsvIsIdentity) {
  Toy toy;
  const auto table = export_edge_table(toy.trust.ordered(), toy.shape);
  std::stringstream io;
  write_edge_table(io, table);
  EXPECT_EQ(io.str().rfind("#schema_version=1\nlayer,src,dst,trust\n", 0), 0u);
  const auto read = read_edge_table(io);
  const auto rebuilt = rebuild_trust(read, toy.shape);
  for (const auto& m : toy.trust.ordered()) {
    const auto& r = rebuilt.matrices.at(m.tag());
    for (std::size_t i = 0; i < m.values().rows(); ++i)
      for (std::size_t j = 0; j < m.values().cols(); ++j) EXPECT_NEAR(r(i, j), m(i, j), 1e-12);
  }
}

TEST(RebuildTrust, RandomTrustSetsRoundTrip) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    NetworkShape shape;
    for (std::size_t l = 0; l < 3; ++l) {
      const std::size_t n = 1 + trial % 7 + l;
      for (std::size_t i = 0; i < n; ++i) shape.ids[l].push_back("n" + std::to_string(i));
    }
    TrustSet set;
    for (const auto& tag : TrustSet::canonical_tags()) {
      const auto r = *parse_layer(tag.substr(0, 1));
      const auto c = tag.size() == 1 ? r : *parse_layer(tag.substr(1, 1));
      DenseMatrix w(shape.layer(r).size(), shape.layer(c).size());
      for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j)
          if (!(r == c && i == j) && u(rng) < 0.6) w(i, j) = u(rng);
      set.insert(derive_trust({r, c, w}));
    }
    const auto rebuilt = rebuild_trust(export_edge_table(set.ordered(), shape), shape);
    for (const auto& m : set.ordered()) {
      const auto& r = rebuilt.matrices.at(m.tag());
      EXPECT_TRUE(TrustMatrix::check(m.row_layer(), m.col_layer(), r.values()).empty());
      for (std::size_t i = 0; i < m.values().rows(); ++i)
        for (std::size_t j = 0; j < m.values().cols(); ++j)
          ASSERT_NEAR(r(i, j), m(i, j), 1e-12);
    }
  }
}

TEST(RebuildTrust, NormalizesRows) {
  Toy toy;
  const EdgeTable table = {{"hd", "H1", "D1", 1.5}, {"hd", "H1", "D2", 0.5}};
  const auto rebuilt = rebuild_trust(table, toy.shape, {"hd"});
  EXPECT_EQ(rebuilt.matrices.at("hd")(0, 0), 0.75);
  EXPECT_EQ(rebuilt.matrices.at("hd")(0, 1), 0.25);
  EXPECT_EQ(rebuilt.matrices.at("hd")(1, 0), 0.0);
}

TEST(RebuildTrust, DropsDiagonalAndCountsIt) {
  Toy toy;
  const EdgeTable table = {{"h", "H1", "H1", 0.5}, {"h", "H1", "H2", 0.5},
                           {"h", "H2", "H1", 1.0}, {"h", "H2", "H1", 1.0}};
  const auto rebuilt = rebuild_trust(table, toy.shape, {"h"});
  EXPECT_EQ(rebuilt.report.dropped_diagonal, 1u);
  EXPECT_EQ(rebuilt.report.merged_duplicates, 1u);
  EXPECT_EQ(rebuilt.matrices.at("h")(0, 0), 0.0);
  EXPECT_EQ(rebuilt.matrices.at("h")(0, 1), 1.0);
}

TEST(RebuildTrust, OutOfShape) {
  Toy toy;
  for (const EdgeTable& table : {EdgeTable{{"h", "H9", "H1", 0.5}},
                                 EdgeTable{{"hp", "H1", "P1", 0.5}},
                                 EdgeTable{{"x", "H1", "H2", 0.5}}}) {
    try {
      rebuild_trust(table, toy.shape);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kOutOfShape);
    }
  }
}

TEST(StressCompare, IdentityIsPerfect) {
  Toy toy;
  const auto run = run_stress(toy.trust, toy.shape, toy.reference, toy.options,
                              {IdentityGenerator{}, 1}, kKs);
  const auto truth = final_scores(toy.reference);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t i = 0; i < truth[l].size(); ++i) {
      EXPECT_NEAR(run.synthetic_scores[l][i], truth[l][i], 1e-9);
    }
  }
  ASSERT_EQ(run.metrics.size(), 9u);
  for (const auto& m : run.metrics) {
    EXPECT_EQ(m.precision_at_k, 1.0);
    EXPECT_EQ(m.spearman, 1.0);
    EXPECT_EQ(m.kendall, 1.0);
    EXPECT_NEAR(m.rmse, 0.0, 1e-9);
    EXPECT_NEAR(m.mae, 0.0, 1e-9);
  }
}

TEST(StressCompare, ReversedRanking) {
  NetworkShape shape;
  shape.ids[0] = {"a", "b", "c", "d"};
  auto v = [](LayerId l, std::vector<double> x) {
    const auto n = x.size();
    return ScoreVector(l, ScoreKind::kSocial, std::move(x), n);
  };
  const std::array<ScoreVector, 3> truth = {v(LayerId::kHospital, {4, 3, 2, 1}),
                                            v(LayerId::kDepartment, {}), v(LayerId::kDoctor, {})};
  const std::array<ScoreVector, 3> synth = {v(LayerId::kHospital, {1, 2, 3, 4}),
                                            v(LayerId::kDepartment, {}), v(LayerId::kDoctor, {})};
  const auto reports = stress_compare(truth, synth, shape, kKs);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].spearman, -1.0);
  EXPECT_EQ(reports[0].kendall, -1.0);
}

TEST(RunStress, DeterministicPerSeed) {
  Toy toy;
  const auto a = run_stress(toy.trust, toy.shape, toy.reference, toy.options,
                            {DirichletPerturb{5.0}, 9}, kKs);
  const auto b = run_stress(toy.trust, toy.shape, toy.reference, toy.options,
                            {DirichletPerturb{5.0}, 9}, kKs);
  EXPECT_EQ(a.synthetic, b.synthetic);
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(a.synthetic_scores[l].values(), b.synthetic_scores[l].values());
  }
}

TEST(RunStress, RebuiltMatricesSatisfyInvariantsUnderNoise) {
  Toy toy;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (GeneratorMethod method : {GeneratorMethod{DirichletPerturb{0.3}},
                                   GeneratorMethod{BootstrapGenerator{}}}) {
      const auto run =
          run_stress(toy.trust, toy.shape, toy.reference, toy.options, {method, seed}, kKs);
      for (const auto& m : run.synthetic_trust.ordered()) {
        EXPECT_TRUE(TrustMatrix::check(m.row_layer(), m.col_layer(), m.values()).empty());
      }
    }
  }
}

// The toy hospital fixed point is two exact ties ({H1, H2} and {H3, H4}), so
// within-tier order is decided by sub-1e-4 iteration residue and is not
// stable under perturbation. Scores and the tier order are.
TEST(RunStress, HighConcentrationKeepsHospitalTiers) {
  Toy toy;
  const auto& ref = toy.reference[0].result.scores;
  EXPECT_LT(std::abs(ref[0] - ref[1]), 1e-3);
  EXPECT_LT(std::abs(ref[2] - ref[3]), 1e-3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto run = run_stress(toy.trust, toy.shape, toy.reference, toy.options,
                                {DirichletPerturb{1e6}, seed}, kKs);
    const auto& synth = run.synthetic_scores[0];
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(synth[i], ref[i], 2e-3) << "seed " << seed;
    EXPECT_GT(std::min(synth[0], synth[1]), std::max(synth[2], synth[3])) << "seed " << seed;
    const auto& hospital = run.metrics[1];
    ASSERT_EQ(hospital.layer, LayerId::kHospital);
    ASSERT_EQ(hospital.k, 2u);
    EXPECT_EQ(hospital.precision_at_k, 1.0);
    EXPECT_GE(*hospital.spearman, 0.8);
  }
}

}  // namespace
}  // namespace mltrust
