#include <benchmark/benchmark.h>

#include <random>

#include "mltrust/graph_builder.hpp"
#include "mltrust/ingestion.hpp"
#include "mltrust/social_score.hpp"
#include "mltrust/stress.hpp"
#include "mltrust/trust.hpp"

namespace {

using namespace mltrust;

std::string make_id(char prefix, std::size_t i) {
  return std::string(1, prefix) + std::to_string(1000 + i);
}

// Random store with consistent affiliations: every doctor sits in 1-3
// hospitals and 1-2 departments, and the department and hospital sides list
// those doctors back.
EntityStore random_store(std::size_t hospitals, std::size_t departments, std::size_t doctors,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_h(0, hospitals - 1);
  std::uniform_int_distribution<std::size_t> pick_d(0, departments - 1);
  std::uniform_real_distribution<double> qual(1.0, 10.0);
  EntityStore store;
  for (std::size_t h = 0; h < hospitals; ++h) {
    auto& rec = store.hospitals[make_id('H', h)];
    rec.id = make_id('H', h);
    rec.rating = 3.0 + 2.0 * qual(rng) / 10.0;
  }
  for (std::size_t d = 0; d < departments; ++d) {
    auto& rec = store.departments[make_id('D', d)];
    rec.id = make_id('D', d);
  }
  for (std::size_t p = 0; p < doctors; ++p) {
    DoctorRecord doc;
    doc.id = make_id('P', p);
    doc.qualification_score = qual(rng);
    doc.like_pct = 60.0 + 4.0 * qual(rng);
    for (std::size_t k = 0, n = 1 + p % 3; k < n; ++k) doc.hospital_ids.insert(make_id('H', pick_h(rng)));
    for (std::size_t k = 0, n = 1 + p % 2; k < n; ++k) doc.department_ids.insert(make_id('D', pick_d(rng)));
    for (const auto& h : doc.hospital_ids) {
      for (const auto& d : doc.department_ids) {
        store.hospitals[h].department_ids.insert(d);
        store.departments[d].hospital_ids.insert(h);
      }
    }
    for (const auto& d : doc.department_ids) store.departments[d].doctor_ids.insert(doc.id);
    store.doctors.emplace(doc.id, std::move(doc));
  }
  return store;
}

void BM_BuildNetwork(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto store = random_store(n / 4, n / 8 + 1, n, 11);
  for (auto _ : state) {
    auto network = build_network(store);
    benchmark::DoNotOptimize(&network);
  }
}
BENCHMARK(BM_BuildNetwork)->Arg(100)->Arg(400);

void BM_ScoreNetwork(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto trust = derive_all_trust(build_network(random_store(n / 4, n / 8 + 1, n, 12)));
  ScoringOptions options;
  options.convergence.damping = 0.85;
  for (auto _ : state) {
    auto scores = score_network(trust, options);
    benchmark::DoNotOptimize(&scores);
  }
}
BENCHMARK(BM_ScoreNetwork)->Arg(100)->Arg(400);

void BM_StressRun(benchmark::State& state) {
  const auto network = build_network(random_store(50, 13, 200, 13));
  const auto trust = derive_all_trust(network);
  const auto shape = NetworkShape::of(network);
  ScoringOptions options;
  options.convergence.damping = 0.85;
  const auto reference = score_network(trust, options);
  const std::vector<std::size_t> ks = {5, 10};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto run = run_stress(trust, shape, reference, options, {DirichletPerturb{100.0}, ++seed}, ks);
    benchmark::DoNotOptimize(&run);
  }
}
BENCHMARK(BM_StressRun);

}  // namespace
