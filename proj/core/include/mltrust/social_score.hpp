#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mltrust/model.hpp"
#include "mltrust/trust.hpp"

namespace mltrust {

struct ConstantResidual {
  double value = 0.2;
};
struct UniformResidual {
  double lo = 0.0;
  double hi = 1.0;
};
// Samples are clipped to [0, 1].
struct NormalResidual {
  double mean = 0.5;
  double stdev = 0.15;
};
// Beta(alpha, beta) draws.
struct SkewedResidual {
  double alpha = 2.0;
  double beta = 8.0;
};

using ResidualDistribution =
    std::variant<ConstantResidual, UniformResidual, NormalResidual, SkewedResidual>;

struct ResidualConfig {
  ResidualDistribution distribution = ConstantResidual{};
  std::uint64_t seed = 0;

  // Throws InvalidConfig when a parameter is out of its domain.
  void validate() const;
};

std::string residual_description(const ResidualDistribution& distribution);

// Named scenarios: "constant" (0.2), "uniform" U(0,1), "normal" N(0.5, 0.15),
// "skewed" Beta(2, 8).
std::optional<ResidualDistribution> residual_scenario(std::string_view name);

// Deterministic for a fixed seed. Requires n >= 1.
ScoreVector generate_residual(const ResidualConfig& config, LayerId layer, std::size_t n);

enum class ConvergenceNorm { kMaxAbs, kL1 };

struct ConvergenceConfig {
  double epsilon = 1e-3;
  std::size_t max_iterations = 1000;
  ConvergenceNorm norm = ConvergenceNorm::kMaxAbs;
  // Update is damping * S * tau + (1 - damping) * S. 1 is the plain iteration.
  double damping = 1.0;

  void validate() const;
};

// S0 = residual_alpha + residual_beta * trust_beta_alpha.
ScoreVector initial_score(const ScoreVector& residual_alpha, const ScoreVector& residual_beta,
                          const TrustMatrix& trust_beta_alpha);

// One damped row-vector times matrix product.
std::vector<double> propagate_step(std::span<const double> scores, const TrustMatrix& trust,
                                   double damping = 1.0);

struct PropagationResult {
  ScoreVector scores;
  std::size_t iterations = 0;
  bool converged = false;
  // norm(S_{r+1} - S_r) of every iteration performed.
  std::vector<double> deltas;
};

// Iterates S <- S * tau until the change falls to epsilon or the iteration
// cap is hit. With max_iterations == 0 the initial scores come back with
// converged == false.
PropagationResult propagate(const ScoreVector& s0, const TrustMatrix& trust_alpha,
                            const ConvergenceConfig& config = {});

// s0 * M^r with M = damping * tau + (1 - damping) * I, computed by repeated
// squaring of M.
ScoreVector closed_form_score(const ScoreVector& s0, const TrustMatrix& trust_alpha,
                              std::size_t r, double damping = 1.0);

// Which neighbour feeds the department layer's initial score.
enum class DepartmentFeed { kHospital, kDoctor };

struct ScoringOptions {
  std::array<ResidualConfig, 3> residuals;
  DepartmentFeed department_feed = DepartmentFeed::kHospital;
  ConvergenceConfig convergence;
};

struct LayerScore {
  LayerId layer;
  LayerId feed_layer;
  ScoreVector residual;
  ScoreVector initial;
  PropagationResult result;
};

// Runs the full scoring pass for all three layers. Hospitals are fed by
// departments (tau^[dh]), doctors by departments (tau^[dp]), departments by
// hospitals (tau^[hd]) or doctors (tau^[pd]).
std::array<LayerScore, 3> score_network(const TrustSet& trust, const ScoringOptions& options);

// Same, with residual vectors supplied by the caller.
std::array<LayerScore, 3> score_network(const TrustSet& trust,
                                        const std::array<ScoreVector, 3>& residuals,
                                        const ScoringOptions& options);

}  // namespace mltrust
