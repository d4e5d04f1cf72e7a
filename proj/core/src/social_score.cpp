#include "mltrust/social_score.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mltrust/csv.hpp"
#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

double gamma_draw(std::mt19937_64& rng, double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(rng);
}

DenseMatrix identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> clamp_nonnegative(std::vector<double> v) {
  // Rounding in the damped update can leave -0.0 or -1e-17 behind.
  for (double& x : v) x = std::max(x, 0.0);
  return v;
}

}  // namespace

void ResidualConfig::validate() const {
  std::visit(Overloaded{
                 [](const ConstantResidual& c) {
                   require(c.value >= 0.0 && c.value <= 1.0, "constant residual must be in [0,1]");
                 },
                 [](const UniformResidual& u) {
                   require(u.lo >= 0.0 && u.lo <= u.hi && u.hi <= 1.0,
                           "uniform residual needs 0 <= lo <= hi <= 1");
                 },
                 [](const NormalResidual& n) {
                   require(std::isfinite(n.mean) && n.stdev > 0.0 && std::isfinite(n.stdev),
                           "normal residual needs a finite mean and stdev > 0");
                 },
                 [](const SkewedResidual& s) {
                   require(s.alpha > 0.0 && s.beta > 0.0 && std::isfinite(s.alpha) &&
                               std::isfinite(s.beta),
                           "skewed residual needs alpha > 0 and beta > 0");
                 },
             },
             distribution);
}

std::string residual_description(const ResidualDistribution& distribution) {
  return std::visit(
      Overloaded{
          [](const ConstantResidual& c) { return "constant(" + format_double(c.value) + ")"; },
          [](const UniformResidual& u) {
            return "uniform(" + format_double(u.lo) + "," + format_double(u.hi) + ")";
          },
          [](const NormalResidual& n) {
            return "normal(" + format_double(n.mean) + "," + format_double(n.stdev) + ")";
          },
          [](const SkewedResidual& s) {
            return "skewed(" + format_double(s.alpha) + "," + format_double(s.beta) + ")";
          },
      },
      distribution);
}

std::optional<ResidualDistribution> residual_scenario(std::string_view name) {
  if (name == "constant") return ConstantResidual{0.2};
  if (name == "uniform") return UniformResidual{0.0, 1.0};
  if (name == "normal") return NormalResidual{0.5, 0.15};
  if (name == "skewed") return SkewedResidual{2.0, 8.0};
  return std::nullopt;
}

ScoreVector generate_residual(const ResidualConfig& config, LayerId layer, std::size_t n) {
  config.validate();
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "residual vector needs at least one node");
  std::mt19937_64 rng(config.seed);
  std::vector<double> values(n);
  std::visit(Overloaded{
                 [&](const ConstantResidual& c) { std::fill(values.begin(), values.end(), c.value); },
                 [&](const UniformResidual& u) {
                   if (u.lo == u.hi) {
                     std::fill(values.begin(), values.end(), u.lo);
                     return;
                   }
                   std::uniform_real_distribution<double> dist(u.lo, u.hi);
                   for (double& v : values) v = dist(rng);
                 },
                 [&](const NormalResidual& nd) {
                   std::normal_distribution<double> dist(nd.mean, nd.stdev);
                   for (double& v : values) v = std::clamp(dist(rng), 0.0, 1.0);
                 },
                 [&](const SkewedResidual& s) {
                   for (double& v : values) {
                     const double x = gamma_draw(rng, s.alpha);
                     const double y = gamma_draw(rng, s.beta);
                     v = x + y > 0.0 ? x / (x + y) : 0.0;
                   }
                 },
             },
             config.distribution);
  return ScoreVector(layer, ScoreKind::kResidual, std::move(values), n);
}

void ConvergenceConfig::validate() const {
  require(epsilon > 0.0, "epsilon must be positive");
  require(damping > 0.0 && damping <= 1.0, "damping must be in (0, 1]");
}

ScoreVector initial_score(const ScoreVector& residual_alpha, const ScoreVector& residual_beta,
                          const TrustMatrix& trust_beta_alpha) {
  const DenseMatrix& t = trust_beta_alpha.values();
  if (residual_beta.size() != t.rows() || residual_alpha.size() != t.cols()) {
    std::ostringstream os;
    os << "initial score needs |residual_beta| == rows(tau) and |residual_alpha| == cols(tau); got "
       << residual_beta.size() << ", " << residual_alpha.size() << " against " << t.rows() << "x"
       << t.cols();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  std::vector<double> s0 = residual_alpha.values();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double feed = residual_beta[i];
    if (feed == 0.0) continue;
    auto row = t.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) s0[j] += feed * row[j];
  }
  return ScoreVector(residual_alpha.layer(), ScoreKind::kInitialSocial, std::move(s0),
                     residual_alpha.size());
}

std::vector<double> propagate_step(std::span<const double> scores, const TrustMatrix& trust,
                                   double damping) {
  const DenseMatrix& t = trust.values();
  if (scores.size() != t.rows() || t.rows() != t.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "score vector of length " + std::to_string(scores.size()) + " against " +
                    std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + " trust");
  }
  std::vector<double> next(t.cols(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double s = scores[i];
    if (s == 0.0) continue;
    auto row = t.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) next[j] += s * row[j];
  }
  if (damping != 1.0) {
    for (std::size_t j = 0; j < next.size(); ++j) {
      next[j] = damping * next[j] + (1.0 - damping) * scores[j];
    }
  }
  return next;
}

PropagationResult propagate(const ScoreVector& s0, const TrustMatrix& trust_alpha,
                            const ConvergenceConfig& config) {
  config.validate();
  const DenseMatrix& t = trust_alpha.values();
  if (s0.size() != t.rows() || t.rows() != t.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "propagation needs a square trust matrix matching the score length");
  }
  std::vector<double> current = s0.values();
  PropagationResult result{ScoreVector(s0.layer(), ScoreKind::kSocial, current, s0.size()), 0, false, {}};
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    std::vector<double> next = clamp_nonnegative(propagate_step(current, trust_alpha, config.damping));
    double delta = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      const double d = std::abs(next[j] - current[j]);
      delta = config.norm == ConvergenceNorm::kMaxAbs ? std::max(delta, d) : delta + d;
    }
    result.deltas.push_back(delta);
    result.iterations = it;
    current = std::move(next);
    if (delta <= config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.scores = ScoreVector(s0.layer(), ScoreKind::kSocial, std::move(current), s0.size());
  return result;
}

ScoreVector closed_form_score(const ScoreVector& s0, const TrustMatrix& trust_alpha,
                              std::size_t r, double damping) {
  const DenseMatrix& t = trust_alpha.values();
  if (s0.size() != t.rows() || t.rows() != t.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "closed form needs a square trust matrix matching the score length");
  }
  const std::size_t n = t.rows();
  DenseMatrix step = t;
  if (damping != 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        step(i, j) = damping * t(i, j) + (i == j ? 1.0 - damping : 0.0);
      }
    }
  }
  DenseMatrix power = identity(n);
  DenseMatrix base = step;
  for (std::size_t e = r; e > 0; e >>= 1) {
    if (e & 1U) power = multiply(power, base);
    if (e > 1) base = multiply(base, base);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += s0[i] * power(i, j);
  }
  return ScoreVector(s0.layer(), ScoreKind::kSocial, clamp_nonnegative(std::move(out)), n);
}

std::array<LayerScore, 3> score_network(const TrustSet& trust, const ScoringOptions& options) {
  std::array<ScoreVector, 3> residuals = {
      ScoreVector(LayerId::kHospital, ScoreKind::kResidual, {}, 0),
      ScoreVector(LayerId::kDepartment, ScoreKind::kResidual, {}, 0),
      ScoreVector(LayerId::kDoctor, ScoreKind::kResidual, {}, 0)};
  for (LayerId layer : kAllLayers) {
    const std::size_t n = trust.intra(layer).values().rows();
    const auto& cfg = options.residuals[layer_index(layer)];
    cfg.validate();
    if (n > 0) residuals[layer_index(layer)] = generate_residual(cfg, layer, n);
  }
  return score_network(trust, residuals, options);
}

std::array<LayerScore, 3> score_network(const TrustSet& trust,
                                        const std::array<ScoreVector, 3>& residuals,
                                        const ScoringOptions& options) {
  auto feed_of = [&options](LayerId layer) {
    switch (layer) {
      case LayerId::kHospital: return LayerId::kDepartment;
      case LayerId::kDoctor: return LayerId::kDepartment;
      case LayerId::kDepartment:
        return options.department_feed == DepartmentFeed::kHospital ? LayerId::kHospital
                                                                    : LayerId::kDoctor;
    }
    return LayerId::kDepartment;
  };
  auto run = [&](LayerId layer) {
    const LayerId feed = feed_of(layer);
    const ScoreVector& own = residuals[layer_index(layer)];
    ScoreVector s0 = initial_score(own, residuals[layer_index(feed)], trust.between(feed, layer));
    PropagationResult result = propagate(s0, trust.intra(layer), options.convergence);
    return LayerScore{layer, feed, own, std::move(s0), std::move(result)};
  };
  return {run(LayerId::kHospital), run(LayerId::kDepartment), run(LayerId::kDoctor)};
}

}  // namespace mltrust
