#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mltrust {

// The network always has exactly these three layers.
enum class LayerId { kHospital = 0, kDepartment = 1, kDoctor = 2 };

inline constexpr std::array<LayerId, 3> kAllLayers = {
    LayerId::kHospital, LayerId::kDepartment, LayerId::kDoctor};

constexpr std::size_t layer_index(LayerId layer) {
  return static_cast<std::size_t>(layer);
}

// Single-letter tag used in matrix names: h, d, p.
char layer_tag(LayerId layer);
std::string_view layer_name(LayerId layer);
// Accepts "hospital"/"department"/"doctor" or the single-letter tags.
std::optional<LayerId> parse_layer(std::string_view text);

// Row-major dense storage shared by adjacency blocks and trust matrices.
// Every consumer goes through rows()/cols()/operator()/row(), so a sparse
// backend can replace this type without touching the algorithms.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  DenseMatrix transposed() const;
  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Nodes of one layer in canonical (lexicographic) order, each with its
// attribute set. The parameter universe holds every admissible attribute id.
struct LayerGraph {
  LayerId layer = LayerId::kHospital;
  std::vector<std::string> node_ids;
  std::vector<std::set<std::string>> attributes;
  std::set<std::string> parameter_universe;

  std::size_t size() const noexcept { return node_ids.size(); }
  std::optional<std::size_t> index_of(std::string_view id) const;
};

// Raw non-negative edge weights between two layers (or within one).
struct AdjacencyBlock {
  LayerId rows = LayerId::kHospital;
  LayerId cols = LayerId::kHospital;
  DenseMatrix weights;

  bool is_intra_layer() const noexcept { return rows == cols; }
};

// Row-stochastic trust. Construction enforces: entries in [0, 1], every row
// sums to 1 within 1e-9 or is all zero, and intra-layer diagonals are zero.
class TrustMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  TrustMatrix(LayerId rows, LayerId cols, DenseMatrix values);

  LayerId row_layer() const noexcept { return rows_; }
  LayerId col_layer() const noexcept { return cols_; }
  bool is_intra_layer() const noexcept { return rows_ == cols_; }
  const DenseMatrix& values() const noexcept { return values_; }
  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }

  // "h", "d", "p" for intra-layer matrices, "hd", "dh", "dp", "pd" otherwise.
  std::string tag() const;

  // Empty when the matrix satisfies every invariant.
  static std::vector<std::string> check(LayerId rows, LayerId cols,
                                        const DenseMatrix& values);

 private:
  LayerId rows_;
  LayerId cols_;
  DenseMatrix values_;
};

std::string trust_tag(LayerId rows, LayerId cols);

enum class ScoreKind { kResidual, kSocial, kInitialSocial };

std::string_view score_kind_name(ScoreKind kind);

// Non-negative per-node scores of one layer. The constructor checks the
// length against the layer's node count.
class ScoreVector {
 public:
  ScoreVector(LayerId layer, ScoreKind kind, std::vector<double> values,
              std::size_t node_count);

  LayerId layer() const noexcept { return layer_; }
  ScoreKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  LayerId layer_;
  ScoreKind kind_;
  std::vector<double> values_;
};

struct MultiLayerNetwork {
  std::array<LayerGraph, 3> layers;
  std::array<AdjacencyBlock, 3> intra;
  AdjacencyBlock hospital_department;
  AdjacencyBlock department_doctor;

  const LayerGraph& layer(LayerId id) const { return layers[layer_index(id)]; }
  const AdjacencyBlock& intra_block(LayerId id) const {
    return intra[layer_index(id)];
  }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

// Lists every structural invariant the network breaks. Never throws.
ValidationReport validate_network(const MultiLayerNetwork& network);

// Same checks for a single block against expected dimensions.
void validate_block(const AdjacencyBlock& block, std::size_t expected_rows,
                    std::size_t expected_cols, ValidationReport& report);

}  // namespace mltrust
