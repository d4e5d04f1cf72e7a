#include "mltrust/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mltrust/errors.hpp"

namespace mltrust {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kUnknownLayer: return "UnknownLayer";
    case ErrorCode::kUnsupportedLayerPair: return "UnsupportedLayerPair";
    case ErrorCode::kNegativePriority: return "NegativePriority";
    case ErrorCode::kIntraLayerBlock: return "IntraLayerBlock";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kIdUniverseMismatch: return "IdUniverseMismatch";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kOutOfShape: return "OutOfShape";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaVersion: return "SchemaVersion";
  }
  return "Unknown";
}

char layer_tag(LayerId layer) {
  switch (layer) {
    case LayerId::kHospital: return 'h';
    case LayerId::kDepartment: return 'd';
    case LayerId::kDoctor: return 'p';
  }
  throw Error(ErrorCode::kUnknownLayer, "invalid layer value");
}

std::string_view layer_name(LayerId layer) {
  switch (layer) {
    case LayerId::kHospital: return "hospital";
    case LayerId::kDepartment: return "department";
    case LayerId::kDoctor: return "doctor";
  }
  throw Error(ErrorCode::kUnknownLayer, "invalid layer value");
}

std::optional<LayerId> parse_layer(std::string_view text) {
  for (LayerId layer : kAllLayers) {
    if (text == layer_name(layer) || (text.size() == 1 && text[0] == layer_tag(layer))) {
      return layer;
    }
  }
  return std::nullopt;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged rows in matrix literal");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

std::vector<std::vector<double>> DenseMatrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

std::optional<std::size_t> LayerGraph::index_of(std::string_view id) const {
  auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
  if (it == node_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - node_ids.begin());
}

std::string trust_tag(LayerId rows, LayerId cols) {
  std::string tag(1, layer_tag(rows));
  if (rows != cols) tag += layer_tag(cols);
  return tag;
}

std::vector<std::string> TrustMatrix::check(LayerId rows, LayerId cols,
                                            const DenseMatrix& values) {
  std::vector<std::string> problems;
  const std::string tag = trust_tag(rows, cols);
  if (rows == cols && values.rows() != values.cols()) {
    problems.push_back("tau^[" + tag + "] is not square");
    return problems;
  }
  for (std::size_t i = 0; i < values.rows(); ++i) {
    double sum = 0.0;
    double max = 0.0;
    for (std::size_t j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kRowSumTolerance) {
        std::ostringstream os;
        os << "tau^[" << tag << "](" << i << "," << j << ") = " << v
           << " outside [0,1]";
        problems.push_back(os.str());
      }
      sum += v;
      max = std::max(max, v);
    }
    if (max != 0.0 && std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os << "tau^[" << tag << "] row " << i << " sums to " << sum;
      problems.push_back(os.str());
    }
    if (rows == cols && values(i, i) != 0.0) {
      std::ostringstream os;
      os << "tau^[" << tag << "] diagonal (" << i << "," << i << ") is nonzero";
      problems.push_back(os.str());
    }
  }
  return problems;
}

TrustMatrix::TrustMatrix(LayerId rows, LayerId cols, DenseMatrix values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  auto problems = check(rows_, cols_, values_);
  if (!problems.empty()) {
    throw Error(ErrorCode::kInvariantViolation, problems.front());
  }
}

std::string TrustMatrix::tag() const { return trust_tag(rows_, cols_); }

std::string_view score_kind_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kResidual: return "residual";
    case ScoreKind::kSocial: return "social";
    case ScoreKind::kInitialSocial: return "initial";
  }
  return "unknown";
}

ScoreVector::ScoreVector(LayerId layer, ScoreKind kind, std::vector<double> values,
                         std::size_t node_count)
    : layer_(layer), kind_(kind), values_(std::move(values)) {
  if (values_.size() != node_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(layer_name(layer)) + " score vector has " +
                    std::to_string(values_.size()) + " entries, layer has " +
                    std::to_string(node_count) + " nodes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw Error(ErrorCode::kInvariantViolation,
                  "score entry " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

void validate_block(const AdjacencyBlock& block, std::size_t expected_rows,
                    std::size_t expected_cols, ValidationReport& report) {
  const std::string name = "A^[" + trust_tag(block.rows, block.cols) + "]";
  const DenseMatrix& w = block.weights;
  if (w.rows() != expected_rows || w.cols() != expected_cols) {
    std::ostringstream os;
    os << name << " has shape " << w.rows() << "x" << w.cols() << ", expected "
       << expected_rows << "x" << expected_cols;
    report.violations.push_back(os.str());
    return;
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
        std::ostringstream os;
        os << name << "(" << i << "," << j << ") = " << w(i, j) << " is negative";
        report.violations.push_back(os.str());
      }
    }
  }
  if (!block.is_intra_layer()) return;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) {
      std::ostringstream os;
      os << name << " diagonal (" << i << "," << i << ") = " << w(i, i);
      report.violations.push_back(os.str());
    }
    for (std::size_t j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != w(j, i)) {
        std::ostringstream os;
        os << name << " asymmetric: (" << i << "," << j << ") = " << w(i, j) << " but ("
           << j << "," << i << ") = " << w(j, i);
        report.violations.push_back(os.str());
      }
    }
  }
}

ValidationReport validate_network(const MultiLayerNetwork& network) {
  ValidationReport report;
  for (LayerId id : kAllLayers) {
    const LayerGraph& g = network.layer(id);
    const std::string name(layer_name(id));
    if (g.layer != id) {
      report.violations.push_back(name + " layer slot holds a different layer");
    }
    if (g.attributes.size() != g.node_ids.size()) {
      report.violations.push_back(name + " layer attribute list length differs from node count");
    }
    for (std::size_t i = 1; i < g.node_ids.size(); ++i) {
      if (g.node_ids[i - 1] == g.node_ids[i]) {
        report.violations.push_back(name + " layer has duplicate node id " + g.node_ids[i]);
      } else if (g.node_ids[i - 1] > g.node_ids[i]) {
        report.violations.push_back(name + " layer node ids are not in canonical order");
      }
    }
    for (std::size_t i = 0; i < g.attributes.size(); ++i) {
      for (const auto& attr : g.attributes[i]) {
        if (!g.parameter_universe.contains(attr)) {
          report.violations.push_back(name + " node " +
                                      (i < g.node_ids.size() ? g.node_ids[i] : "?") +
                                      " has attribute " + attr +
                                      " outside the parameter universe");
        }
      }
    }
    const AdjacencyBlock& block = network.intra_block(id);
    if (block.rows != id || block.cols != id) {
      report.violations.push_back(name + " intra block is labelled with the wrong layers");
    }
    validate_block(block, g.size(), g.size(), report);
  }
  const auto& hd = network.hospital_department;
  if (hd.rows != LayerId::kHospital || hd.cols != LayerId::kDepartment) {
    report.violations.push_back("hospital-department block is labelled with the wrong layers");
  }
  validate_block(hd, network.layer(LayerId::kHospital).size(),
                 network.layer(LayerId::kDepartment).size(), report);
  const auto& dp = network.department_doctor;
  if (dp.rows != LayerId::kDepartment || dp.cols != LayerId::kDoctor) {
    report.violations.push_back("department-doctor block is labelled with the wrong layers");
  }
  validate_block(dp, network.layer(LayerId::kDepartment).size(),
                 network.layer(LayerId::kDoctor).size(), report);
  return report;
}

}  // namespace mltrust
