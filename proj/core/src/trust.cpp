#include "mltrust/trust.hpp"

#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

DenseMatrix row_normalize(const DenseMatrix& weights) {
  DenseMatrix out(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    double sum = 0.0;
    for (double w : weights.row(i)) sum += w;
    if (sum == 0.0) continue;
    auto dst = out.row(i);
    auto src = weights.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] / sum;
  }
  return out;
}

}  // namespace

TrustMatrix derive_trust(const AdjacencyBlock& block) {
  return TrustMatrix(block.rows, block.cols, row_normalize(block.weights));
}

TrustMatrix derive_reverse_trust(const AdjacencyBlock& block) {
  if (block.is_intra_layer()) {
    throw Error(ErrorCode::kIntraLayerBlock,
                "reverse trust needs an inter-layer block, got " +
                    std::string(layer_name(block.rows)) + " x " +
                    std::string(layer_name(block.cols)));
  }
  return derive_trust(AdjacencyBlock{block.cols, block.rows, block.weights.transposed()});
}

std::vector<double> nonzero_trust_values(const TrustMatrix& matrix) {
  std::vector<double> out;
  for (double v : matrix.values().data()) {
    if (v > 0.0) out.push_back(v);
  }
  return out;
}

const std::vector<std::string>& TrustSet::canonical_tags() {
  static const std::vector<std::string> tags = {"h", "d", "p", "hd", "dh", "dp", "pd"};
  return tags;
}

void TrustSet::insert(TrustMatrix matrix) {
  const std::string tag = matrix.tag();
  by_tag_.insert_or_assign(tag, std::move(matrix));
}

const TrustMatrix& TrustSet::at(const std::string& tag) const {
  auto it = by_tag_.find(tag);
  if (it == by_tag_.end()) {
    throw Error(ErrorCode::kOutOfShape, "no trust matrix tagged '" + tag + "'");
  }
  return it->second;
}

const TrustMatrix& TrustSet::intra(LayerId layer) const { return at(trust_tag(layer, layer)); }

const TrustMatrix& TrustSet::between(LayerId rows, LayerId cols) const {
  return at(trust_tag(rows, cols));
}

std::vector<TrustMatrix> TrustSet::ordered() const {
  std::vector<TrustMatrix> out;
  for (const auto& tag : canonical_tags()) {
    if (auto it = by_tag_.find(tag); it != by_tag_.end()) out.push_back(it->second);
  }
  return out;
}

TrustSet derive_all_trust(const MultiLayerNetwork& network) {
  TrustSet set;
  for (LayerId layer : kAllLayers) set.insert(derive_trust(network.intra_block(layer)));
  set.insert(derive_trust(network.hospital_department));
  set.insert(derive_reverse_trust(network.hospital_department));
  set.insert(derive_trust(network.department_doctor));
  set.insert(derive_reverse_trust(network.department_doctor));
  return set;
}

}  // namespace mltrust
