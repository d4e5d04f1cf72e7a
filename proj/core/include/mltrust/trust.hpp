#pragma once

#include <map>
#include <string>
#include <vector>

#include "mltrust/model.hpp"

namespace mltrust {

// Row-normalizes a block: each row is divided by its own sum, all-zero rows
// stay zero.
TrustMatrix derive_trust(const AdjacencyBlock& block);

// Trust in the opposite direction of an inter-layer block, i.e. the
// row-normalized transpose. Throws IntraLayerBlock for intra-layer input.
TrustMatrix derive_reverse_trust(const AdjacencyBlock& block);

// Strictly positive entries in row-major order.
std::vector<double> nonzero_trust_values(const TrustMatrix& matrix);

// The seven trust matrices of a network, keyed by tag
// (h, d, p, hd, dh, dp, pd).
class TrustSet {
 public:
  static const std::vector<std::string>& canonical_tags();

  void insert(TrustMatrix matrix);
  bool contains(const std::string& tag) const { return by_tag_.contains(tag); }
  const TrustMatrix& at(const std::string& tag) const;
  const TrustMatrix& intra(LayerId layer) const;
  const TrustMatrix& between(LayerId rows, LayerId cols) const;

  // Present matrices in canonical tag order.
  std::vector<TrustMatrix> ordered() const;

 private:
  std::map<std::string, TrustMatrix> by_tag_;
};

TrustSet derive_all_trust(const MultiLayerNetwork& network);

}  // namespace mltrust
