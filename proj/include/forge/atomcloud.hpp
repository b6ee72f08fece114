#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace forge {

// Finitely supported probability distribution on points of d-dimensional
// real space.
struct AtomCloud {
  int d = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> probs;

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.size() != probs.size())
      throw std::invalid_argument("AtomCloud: point/probability count mismatch");
    if (points.empty()) throw std::invalid_argument("AtomCloud: empty cloud");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("AtomCloud: negative probability");
      total += p;
    }
    if (total < 1.0 - 1e-12 || total > 1.0 + 1e-12)
      throw std::invalid_argument("AtomCloud: probabilities must sum to 1");
    for (const auto& pt : points)
      if (static_cast<int>(pt.size()) != d)
        throw std::invalid_argument("AtomCloud: point dimension mismatch");
  }
};

}  // namespace forge
