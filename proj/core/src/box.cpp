#include "oedda/box.hpp"

#include <cmath>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

Box Box::uniform(int n, double lo, double hi) {
  if (n < 1) throw DimensionError("box dimension must be positive");
  Box b{Vector::Constant(n, lo), Vector::Constant(n, hi)};
  b.validate();
  return b;
}

void Box::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("box bounds differ in length");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw DomainError("box bound " + std::to_string(i) + " has lower > upper");
    }
  }
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Vector Box::clip(const Vector& x) const {
  if (x.size() != lower.size()) throw DimensionError("point and box differ in dimension");
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace oedda
