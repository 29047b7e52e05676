#pragma once

#include "oedda/types.hpp"

namespace oedda {

/// Per-entry bound constraints lower <= x <= upper.
struct Box {
  Vector lower;
  Vector upper;

  static Box uniform(int n, double lo, double hi);

  int size() const { return static_cast<int>(lower.size()); }
  /// Throws DimensionError/DomainError unless the bounds are consistent.
  void validate() const;
  bool contains(const Vector& x) const;
  /// Componentwise projection onto the box.
  Vector clip(const Vector& x) const;
  Vector midpoint() const { return 0.5 * (lower + upper); }
};

}  // namespace oedda
