#include "oedda/localization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

void require_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("localization radius must be finite and positive, got " + std::to_string(radius));
  }
}

void require_distance(double d) {
  if (!(d >= 0.0)) throw DomainError("distance must be non-negative");
}

void check_obs_layout(const DistanceMetric& metric, const Vector& obs_radii, std::span<const int> obs_grid_index) {
  if (static_cast<Eigen::Index>(obs_grid_index.size()) != obs_radii.size()) {
    throw DimensionError("one radius per observation is required");
  }
  for (int g : obs_grid_index) {
    if (g < 0 || g >= metric.grid_size()) {
      throw DomainError("observation is not associated with a model grid point (index " + std::to_string(g) + ")");
    }
  }
}

}  // namespace

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gauss" || name == "Gauss") return KernelFamily::Gauss;
  if (name == "gc" || name == "GC" || name == "gaspari-cohn") return KernelFamily::GaspariCohn;
  throw ConfigError("unknown localization kernel '" + std::string(name) + "' (expected gauss or gc)");
}

std::string_view to_string(KernelFamily family) { return family == KernelFamily::Gauss ? "gauss" : "gc"; }

DistanceMetric::DistanceMetric(int grid_size, double spacing) : grid_size_(grid_size), spacing_(spacing) {
  if (grid_size_ < 1) throw DomainError("distance metric needs a positive grid size");
  if (!(spacing_ > 0.0)) throw DomainError("grid spacing must be positive");
}

double DistanceMetric::operator()(int i, int j) const {
  const int diff = std::abs(i - j) % grid_size_;
  return spacing_ * std::min(diff, grid_size_ - diff);
}

double kernel_value(KernelFamily family, double d, double radius) {
  require_radius(radius);
  require_distance(d);
  if (family == KernelFamily::Gauss) return std::exp(-d * d / (2.0 * radius * radius));

  const double r = d / radius;
  if (r <= 1.0) {
    return (((-0.25 * r + 0.5) * r + 0.625) * r - 5.0 / 3.0) * r * r + 1.0;
  }
  if (r < 2.0) {
    // The polynomial vanishes at r = 2; clamp rounding noise near the support edge.
    return std::max(0.0, ((((r / 12.0 - 0.5) * r + 0.625) * r + 5.0 / 3.0) * r - 5.0) * r + 4.0 - 2.0 / (3.0 * r));
  }
  return 0.0;
}

double kernel_dvalue_dL(KernelFamily family, double d, double radius) {
  require_radius(radius);
  require_distance(d);
  if (d == 0.0) return 0.0;
  if (family == KernelFamily::Gauss) {
    return d * d / (radius * radius * radius) * std::exp(-d * d / (2.0 * radius * radius));
  }

  // drho/dL = -(r / L) drho/dr with r = d / L.
  const double r = d / radius;
  if (r <= 1.0) {
    const double r2 = r * r;
    return (1.25 * r2 * r2 * r - 2.0 * r2 * r2 - 1.875 * r2 * r + (10.0 / 3.0) * r2) / radius;
  }
  if (r <= 2.0) {
    const double r2 = r * r;
    return (-(5.0 / 12.0) * r2 * r2 * r + 2.0 * r2 * r2 - 1.875 * r2 * r - (10.0 / 3.0) * r2 + 5.0 * r -
            2.0 / (3.0 * r)) /
           radius;
  }
  return 0.0;
}

Matrix assemble_state_kernel(const DistanceMetric& metric, KernelFamily family, const Vector& radii) {
  const int n = metric.grid_size();
  if (radii.size() != n) throw DimensionError("state kernel needs one radius per grid point");
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = metric(i, j);
      const double v = 0.5 * (kernel_value(family, d, radii[i]) + kernel_value(family, d, radii[j]));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Matrix state_kernel_radius_derivatives(const DistanceMetric& metric, KernelFamily family, const Vector& radii) {
  const int n = metric.grid_size();
  if (radii.size() != n) throw DimensionError("state kernel needs one radius per grid point");
  Matrix dl(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dl(i, j) = kernel_dvalue_dL(family, metric(i, j), radii[i]);
  }
  return dl;
}

ObservationKernels assemble_obs_kernels(const DistanceMetric& metric, KernelFamily family, const Vector& obs_radii,
                                        std::span<const int> obs_grid_index) {
  check_obs_layout(metric, obs_radii, obs_grid_index);
  const int m = static_cast<int>(obs_radii.size());
  const int n = metric.grid_size();
  ObservationKernels out{Matrix(m, n), Matrix(m, m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) out.obs_state(i, j) = kernel_value(family, metric(obs_grid_index[i], j), obs_radii[i]);
  }
  for (int i = 0; i < m; ++i) {
    out.obs_obs(i, i) = 1.0;
    for (int k = i + 1; k < m; ++k) {
      const double d = metric(obs_grid_index[i], obs_grid_index[k]);
      const double v = 0.5 * (kernel_value(family, d, obs_radii[i]) + kernel_value(family, d, obs_radii[k]));
      out.obs_obs(i, k) = v;
      out.obs_obs(k, i) = v;
    }
  }
  return out;
}

ObservationKernelDerivatives obs_kernel_radius_derivatives(const DistanceMetric& metric, KernelFamily family,
                                                           const Vector& obs_radii,
                                                           std::span<const int> obs_grid_index) {
  check_obs_layout(metric, obs_radii, obs_grid_index);
  const int m = static_cast<int>(obs_radii.size());
  const int n = metric.grid_size();
  ObservationKernelDerivatives out{Matrix(m, n), Matrix(m, m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      out.obs_state(i, j) = kernel_dvalue_dL(family, metric(obs_grid_index[i], j), obs_radii[i]);
    }
    for (int k = 0; k < m; ++k) {
      out.obs_obs(i, k) = kernel_dvalue_dL(family, metric(obs_grid_index[i], obs_grid_index[k]), obs_radii[i]);
    }
  }
  return out;
}

Vector project_radii_to_observations(const Vector& state_radii, std::span<const int> obs_grid_index) {
  Vector out(static_cast<Eigen::Index>(obs_grid_index.size()));
  for (std::size_t i = 0; i < obs_grid_index.size(); ++i) {
    const int g = obs_grid_index[i];
    if (g < 0 || g >= state_radii.size()) throw DomainError("observation is not associated with a model grid point");
    out[static_cast<Eigen::Index>(i)] = state_radii[g];
  }
  return out;
}

void validate_radii(const Vector& radii, const Vector& lower, const Vector& upper) {
  if (radii.size() != lower.size() || radii.size() != upper.size()) {
    throw DimensionError("radius field and its bounds differ in length");
  }
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    if (!(lower[i] > 0.0) || !(lower[i] <= radii[i]) || !(radii[i] <= upper[i])) {
      throw DomainError("localization radius " + std::to_string(i) + " violates 0 < lower <= radius <= upper");
    }
  }
}

}  // namespace oedda
