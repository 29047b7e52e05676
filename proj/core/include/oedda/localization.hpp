/**
 * @file localization.hpp
 * @brief Distance-based localization kernels and their radius derivatives.
 *
 * Two kernel families are provided:
 *   - Gauss: rho(d; L) = exp(-d^2 / (2 L^2))
 *   - Gaspari-Cohn (GC): fifth-order piecewise rational function with compact
 *     support 2L.
 *
 * Space-dependent radii are handled with the symmetrized kernel
 * C_ij = (rho(d_ij; l_i) + rho(d_ij; l_j)) / 2 in both state and observation
 * space, while the observation-to-state kernel uses the radius attached to the
 * observation row.
 */
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "oedda/types.hpp"

namespace oedda {

enum class KernelFamily { Gauss, GaspariCohn };

KernelFamily parse_kernel_family(std::string_view name);
std::string_view to_string(KernelFamily family);

/// Periodic ring distance d(i, j) = spacing * min(|i - j|, n - |i - j|).
class DistanceMetric {
 public:
  explicit DistanceMetric(int grid_size, double spacing = 1.0);

  int grid_size() const { return grid_size_; }
  double spacing() const { return spacing_; }
  double operator()(int i, int j) const;

 private:
  int grid_size_;
  double spacing_;
};

double kernel_value(KernelFamily family, double d, double radius);

/// d rho(d; L) / dL. At a GC branch point the lower branch is used.
double kernel_dvalue_dL(KernelFamily family, double d, double radius);

/// Symmetrized state-space kernel; `radii` has one entry per grid point.
Matrix assemble_state_kernel(const DistanceMetric& metric, KernelFamily family, const Vector& radii);

/// Rows of radius derivatives: D(i, j) = d rho(d(i, j); l_i) / d l_i.
Matrix state_kernel_radius_derivatives(const DistanceMetric& metric, KernelFamily family, const Vector& radii);

struct ObservationKernels {
  Matrix obs_state;  ///< C^{loc,1}, Nobs x Nstate
  Matrix obs_obs;    ///< C^{loc,2}, Nobs x Nobs, symmetrized
};

/// Kernels for observation-space localization. `obs_radii` holds one radius
/// per observation and `obs_grid_index` the grid point each observation sits on.
ObservationKernels assemble_obs_kernels(const DistanceMetric& metric, KernelFamily family, const Vector& obs_radii,
                                        std::span<const int> obs_grid_index);

struct ObservationKernelDerivatives {
  Matrix obs_state;  ///< D1(i, j) = d rho(d(g_i, j); l_i) / d l_i
  Matrix obs_obs;    ///< D2(i, k) = d rho(d(g_i, g_k); l_i) / d l_i
};

ObservationKernelDerivatives obs_kernel_radius_derivatives(const DistanceMetric& metric, KernelFamily family,
                                                           const Vector& obs_radii,
                                                           std::span<const int> obs_grid_index);

/// Attaches to each observation the radius of the grid point it sits on.
Vector project_radii_to_observations(const Vector& state_radii, std::span<const int> obs_grid_index);

/// Validates 0 < lower <= radii <= upper; throws DomainError otherwise.
void validate_radii(const Vector& radii, const Vector& lower, const Vector& upper);

}  // namespace oedda
