#ifndef LSS_TGMM_HPP
#define LSS_TGMM_HPP

#include <vector>

#include "lss/types.hpp"

namespace lss {

/// Mixture of axis-aligned truncated Gaussians on a box. Every component shares
/// the per-dimension variance vector.
struct Tgmm {
  Vector weights;
  std::vector<Vector> means;
  Vector variances;
  Box box;

  /// Throws unless weights form a distribution, means lie in the box and
  /// variances are positive.
  void validate() const;
};

/// One draw from N(mean, sd^2) truncated to [lo, hi]; mean must lie in [lo, hi].
double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng);

std::vector<Vector> sample_tgmm(std::size_t count, const Tgmm& mix, Rng& rng);

/// Mixture density at theta. Throws DomainError when theta is outside the box.
double tgmm_density(const Vector& theta, const Tgmm& mix);
double tgmm_log_density(const Vector& theta, const Tgmm& mix);

}  // namespace lss

#endif  // LSS_TGMM_HPP
