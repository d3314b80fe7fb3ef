#ifndef LSS_DIVERSITY_HPP
#define LSS_DIVERSITY_HPP

#include <vector>

#include <Eigen/Cholesky>

#include "lss/types.hpp"

namespace lss {

/// Unit-variance squared exponential xi(a, b) = exp(-sum_d (l_d (a_d - b_d))^2).
struct DiversityKernel {
  Vector inverse_length_scales;
  double noise = 0.1;
  /// Smallest value an inverse length scale is allowed to shrink to.
  double floor = 1e-3;

  static DiversityKernel unit(std::size_t dim, double noise = 0.1);
  std::size_t dim() const { return static_cast<std::size_t>(inverse_length_scales.size()); }
  void validate() const;
  double operator()(const Vector& a, const Vector& b) const;
  /// Kernel restricted to coordinate d.
  double coordinate(double a, double b, std::size_t d) const;
};

/// log det(Xi / noise^2 + I); zero for an empty set.
double diversity(const std::vector<Vector>& samples, const DiversityKernel& kernel);

/// Previously yielded samples S with a cached factor of Xi^S + noise^2 I.
class SelectionHistory {
 public:
  explicit SelectionHistory(DiversityKernel kernel) : kernel_(std::move(kernel)) { kernel_.validate(); }

  const std::vector<Vector>& chosen() const { return chosen_; }
  std::size_t size() const { return chosen_.size(); }
  bool empty() const { return chosen_.empty(); }
  const DiversityKernel& kernel() const { return kernel_; }

  void add(const Vector& theta);
  void clear();
  /// Swaps the kernel and invalidates the cached factor.
  void set_kernel(DiversityKernel kernel);

  /// eta_S(theta) = 1 - xi_S(theta)^T (Xi^S + noise^2 I)^-1 xi_S(theta).
  double eta(const Vector& theta) const;
  /// Per-coordinate conditional variances tau(d) sharing the full-kernel factor.
  Vector feature_importance(const Vector& theta) const;

  /// How many Gram factorizations have been computed so far.
  std::size_t factorizations() const { return factorizations_; }

 private:
  const Eigen::LLT<Matrix>& factor() const;

  DiversityKernel kernel_;
  std::vector<Vector> chosen_;
  mutable Eigen::LLT<Matrix> factor_;
  mutable bool factor_valid_ = false;
  mutable std::size_t factorizations_ = 0;
};

/// eta for a history.
inline double eta(const SelectionHistory& history, const Vector& theta) { return history.eta(theta); }

/// tau(d) for one coordinate.
double feature_importance(const SelectionHistory& history, const Vector& theta, std::size_t d);

/// Shrinks the inverse length scale of the most important coordinate of a
/// rejected sample by (1 - epsilon), floored. Requires a non-empty history.
/// Returns the updated kernel and reports the chosen coordinate.
DiversityKernel kernel_update(const DiversityKernel& kernel, const SelectionHistory& history,
                              const Vector& theta_failed, double epsilon, std::size_t* chosen = nullptr);

}  // namespace lss

#endif  // LSS_DIVERSITY_HPP
