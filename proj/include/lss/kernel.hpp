#ifndef LSS_KERNEL_HPP
#define LSS_KERNEL_HPP

#include <string>
#include <string_view>
#include <vector>

#include "lss/types.hpp"

namespace lss {

enum class KernelKind { SquaredExponential, Matern52, MultiLayerPerceptron };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// Covariance function with ARD scales.
///
/// SquaredExponential: variance * exp(-r / 2), r = sum_d (x_d - x'_d)^2 / l_d^2.
/// Matern52: variance * (1 + sqrt(5) s + 5 s^2 / 3) exp(-sqrt(5) s), s = sqrt(r).
/// MultiLayerPerceptron: (2 variance / pi) asin(u' W v / sqrt((u' W u + 1)(v' W v + 1)))
/// with u = [1, x], v = [1, x'] and W = diag(length_scales) (d + 1 entries).
struct KernelSpec {
  KernelKind kind = KernelKind::SquaredExponential;
  double variance = 1.0;
  Vector length_scales;

  /// Number of scale entries the kind needs for `input_dim` inputs.
  static std::size_t scale_count(KernelKind kind, std::size_t input_dim) {
    return kind == KernelKind::MultiLayerPerceptron ? input_dim + 1 : input_dim;
  }
  static KernelSpec isotropic(KernelKind kind, std::size_t input_dim, double variance = 1.0,
                              double scale = 1.0);

  std::size_t input_dim() const;
  /// Throws DomainError if a hyperparameter is non-positive or non-finite.
  void validate() const;
  /// 1 / l_d^2 for the stationary kinds; the Sigma^2 diagonal for MLP.
  Vector ard_weights() const;
};

/// Checked kernel evaluation.
double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2);

namespace detail {
double kernel_unchecked(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& x2);
}

/// Gram matrix K_ij = k(points[i], points[j]).
Matrix gram(const KernelSpec& spec, const std::vector<Vector>& points);

/// Derivatives of the Gram matrix with respect to log hyperparameters, in the
/// order [log variance, log length_scales...].
std::vector<Matrix> gram_log_gradients(const KernelSpec& spec, const std::vector<Vector>& points);

}  // namespace lss

#endif  // LSS_KERNEL_HPP
