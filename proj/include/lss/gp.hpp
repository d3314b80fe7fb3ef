#ifndef LSS_GP_HPP
#define LSS_GP_HPP

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>

#include "lss/kernel.hpp"
#include "lss/types.hpp"

namespace lss {

/// Observations <x_t, y_t> of a score function, x_t = [theta, alpha] normalized.
struct Dataset {
  std::vector<Vector> points;
  std::vector<double> values;
  double noise_std = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  /// Input dimension, 0 when empty.
  std::size_t dim() const { return points.empty() ? 0 : static_cast<std::size_t>(points[0].size()); }

  void add(Vector x, double y) {
    points.push_back(std::move(x));
    values.push_back(y);
  }
  /// Throws if sizes disagree, dimensions are mixed, values are not finite, or noise < 0.
  void validate() const;
  Vector targets() const { return to_vector(values); }
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  double stddev() const { return std::sqrt(variance); }
};

/// Posterior Gaussian process with a zero prior mean. Immutable once built.
class GpModel {
 public:
  /// Builds the posterior; an empty dataset yields the prior.
  GpModel(Dataset data, KernelSpec kernel);

  const Dataset& data() const { return data_; }
  const KernelSpec& kernel() const { return kernel_; }
  std::size_t input_dim() const { return kernel_.input_dim(); }
  /// Diagonal jitter that was needed to factorize K + noise^2 I.
  double jitter() const { return jitter_; }

  Prediction predict(const Vector& x) const;
  /// Predictions for the columns of `xs` (one query per column).
  std::vector<Prediction> predict_batch(const Matrix& xs) const;
  /// Full posterior covariance between two query points.
  double covariance(const Vector& x, const Vector& x2) const;

 private:
  Vector cross(const Eigen::Ref<const Vector>& x) const;

  Dataset data_;
  KernelSpec kernel_;
  Eigen::LLT<Matrix> factor_;
  Vector alpha_;
  double jitter_ = 0.0;
};

GpModel posterior(const Dataset& data, const KernelSpec& kernel);

/// Cholesky of `k`, loading the diagonal only if needed: first as given, then
/// with jitter 1e-10 * mean diagonal growing x10 up to 1e-4 * mean diagonal.
/// Returns the jitter used; throws NumericalError when every level fails.
double factorize_with_jitter(const Matrix& k, Eigen::LLT<Matrix>& out);

/// Gaussian evidence log p(y | X, kernel, noise).
double log_marginal_likelihood(const Dataset& data, const KernelSpec& kernel);

}  // namespace lss

#endif  // LSS_GP_HPP
