#include "lss/gp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lss {

void Dataset::validate() const {
  if (points.size() != values.size())
    throw DimensionError("dataset has " + std::to_string(points.size()) + " points but " +
                         std::to_string(values.size()) + " values");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw DomainError("dataset noise_std must be finite and >= 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != points[0].size())
      throw DimensionError("dataset point " + std::to_string(i) + " has a different dimension");
    if (!points[i].allFinite() || !std::isfinite(values[i]))
      throw DomainError("dataset row " + std::to_string(i) + " is not finite");
  }
}

double factorize_with_jitter(const Matrix& k, Eigen::LLT<Matrix>& out) {
  if (k.rows() == 0) {
    out.compute(k);
    return 0.0;
  }
  out.compute(k);
  if (out.info() == Eigen::Success) return 0.0;

  const double scale = std::max(k.diagonal().mean(), 1e-300);
  for (double rel = 1e-10; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
    Matrix loaded = k;
    loaded.diagonal().array() += rel * scale;
    out.compute(loaded);
    if (out.info() == Eigen::Success) return rel * scale;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed for a " << k.rows() << "x" << k.cols()
      << " kernel matrix even with jitter 1e-4 x mean diagonal (" << scale
      << "); the inputs are likely duplicated or the hyperparameters degenerate";
  throw NumericalError(msg.str());
}

GpModel::GpModel(Dataset data, KernelSpec kernel) : data_(std::move(data)), kernel_(std::move(kernel)) {
  kernel_.validate();
  data_.validate();
  if (!data_.empty() && data_.dim() != kernel_.input_dim())
    throw DimensionError("dataset dimension " + std::to_string(data_.dim()) +
                         " does not match kernel input dimension " +
                         std::to_string(kernel_.input_dim()));
  Matrix k = gram(kernel_, data_.points);
  k.diagonal().array() += data_.noise_std * data_.noise_std;
  jitter_ = factorize_with_jitter(k, factor_);
  alpha_ = data_.empty() ? Vector() : factor_.solve(data_.targets());
}

Vector GpModel::cross(const Eigen::Ref<const Vector>& x) const {
  Vector kx(static_cast<Eigen::Index>(data_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i)
    kx[static_cast<Eigen::Index>(i)] = detail::kernel_unchecked(kernel_, data_.points[i], x);
  return kx;
}

Prediction GpModel::predict(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim())
    throw DimensionError("predict: query dimension " + std::to_string(x.size()) +
                         " does not match model dimension " + std::to_string(input_dim()));
  const double prior = detail::kernel_unchecked(kernel_, x, x);
  if (data_.empty()) return {0.0, prior};
  const Vector kx = cross(x);
  const Vector v = factor_.matrixL().solve(kx);
  return {kx.dot(alpha_), std::max(0.0, prior - v.squaredNorm())};
}

std::vector<Prediction> GpModel::predict_batch(const Matrix& xs) const {
  if (static_cast<std::size_t>(xs.rows()) != input_dim())
    throw DimensionError("predict_batch: query dimension does not match model dimension");
  std::vector<Prediction> out(static_cast<std::size_t>(xs.cols()));
  if (data_.empty()) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j)
      out[static_cast<std::size_t>(j)] = {0.0, detail::kernel_unchecked(kernel_, xs.col(j), xs.col(j))};
    return out;
  }
  Matrix kxs(static_cast<Eigen::Index>(data_.size()), xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) kxs.col(j) = cross(xs.col(j));
  const Matrix v = factor_.matrixL().solve(kxs);
  const Vector means = kxs.transpose() * alpha_;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const double prior = detail::kernel_unchecked(kernel_, xs.col(j), xs.col(j));
    out[static_cast<std::size_t>(j)] = {means[j], std::max(0.0, prior - v.col(j).squaredNorm())};
  }
  return out;
}

double GpModel::covariance(const Vector& x, const Vector& x2) const {
  if (static_cast<std::size_t>(x.size()) != input_dim() || x.size() != x2.size())
    throw DimensionError("covariance: query dimension does not match model dimension");
  const double prior = detail::kernel_unchecked(kernel_, x, x2);
  if (data_.empty()) return prior;
  const Vector a = factor_.matrixL().solve(cross(x));
  const Vector b = factor_.matrixL().solve(cross(x2));
  return prior - a.dot(b);
}

GpModel posterior(const Dataset& data, const KernelSpec& kernel) { return GpModel(data, kernel); }

double log_marginal_likelihood(const Dataset& data, const KernelSpec& kernel) {
  if (data.empty()) throw DomainError("log_marginal_likelihood needs at least one observation");
  kernel.validate();
  data.validate();
  if (data.dim() != kernel.input_dim())
    throw DimensionError("log_marginal_likelihood: dataset/kernel dimension mismatch");
  Matrix k = gram(kernel, data.points);
  k.diagonal().array() += data.noise_std * data.noise_std;
  Eigen::LLT<Matrix> llt;
  factorize_with_jitter(k, llt);
  const Vector y = data.targets();
  const Vector alpha = llt.solve(y);
  const double n = static_cast<double>(data.size());
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * M_PI);
}

}  // namespace lss
