#include "lss/diversity.hpp"

#include <algorithm>
#include <cmath>

namespace lss {

DiversityKernel DiversityKernel::unit(std::size_t dim, double noise) {
  DiversityKernel k;
  k.inverse_length_scales = Vector::Ones(static_cast<Eigen::Index>(dim));
  k.noise = noise;
  return k;
}

void DiversityKernel::validate() const {
  if (!(noise > 0.0)) throw DomainError("diversity kernel noise must be positive");
  if ((inverse_length_scales.array() < 0.0).any() || !inverse_length_scales.allFinite())
    throw DomainError("inverse length scales must be finite and >= 0");
}

double DiversityKernel::operator()(const Vector& a, const Vector& b) const {
  double r = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double t = inverse_length_scales[d] * (a[d] - b[d]);
    r += t * t;
  }
  return std::exp(-r);
}

double DiversityKernel::coordinate(double a, double b, std::size_t d) const {
  const double t = inverse_length_scales[static_cast<Eigen::Index>(d)] * (a - b);
  return std::exp(-t * t);
}

namespace {

Matrix diversity_gram(const std::vector<Vector>& s, const DiversityKernel& k) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j)
      g(i, j) = g(j, i) = k(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
  }
  return g;
}

}  // namespace

double diversity(const std::vector<Vector>& samples, const DiversityKernel& kernel) {
  kernel.validate();
  if (samples.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(samples.size());
  Matrix m = diversity_gram(samples, kernel) / (kernel.noise * kernel.noise);
  m += Matrix::Identity(n, n);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("diversity: Gram factorization failed");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void SelectionHistory::add(const Vector& theta) {
  if (kernel_.dim() != static_cast<std::size_t>(theta.size()))
    throw DimensionError("SelectionHistory: sample dimension does not match the kernel");
  chosen_.push_back(theta);
  factor_valid_ = false;
}

void SelectionHistory::clear() {
  chosen_.clear();
  factor_valid_ = false;
}

void SelectionHistory::set_kernel(DiversityKernel kernel) {
  kernel.validate();
  kernel_ = std::move(kernel);
  factor_valid_ = false;
}

const Eigen::LLT<Matrix>& SelectionHistory::factor() const {
  if (!factor_valid_) {
    Matrix g = diversity_gram(chosen_, kernel_);
    g.diagonal().array() += kernel_.noise * kernel_.noise;
    factor_.compute(g);
    if (factor_.info() != Eigen::Success) throw NumericalError("SelectionHistory: Gram factorization failed");
    factor_valid_ = true;
    ++factorizations_;
  }
  return factor_;
}

double SelectionHistory::eta(const Vector& theta) const {
  if (chosen_.empty()) return 1.0;
  Vector k(static_cast<Eigen::Index>(chosen_.size()));
  for (std::size_t i = 0; i < chosen_.size(); ++i) k[static_cast<Eigen::Index>(i)] = kernel_(theta, chosen_[i]);
  const Vector v = factor().matrixL().solve(k);
  return 1.0 - v.squaredNorm();
}

Vector SelectionHistory::feature_importance(const Vector& theta) const {
  const auto dims = static_cast<Eigen::Index>(kernel_.dim());
  if (theta.size() != dims) throw DimensionError("feature_importance: dimension mismatch");
  if (chosen_.empty()) return Vector::Ones(dims);
  const auto n = static_cast<Eigen::Index>(chosen_.size());
  Matrix k(n, dims);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dims; ++d)
      k(i, d) = kernel_.coordinate(theta[d], chosen_[static_cast<std::size_t>(i)][d], static_cast<std::size_t>(d));
  const Matrix v = factor().matrixL().solve(k);
  return (1.0 - v.colwise().squaredNorm().array()).matrix().transpose();
}

double feature_importance(const SelectionHistory& history, const Vector& theta, std::size_t d) {
  if (d >= history.kernel().dim()) throw DimensionError("feature_importance: coordinate out of range");
  return history.feature_importance(theta)[static_cast<Eigen::Index>(d)];
}

DiversityKernel kernel_update(const DiversityKernel& kernel, const SelectionHistory& history,
                              const Vector& theta_failed, double epsilon, std::size_t* chosen) {
  if (history.empty()) throw DomainError("kernel_update needs at least one earlier sample");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("kernel_update: epsilon must lie in [0, 1)");
  SelectionHistory h = history;
  h.set_kernel(kernel);
  const Vector tau = h.feature_importance(theta_failed);
  Eigen::Index best = 0;
  for (Eigen::Index d = 1; d < tau.size(); ++d)
    if (tau[d] > tau[best]) best = d;
  DiversityKernel out = kernel;
  const double current = kernel.inverse_length_scales[best];
  out.inverse_length_scales[best] = std::min(current, std::max(kernel.floor, (1.0 - epsilon) * current));
  if (chosen) *chosen = static_cast<std::size_t>(best);
  return out;
}

}  // namespace lss
