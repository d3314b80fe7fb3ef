#include "lss/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace lss {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

double scaled_sq_dist(const Vector& ls, const Eigen::Ref<const Vector>& x,
                      const Eigen::Ref<const Vector>& x2) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = (x[i] - x2[i]) / ls[i];
    r += t * t;
  }
  return r;
}

struct MlpTerms {
  double dot, norm_x, norm_x2;
};

MlpTerms mlp_terms(const Vector& w, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& x2) {
  const Eigen::Index d = x.size();
  double dot = w[0];
  double nx = w[0] + 1.0;
  double nx2 = w[0] + 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    dot += w[i + 1] * x[i] * x2[i];
    nx += w[i + 1] * x[i] * x[i];
    nx2 += w[i + 1] * x2[i] * x2[i];
  }
  return {dot, nx, nx2};
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::SquaredExponential: return "se";
    case KernelKind::Matern52: return "matern52";
    case KernelKind::MultiLayerPerceptron: return "mlp";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "se" || name == "rbf" || name == "squared_exponential")
    return KernelKind::SquaredExponential;
  if (name == "matern52" || name == "matern") return KernelKind::Matern52;
  if (name == "mlp" || name == "nn") return KernelKind::MultiLayerPerceptron;
  throw DomainError("unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec KernelSpec::isotropic(KernelKind kind, std::size_t input_dim, double variance,
                                 double scale) {
  KernelSpec spec;
  spec.kind = kind;
  spec.variance = variance;
  spec.length_scales =
      Vector::Constant(static_cast<Eigen::Index>(scale_count(kind, input_dim)), scale);
  return spec;
}

std::size_t KernelSpec::input_dim() const {
  const auto n = static_cast<std::size_t>(length_scales.size());
  return kind == KernelKind::MultiLayerPerceptron ? (n == 0 ? 0 : n - 1) : n;
}

void KernelSpec::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DomainError("kernel variance must be positive and finite");
  if (length_scales.size() == 0) throw DomainError("kernel needs at least one scale entry");
  if (!(length_scales.array() > 0.0).all() || !length_scales.allFinite())
    throw DomainError("kernel scale entries must be positive and finite");
}

Vector KernelSpec::ard_weights() const {
  if (kind == KernelKind::MultiLayerPerceptron) return length_scales;
  return length_scales.array().square().inverse().matrix();
}

namespace detail {

double kernel_unchecked(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& x2) {
  switch (spec.kind) {
    case KernelKind::SquaredExponential:
      return spec.variance * std::exp(-0.5 * scaled_sq_dist(spec.length_scales, x, x2));
    case KernelKind::Matern52: {
      const double r2 = scaled_sq_dist(spec.length_scales, x, x2);
      const double s = std::sqrt(r2);
      return spec.variance * (1.0 + kSqrt5 * s + 5.0 * r2 / 3.0) * std::exp(-kSqrt5 * s);
    }
    case KernelKind::MultiLayerPerceptron: {
      const MlpTerms t = mlp_terms(spec.length_scales, x, x2);
      const double z = t.dot / std::sqrt(t.norm_x * t.norm_x2);
      return 2.0 * spec.variance / M_PI * std::asin(std::clamp(z, -1.0, 1.0));
    }
  }
  return 0.0;
}

}  // namespace detail

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size() || static_cast<std::size_t>(x.size()) != spec.input_dim())
    throw DimensionError("kernel_eval: input dimension does not match the kernel");
  if (!x.allFinite() || !x2.allFinite()) throw DomainError("kernel_eval: non-finite input");
  spec.validate();
  return detail::kernel_unchecked(spec, x, x2);
}

Matrix gram(const KernelSpec& spec, const std::vector<Vector>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = detail::kernel_unchecked(spec, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = detail::kernel_unchecked(spec, points[static_cast<std::size_t>(i)],
                                                        points[static_cast<std::size_t>(j)]);
    }
  }
  return k;
}

std::vector<Matrix> gram_log_gradients(const KernelSpec& spec,
                                       const std::vector<Vector>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto p = spec.length_scales.size();
  std::vector<Matrix> grads(static_cast<std::size_t>(p + 1), Matrix::Zero(n, n));
  const Vector& ls = spec.length_scales;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Vector& a = points[static_cast<std::size_t>(i)];
      const Vector& b = points[static_cast<std::size_t>(j)];
      double kval = 0.0;
      switch (spec.kind) {
        case KernelKind::SquaredExponential: {
          const Vector diff2 = (a - b).array().square().matrix();
          const Vector scaled = (diff2.array() / ls.array().square()).matrix();
          kval = spec.variance * std::exp(-0.5 * scaled.sum());
          for (Eigen::Index d = 0; d < p; ++d) grads[d + 1](i, j) = kval * scaled[d];
          break;
        }
        case KernelKind::Matern52: {
          const Vector diff2 = (a - b).array().square().matrix();
          const Vector scaled = (diff2.array() / ls.array().square()).matrix();
          const double r2 = scaled.sum();
          const double s = std::sqrt(r2);
          const double e = std::exp(-kSqrt5 * s);
          kval = spec.variance * (1.0 + kSqrt5 * s + 5.0 * r2 / 3.0) * e;
          const double common = spec.variance * e * (5.0 / 3.0) * (1.0 + kSqrt5 * s);
          for (Eigen::Index d = 0; d < p; ++d) grads[d + 1](i, j) = common * scaled[d];
          break;
        }
        case KernelKind::MultiLayerPerceptron: {
          const MlpTerms t = mlp_terms(ls, a, b);
          const double denom = std::sqrt(t.norm_x * t.norm_x2);
          const double z = std::clamp(t.dot / denom, -1.0, 1.0);
          kval = 2.0 * spec.variance / M_PI * std::asin(z);
          const double outer = 2.0 * spec.variance / M_PI / std::sqrt(std::max(1e-300, 1.0 - z * z));
          for (Eigen::Index d = 0; d < p; ++d) {
            const double ad = d == 0 ? 1.0 : a[d - 1];
            const double bd = d == 0 ? 1.0 : b[d - 1];
            const double w = ls[d];
            const double d_dot = w * ad * bd;
            const double d_nx = w * ad * ad;
            const double d_nx2 = w * bd * bd;
            const double dz = d_dot / denom - 0.5 * z * (d_nx / t.norm_x + d_nx2 / t.norm_x2);
            grads[d + 1](i, j) = outer * dz;
          }
          break;
        }
      }
      grads[0](i, j) = kval;
      for (auto& g : grads) g(j, i) = g(i, j);
    }
  }
  return grads;
}

}  // namespace lss
