#ifndef LSS_TESTS_SUPPORT_HPP
#define LSS_TESTS_SUPPORT_HPP

// Independent reference implementations and random instance generators.
// Nothing here calls into the library's numerical code.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lss/gp.hpp"

namespace lss::testing {

inline double ref_kernel(const KernelSpec& k, const Vector& a, const Vector& b) {
  const double pi = std::numbers::pi;
  if (k.kind == KernelKind::MultiLayerPerceptron) {
    const auto n = a.size();
    double ab = k.length_scales[0], aa = k.length_scales[0], bb = k.length_scales[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      ab += k.length_scales[i + 1] * a[i] * b[i];
      aa += k.length_scales[i + 1] * a[i] * a[i];
      bb += k.length_scales[i + 1] * b[i] * b[i];
    }
    return 2.0 * k.variance / pi * std::asin(ab / std::sqrt((aa + 1.0) * (bb + 1.0)));
  }
  double r = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double t = (a[i] - b[i]) / k.length_scales[i];
    r += t * t;
  }
  if (k.kind == KernelKind::SquaredExponential) return k.variance * std::exp(-0.5 * r);
  const double s = std::sqrt(5.0 * r);
  return k.variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

inline Matrix ref_gram(const KernelSpec& k, const std::vector<Vector>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = ref_kernel(k, pts[i], pts[j]);
  return g;
}

/// Posterior mean and variance by explicit inversion of K + noise^2 I.
inline Prediction ref_posterior(const Dataset& d, const KernelSpec& k, const Vector& x) {
  const auto n = static_cast<Eigen::Index>(d.size());
  if (n == 0) return {0.0, ref_kernel(k, x, x)};
  Matrix kk = ref_gram(k, d.points);
  kk.diagonal().array() += d.noise_std * d.noise_std;
  const Matrix inv = kk.fullPivLu().inverse();
  Vector kx(n);
  for (Eigen::Index i = 0; i < n; ++i) kx[i] = ref_kernel(k, d.points[static_cast<std::size_t>(i)], x);
  const Vector y = d.targets();
  return {kx.dot(inv * y), ref_kernel(k, x, x) - kx.dot(inv * kx)};
}

inline double ref_log_det_diversity(const std::vector<Vector>& s, const Vector& l, double noise) {
  const auto n = static_cast<Eigen::Index>(s.size());
  if (n == 0) return 0.0;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double r = 0.0;
      for (Eigen::Index d = 0; d < l.size(); ++d) {
        const double t = l[d] * (s[static_cast<std::size_t>(i)][d] - s[static_cast<std::size_t>(j)][d]);
        r += t * t;
      }
      m(i, j) = std::exp(-r) / (noise * noise);
    }
  m.diagonal().array() += 1.0;
  return std::log(m.determinant());
}

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }
  Vector point(std::size_t d) {
    Vector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform();
    return v;
  }
  KernelKind kind() { return static_cast<KernelKind>(integer(0, 2)); }
  KernelSpec kernel(KernelKind kind, std::size_t d) {
    KernelSpec k;
    k.kind = kind;
    k.variance = log_uniform(0.3, 3.0);
    const std::size_t n = KernelSpec::scale_count(kind, d);
    k.length_scales.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) k.length_scales[static_cast<Eigen::Index>(i)] = log_uniform(0.1, 2.0);
    return k;
  }
  Dataset dataset(std::size_t n, std::size_t d, double noise) {
    Dataset data;
    data.noise_std = noise;
    for (std::size_t i = 0; i < n; ++i) data.add(point(d), normal());
    return data;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace lss::testing

#endif  // LSS_TESTS_SUPPORT_HPP
