#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "lss/gp.hpp"
#include "lss/hyperfit.hpp"
#include "lss/kernel.hpp"
#include "lss/normal.hpp"
#include "support.hpp"

using namespace lss;
using lss::testing::Gen;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

}  // namespace

TEST_CASE("kernel values on the diagonal") {
  Gen g(1);
  const Vector x = g.point(3);
  CHECK(kernel_eval(KernelSpec::isotropic(KernelKind::SquaredExponential, 3, 1.0, 0.37), x, x) == 1.0);
  CHECK(kernel_eval(KernelSpec::isotropic(KernelKind::Matern52, 3, 2.5, 0.8), x, x) == 2.5);
  const KernelSpec mlp = KernelSpec::isotropic(KernelKind::MultiLayerPerceptron, 1, 1.0, 1.0);
  CHECK(kernel_eval(mlp, v1(0.0), v1(0.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("kernel uses the squared distance directly") {
  const KernelSpec se = KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.5);
  // r = (0.3 / 0.5)^2
  CHECK(kernel_eval(se, v1(0.1), v1(0.4)) == doctest::Approx(std::exp(-0.5 * 0.36)).epsilon(1e-14));
}

TEST_CASE("kernel argument checks") {
  const KernelSpec se = KernelSpec::isotropic(KernelKind::SquaredExponential, 2);
  CHECK_THROWS_AS(kernel_eval(se, v1(0.0), v1(0.0)), DimensionError);
  Vector bad = Vector::Zero(2);
  bad[1] = std::nan("");
  CHECK_THROWS_AS(kernel_eval(se, bad, Vector::Zero(2)), DomainError);
  KernelSpec neg = se;
  neg.variance = -1.0;
  CHECK_THROWS_AS(neg.validate(), DomainError);
  CHECK(KernelSpec::isotropic(KernelKind::MultiLayerPerceptron, 4).length_scales.size() == 5);
  CHECK(kernel_kind_from_string(to_string(KernelKind::Matern52)) == KernelKind::Matern52);
}

TEST_CASE("kernels are symmetric and match the reference") {
  Gen g(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 6));
    const KernelSpec k = g.kernel(g.kind(), d);
    const Vector a = g.point(d), b = g.point(d);
    CHECK(kernel_eval(k, a, b) == doctest::Approx(kernel_eval(k, b, a)).epsilon(1e-15));
    CHECK(std::abs(kernel_eval(k, a, b) - lss::testing::ref_kernel(k, a, b)) < 1e-12);
  }
}

TEST_CASE("Gram matrices are positive semidefinite") {
  Gen g(3);
  for (KernelKind kind : {KernelKind::SquaredExponential, KernelKind::Matern52, KernelKind::MultiLayerPerceptron}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t d = static_cast<std::size_t>(g.integer(1, 5));
      std::vector<Vector> pts;
      for (int i = 0, n = g.integer(2, 25); i < n; ++i) pts.push_back(g.point(d));
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram(g.kernel(kind, d), pts));
      const Vector ev = eig.eigenvalues();
      CHECK(ev.minCoeff() >= -1e-8 * ev.maxCoeff());
    }
  }
}

TEST_CASE("prior and single-point posteriors") {
  const KernelSpec se = KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.3);
  const GpModel prior(Dataset{}, se);
  for (double x : {0.0, 0.4, 1.0}) {
    const Prediction p = prior.predict(v1(x));
    CHECK(p.mean == 0.0);
    CHECK(p.variance == 1.0);
  }
  Dataset one;
  one.noise_std = 0.1;
  one.add(v1(0.5), 2.0);
  const GpModel m(one, se);
  const Prediction p = m.predict(v1(0.5));
  CHECK(p.mean == doctest::Approx(2.0 / 1.01).epsilon(1e-12));
  CHECK(p.variance == doctest::Approx(1.0 - 1.0 / 1.01).epsilon(1e-10));
  const Prediction far = m.predict(v1(1e3));
  CHECK(std::abs(far.mean) < 1e-12);
  CHECK(far.variance == doctest::Approx(1.0));
}

TEST_CASE("noise-free interpolation") {
  Gen g(4);
  Dataset d = g.dataset(12, 2, 0.0);
  const GpModel m(d, KernelSpec::isotropic(KernelKind::SquaredExponential, 2, 1.0, 0.3));
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(m.predict(d.points[i]).mean - d.values[i]) < 1e-6);
}

TEST_CASE("duplicated observation acts as one with halved noise variance") {
  const KernelSpec se = KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.2);
  Dataset twice;
  twice.noise_std = 0.1;
  twice.add(v1(0.3), 1.5);
  twice.add(v1(0.3), 1.5);
  Dataset once;
  once.noise_std = 0.1 / std::sqrt(2.0);
  once.add(v1(0.3), 1.5);
  const GpModel a(twice, se), b(once, se);
  for (double x : {0.0, 0.3, 0.45, 0.9}) {
    const Prediction pa = a.predict(v1(x)), pb = b.predict(v1(x));
    const Prediction ref = lss::testing::ref_posterior(twice, se, v1(x));
    CHECK(std::abs(pa.mean - pb.mean) < 1e-10);
    CHECK(std::abs(pa.variance - pb.variance) < 1e-10);
    CHECK(std::abs(pa.mean - ref.mean) < 1e-8);
    CHECK(std::abs(pa.variance - ref.variance) < 1e-8);
  }
}

TEST_CASE("posterior matches dense inversion") {
  Gen g(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 6));
    const std::size_t n = static_cast<std::size_t>(g.integer(0, 30));
    const KernelSpec k = g.kernel(g.kind(), d);
    const Dataset data = g.dataset(n, d, g.uniform(0.05, 0.5));
    const GpModel m(data, k);
    for (int q = 0; q < 5; ++q) {
      const Vector x = g.point(d);
      const Prediction p = m.predict(x);
      const Prediction ref = lss::testing::ref_posterior(data, k, x);
      CHECK(std::abs(p.mean - ref.mean) < 1e-8);
      CHECK(std::abs(p.variance - ref.variance) < 1e-8);
    }
  }
}

TEST_CASE("predict_batch agrees with predict") {
  Gen g(6);
  const Dataset data = g.dataset(15, 3, 0.1);
  const GpModel m(data, g.kernel(KernelKind::Matern52, 3));
  Matrix xs(3, 7);
  for (int j = 0; j < 7; ++j) xs.col(j) = g.point(3);
  const auto batch = m.predict_batch(xs);
  for (int j = 0; j < 7; ++j) {
    CHECK(batch[static_cast<std::size_t>(j)].mean == doctest::Approx(m.predict(xs.col(j)).mean).epsilon(1e-12));
    CHECK(batch[static_cast<std::size_t>(j)].variance == doctest::Approx(m.predict(xs.col(j)).variance).epsilon(1e-12));
  }
  CHECK_THROWS_AS(m.predict(Vector::Zero(2)), DimensionError);
}

TEST_CASE("variance bounds and monotone information") {
  Gen g(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 4));
    const KernelSpec k = g.kernel(g.kind(), d);
    Dataset data = g.dataset(static_cast<std::size_t>(g.integer(1, 15)), d, g.uniform(0.01, 0.3));
    const GpModel before(data, k);
    Dataset more = data;
    more.add(g.point(d), g.normal());
    const GpModel after(more, k);
    for (int q = 0; q < 5; ++q) {
      const Vector x = g.point(d);
      const double vb = before.predict(x).variance;
      CHECK(vb >= 0.0);
      CHECK(vb <= kernel_eval(k, x, x) + 1e-10);
      CHECK(after.predict(x).variance <= vb + 1e-10);
    }
    for (const Vector& p : data.points) {
      const double v = before.predict(p).variance;
      CHECK(v >= 0.0);
      CHECK(v <= kernel_eval(k, p, p) + 1e-10);
    }
  }
}

TEST_CASE("near-duplicate points need jitter only without noise") {
  Dataset d;
  d.add(v1(0.5), 1.0);
  d.add(v1(0.5 + 1e-12), 1.0);
  const GpModel m(d, KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.3));
  CHECK(m.jitter() > 0.0);
  CHECK(m.jitter() <= 1e-4);
  d.noise_std = 0.1;
  CHECK(GpModel(d, KernelSpec::isotropic(KernelKind::SquaredExponential, 1)).jitter() == 0.0);
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.add(v1(0.1), 1.0);
  d.add(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(d.validate(), DimensionError);
  Dataset n;
  n.noise_std = -0.1;
  CHECK_THROWS_AS(n.validate(), DomainError);
}

TEST_CASE("log marginal likelihood closed forms") {
  const KernelSpec se = KernelSpec::isotropic(KernelKind::SquaredExponential, 1);
  Dataset d;
  d.add(v1(0.2), 0.0);
  CHECK(log_marginal_likelihood(d, se) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
  d.values[0] = 1.0;
  CHECK(log_marginal_likelihood(d, se) == doctest::Approx(-0.5 - 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK_THROWS_AS(log_marginal_likelihood(Dataset{}, se), DomainError);
}

TEST_CASE("zero targets leave only the determinant term") {
  Gen g(8);
  Dataset d = g.dataset(10, 2, 0.2);
  std::fill(d.values.begin(), d.values.end(), 0.0);
  const KernelSpec k = g.kernel(KernelKind::SquaredExponential, 2);
  Matrix kk = lss::testing::ref_gram(k, d.points);
  kk.diagonal().array() += 0.04;
  const double expected = -0.5 * std::log(kk.determinant()) - 5.0 * std::log(2.0 * std::numbers::pi);
  CHECK(log_marginal_likelihood(d, k) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("log marginal likelihood is permutation invariant") {
  Gen g(9);
  for (int trial = 0; trial < 10; ++trial) {
    const KernelSpec k = g.kernel(g.kind(), 3);
    Dataset d = g.dataset(12, 3, 0.1);
    const double a = log_marginal_likelihood(d, k);
    std::reverse(d.points.begin(), d.points.end());
    std::reverse(d.values.begin(), d.values.end());
    CHECK(log_marginal_likelihood(d, k) == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  Gen g(10);
  for (KernelKind kind : {KernelKind::SquaredExponential, KernelKind::Matern52, KernelKind::MultiLayerPerceptron}) {
    const KernelSpec k = g.kernel(kind, 2);
    Dataset d = g.dataset(10, 2, 0.2);
    Vector grad;
    log_marginal_likelihood_with_gradient(d, k, grad);
    const double h = 1e-6;
    auto at = [&](Eigen::Index idx, double step) {
      KernelSpec kk = k;
      Dataset dd = d;
      if (idx == 0) kk.variance *= std::exp(step);
      else if (idx <= kk.length_scales.size()) kk.length_scales[idx - 1] *= std::exp(step);
      else dd.noise_std *= std::exp(step);
      return log_marginal_likelihood(dd, kk);
    };
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      const double fd = (at(i, h) - at(i, -h)) / (2 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

namespace {

// Draws a function from the SE prior with scale `ell` at n uniform points.
Dataset prior_sample(std::size_t n, double ell, double noise, std::uint64_t seed) {
  Gen g(seed);
  Dataset d;
  d.noise_std = noise;
  for (std::size_t i = 0; i < n; ++i) d.add(g.point(1), 0.0);
  Matrix k = lss::testing::ref_gram(KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, ell), d.points);
  k.diagonal().array() += 1e-8;
  const Matrix l = Eigen::LLT<Matrix>(k).matrixL();
  Vector z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = g.normal();
  const Vector f = l * z;
  for (std::size_t i = 0; i < n; ++i) d.values[i] = f[static_cast<Eigen::Index>(i)] + noise * g.normal();
  return d;
}

}  // namespace

TEST_CASE("fit recovers a known length scale") {
  std::vector<double> ell;
  for (std::uint64_t s = 0; s < 20; ++s) {
    FitConfig cfg;
    cfg.restarts = 2;
    cfg.seed = s;
    const FitResult r = fit_hyperparameters(prior_sample(40, 0.2, 0.05, 100 + s), cfg);
    ell.push_back(r.kernel.length_scales[0]);
  }
  std::sort(ell.begin(), ell.end());
  const double median = 0.5 * (ell[9] + ell[10]);
  CHECK(median > 0.1);
  CHECK(median < 0.4);
}

TEST_CASE("fit is deterministic and beats its starts") {
  const Dataset d = prior_sample(30, 0.3, 0.1, 7);
  FitConfig cfg;
  cfg.restarts = 1;
  cfg.seed = 42;
  const FitResult a = fit_hyperparameters(d, cfg);
  const FitResult b = fit_hyperparameters(d, cfg);
  CHECK(a.kernel.variance == b.kernel.variance);
  CHECK(a.kernel.length_scales == b.kernel.length_scales);
  CHECK(a.noise_std == b.noise_std);
  Dataset start = d;
  start.noise_std = 0.1;
  CHECK(a.log_likelihood >= log_marginal_likelihood(start, KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.3)));
  CHECK(a.log_likelihood == doctest::Approx(log_marginal_likelihood(
                                 Dataset{d.points, d.values, a.noise_std}, a.kernel)).epsilon(1e-9));
  CHECK(a.kernel.variance >= 1e-3);
  CHECK(a.kernel.variance <= 1e3);
  CHECK(a.noise_std >= 1e-4);
  CHECK(a.noise_std <= 1.0);
  CHECK_THROWS_AS(fit_hyperparameters(Dataset{{v1(0.1)}, {1.0}, 0.1}, cfg), DomainError);
}

TEST_CASE("fit prunes an irrelevant input") {
  int pruned = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Dataset base = prior_sample(40, 0.2, 0.05, 300 + s);
    Gen g(500 + s);
    Dataset d;
    d.noise_std = base.noise_std;
    for (std::size_t i = 0; i < base.size(); ++i) {
      Vector x(2);
      x << base.points[i][0], g.uniform();
      d.add(x, base.values[i]);
    }
    FitConfig cfg;
    cfg.seed = s;
    const FitResult r = fit_hyperparameters(d, cfg);
    const Vector w = r.kernel.ard_weights();
    if (w[1] < w[0]) ++pruned;
  }
  CHECK(pruned >= 16);
}

TEST_CASE("normal helpers") {
  CHECK(normal::cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double p : {1e-10, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999})
    CHECK(normal::cdf(normal::quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  CHECK(normal::quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal::log_cdf(-40.0) == doctest::Approx(-800.0 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(40.0)).epsilon(1e-4));
  CHECK(std::isinf(normal::quantile(1.0)));
}
