#include "lss/hyperfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace lss {

double log_marginal_likelihood_with_gradient(const Dataset& data, const KernelSpec& kernel,
                                             Vector& gradient) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Matrix k = gram(kernel, data.points);
  const double noise_var = data.noise_std * data.noise_std;
  k.diagonal().array() += noise_var;
  Eigen::LLT<Matrix> llt;
  factorize_with_jitter(k, llt);

  const Vector y = data.targets();
  const Vector alpha = llt.solve(y);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double lml = -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);

  // d lml / d p = 0.5 tr((alpha alpha^T - K^-1) dK/dp)
  const Matrix inner = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
  const std::vector<Matrix> dk = gram_log_gradients(kernel, data.points);
  gradient.resize(static_cast<Eigen::Index>(dk.size() + 1));
  for (std::size_t i = 0; i < dk.size(); ++i)
    gradient[static_cast<Eigen::Index>(i)] = 0.5 * inner.cwiseProduct(dk[i]).sum();
  gradient[gradient.size() - 1] = noise_var * inner.trace();
  return lml;
}

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double s) { return std::log(s / (1.0 - s)); }

// Unconstrained coordinates u map into [log lo, log hi] through a sigmoid.
struct Problem {
  const Dataset* data;
  KernelKind kind;
  std::size_t scales;
  bool fit_noise;
  double fixed_noise;
  Vector lo, hi;  // log bounds per parameter (noise last)
  std::size_t dim() const { return scales + 1 + (fit_noise ? 1 : 0); }

  Vector to_log(const gsl_vector* u) const {
    Vector out(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) {
      const double s = sigmoid(gsl_vector_get(u, i));
      out[static_cast<Eigen::Index>(i)] = lo[static_cast<Eigen::Index>(i)] +
                                          (hi[static_cast<Eigen::Index>(i)] - lo[static_cast<Eigen::Index>(i)]) * s;
    }
    return out;
  }

  void unpack(const Vector& logp, KernelSpec& kernel, double& noise) const {
    kernel.kind = kind;
    kernel.variance = std::exp(logp[0]);
    kernel.length_scales = logp.segment(1, static_cast<Eigen::Index>(scales)).array().exp().matrix();
    noise = fit_noise ? std::exp(logp[logp.size() - 1]) : fixed_noise;
  }

  double objective(const gsl_vector* u, gsl_vector* grad) const {
    const Vector logp = to_log(u);
    KernelSpec kernel;
    double noise = 0.0;
    unpack(logp, kernel, noise);
    Dataset d{data->points, data->values, noise};
    Vector g;
    double lml;
    try {
      lml = log_marginal_likelihood_with_gradient(d, kernel, g);
    } catch (const NumericalError&) {
      if (grad) gsl_vector_set_zero(grad);
      return std::numeric_limits<double>::max() / 4;
    }
    if (grad) {
      for (std::size_t i = 0; i < dim(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double s = sigmoid(gsl_vector_get(u, i));
        const double chain = (hi[ii] - lo[ii]) * s * (1.0 - s);
        const double gl = (i < scales + 1) ? g[ii] : g[g.size() - 1];
        gsl_vector_set(grad, i, -gl * chain);
      }
    }
    return -lml;
  }
};

double f_cb(const gsl_vector* u, void* p) { return static_cast<Problem*>(p)->objective(u, nullptr); }
void df_cb(const gsl_vector* u, void* p, gsl_vector* g) { static_cast<Problem*>(p)->objective(u, g); }
void fdf_cb(const gsl_vector* u, void* p, double* f, gsl_vector* g) {
  *f = static_cast<Problem*>(p)->objective(u, g);
}

// GSL's default handler aborts; failures are reported through return codes instead.
void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace

FitResult fit_hyperparameters(const Dataset& data, const FitConfig& cfg) {
  if (data.size() < 2) throw DomainError("fit_hyperparameters needs at least two observations");
  data.validate();
  disable_gsl_abort();

  Problem prob;
  prob.data = &data;
  prob.kind = cfg.kind;
  prob.scales = KernelSpec::scale_count(cfg.kind, data.dim());
  prob.fit_noise = cfg.fit_noise;
  prob.fixed_noise = data.noise_std;
  const std::size_t dim = prob.dim();
  prob.lo.resize(static_cast<Eigen::Index>(dim));
  prob.hi.resize(static_cast<Eigen::Index>(dim));
  prob.lo[0] = std::log(cfg.bounds.variance_min);
  prob.hi[0] = std::log(cfg.bounds.variance_max);
  for (std::size_t i = 1; i <= prob.scales; ++i) {
    prob.lo[static_cast<Eigen::Index>(i)] = std::log(cfg.bounds.scale_min);
    prob.hi[static_cast<Eigen::Index>(i)] = std::log(cfg.bounds.scale_max);
  }
  if (cfg.fit_noise) {
    prob.lo[static_cast<Eigen::Index>(dim - 1)] = std::log(cfg.bounds.noise_min);
    prob.hi[static_cast<Eigen::Index>(dim - 1)] = std::log(cfg.bounds.noise_max);
  }

  // Starting points in log space: the default, then the warm start if any.
  std::vector<Vector> starts;
  {
    Vector s(static_cast<Eigen::Index>(dim));
    s[0] = 0.0;
    for (std::size_t i = 0; i < prob.scales; ++i) s[static_cast<Eigen::Index>(i + 1)] = std::log(0.3);
    if (cfg.fit_noise) s[static_cast<Eigen::Index>(dim - 1)] = std::log(0.1);
    starts.push_back(s);
    const bool warm = cfg.warm_start && cfg.warm_start->kind == cfg.kind &&
                      static_cast<std::size_t>(cfg.warm_start->length_scales.size()) == prob.scales;
    if (warm) {
      s[0] = std::log(cfg.warm_start->variance);
      for (std::size_t i = 0; i < prob.scales; ++i)
        s[static_cast<Eigen::Index>(i + 1)] = std::log(cfg.warm_start->length_scales[static_cast<Eigen::Index>(i)]);
    }
    if (cfg.fit_noise && cfg.warm_noise) s[static_cast<Eigen::Index>(dim - 1)] = std::log(*cfg.warm_noise);
    if (warm || (cfg.fit_noise && cfg.warm_noise)) starts.push_back(s);
  }
  Rng rng(cfg.seed);
  for (int r = 0; r < cfg.restarts; ++r) {
    Vector s(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = prob.lo[i] + (prob.hi[i] - prob.lo[i]) * rng.uniform();
    starts.push_back(s);
  }

  gsl_multimin_function_fdf fn;
  fn.n = dim;
  fn.f = f_cb;
  fn.df = df_cb;
  fn.fdf = fdf_cb;
  fn.params = &prob;

  FitResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  gsl_vector* u = gsl_vector_alloc(dim);
  gsl_multimin_fdfminimizer* solver =
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim);

  auto consider = [&](const gsl_vector* at, double neg_lml) {
    if (!std::isfinite(neg_lml) || neg_lml >= std::numeric_limits<double>::max() / 8) return;
    if (-neg_lml > best.log_likelihood) {
      best.log_likelihood = -neg_lml;
      prob.unpack(prob.to_log(at), best.kernel, best.noise_std);
    }
  };

  for (const Vector& start : starts) {
    for (std::size_t i = 0; i < dim; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double frac = std::clamp((start[ii] - prob.lo[ii]) / (prob.hi[ii] - prob.lo[ii]), 1e-6, 1 - 1e-6);
      gsl_vector_set(u, i, logit(frac));
    }
    const double f0 = f_cb(u, &prob);
    if (f0 >= std::numeric_limits<double>::max() / 8) continue;
    consider(u, f0);
    ++best.starts_succeeded;

    gsl_multimin_fdfminimizer_set(solver, &fn, u, 0.1, 0.1);
    for (int it = 0; it < cfg.max_iterations; ++it) {
      if (gsl_multimin_fdfminimizer_iterate(solver) != GSL_SUCCESS) break;
      if (gsl_multimin_test_gradient(solver->gradient, 1e-5) == GSL_SUCCESS) break;
    }
    consider(solver->x, solver->f);
  }
  gsl_multimin_fdfminimizer_free(solver);
  gsl_vector_free(u);

  if (best.starts_succeeded == 0 || !std::isfinite(best.log_likelihood))
    throw NumericalError("fit_hyperparameters: every start failed to factorize the kernel matrix");
  return best;
}

}  // namespace lss
