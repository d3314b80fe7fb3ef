#include "lss/superlevel.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "lss/normal.hpp"

namespace lss {

std::vector<bool> MembershipSet::contains_batch(const Matrix& thetas) const {
  std::vector<bool> out(static_cast<std::size_t>(thetas.cols()));
  for (Eigen::Index j = 0; j < thetas.cols(); ++j) out[static_cast<std::size_t>(j)] = contains(thetas.col(j));
  return out;
}

double confidence_ratio(const Prediction& p) {
  const double sd = p.stddev();
  if (sd < 1e-12) {
    if (p.mean > 0.0) return kDegenerateRatio;
    if (p.mean < 0.0) return -kDegenerateRatio;
    return 0.0;
  }
  return p.mean / sd;
}

double confidence_ratio(const GpModel& model, const Vector& theta, const Vector& alpha) {
  return confidence_ratio(model.predict(concat(theta, alpha)));
}

std::string to_string(PiScheme s) {
  switch (s) {
    case PiScheme::Single: return "single";
    case PiScheme::Uniform: return "uniform";
    case PiScheme::Infinite: return "infinite";
  }
  return "unknown";
}

PiScheme pi_scheme_from_string(const std::string& s) {
  if (s == "single") return PiScheme::Single;
  if (s == "uniform") return PiScheme::Uniform;
  if (s == "infinite") return PiScheme::Infinite;
  throw DomainError("unknown pi scheme '" + s + "' (expected single, uniform or infinite)");
}

double UnionBound::pi(std::size_t i) const {
  if (i == 0) throw DomainError("union bound index is 1-based");
  switch (scheme) {
    case PiScheme::Single:
      if (i != 1) throw DomainError("single scheme only covers one draw");
      return 1.0;
    case PiScheme::Uniform:
      if (horizon == 0 || i > horizon) throw DomainError("uniform scheme index exceeds its horizon");
      return static_cast<double>(horizon);
    case PiScheme::Infinite: {
      const double di = static_cast<double>(i);
      return M_PI * M_PI * di * di / 6.0;
    }
  }
  return 1.0;
}

double beta_union_bound(double delta, std::size_t i, const UnionBound& bound) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double ratio = bound.pi(i) / (2.0 * delta);
  if (!(ratio > 1.0)) throw DomainError("union bound is vacuous: pi_i <= 2 delta");
  return std::sqrt(2.0 * std::log(ratio));
}

double relaxed_beta(double phi_star, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw DomainError("quantile must lie in (0, 1)");
  const double log_target = std::log(quantile) + normal::log_cdf(phi_star);
  if (log_target > std::log(1e-300)) return normal::quantile(std::exp(log_target));
  // Far lower tail: Newton on log Phi(b) = log_target, starting from the
  // first-order expansion around phi_star.
  double b = phi_star + std::log(quantile) / std::abs(phi_star);
  for (int it = 0; it < 50; ++it) {
    const double lc = normal::log_cdf(b);
    const double slope = std::exp(std::log(normal::pdf(b) + DBL_MIN) - lc);
    const double step = (lc - log_target) / slope;
    b -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(b))) break;
  }
  return b;
}

SuperLevelSet::SuperLevelSet(std::shared_ptr<const GpModel> model, Vector context, double beta,
                             Vector theta_star, double quantile)
    : model_(std::move(model)),
      context_(std::move(context)),
      beta_(beta),
      theta_star_(std::move(theta_star)),
      quantile_(quantile) {
  if (!model_) throw DomainError("SuperLevelSet needs a model");
  if (std::isnan(beta_)) throw DomainError("SuperLevelSet threshold is NaN");
  const auto in = model_->input_dim();
  if (static_cast<std::size_t>(context_.size()) > in)
    throw DimensionError("context is longer than the model input");
  theta_dim_ = in - static_cast<std::size_t>(context_.size());
  if (static_cast<std::size_t>(theta_star_.size()) != theta_dim_)
    throw DimensionError("theta* dimension does not match the control dimension");
}

Matrix SuperLevelSet::with_context(const Matrix& thetas) const {
  if (static_cast<std::size_t>(thetas.rows()) != theta_dim_)
    throw DimensionError("query dimension does not match the control dimension");
  Matrix xs(thetas.rows() + context_.size(), thetas.cols());
  xs.topRows(thetas.rows()) = thetas;
  if (context_.size() > 0) xs.bottomRows(context_.size()) = context_.replicate(1, thetas.cols());
  return xs;
}

double SuperLevelSet::confidence(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != theta_dim_)
    throw DimensionError("query dimension does not match the control dimension");
  return confidence_ratio(model_->predict(concat(theta, context_)));
}

std::vector<double> SuperLevelSet::confidence_batch(const Matrix& thetas) const {
  const auto preds = model_->predict_batch(with_context(thetas));
  std::vector<double> out(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) out[i] = confidence_ratio(preds[i]);
  return out;
}

bool SuperLevelSet::contains(const Vector& theta) const { return confidence(theta) > beta_; }

std::vector<bool> SuperLevelSet::contains_batch(const Matrix& thetas) const {
  const auto phi = confidence_batch(thetas);
  std::vector<bool> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] > beta_;
  return out;
}

SuperLevelSet SuperLevelSet::with_beta(double beta) const {
  return SuperLevelSet(model_, context_, beta, theta_star_, quantile_);
}

SuperLevelSet build_superlevel_set(std::shared_ptr<const GpModel> model, const Vector& context,
                                   double quantile, const SearchConfig& search, Rng& rng) {
  if (!model) throw DomainError("build_superlevel_set needs a model");
  if (!(quantile > 0.0 && quantile < 1.0)) throw DomainError("quantile must lie in (0, 1)");
  const auto in = model->input_dim();
  if (static_cast<std::size_t>(context.size()) > in) throw DimensionError("context longer than model input");
  const std::size_t theta_dim = in - static_cast<std::size_t>(context.size());
  // Temporary set with a placeholder threshold, only used to score candidates.
  const SuperLevelSet probe(model, context, 0.0, Vector::Constant(static_cast<Eigen::Index>(theta_dim), 0.5),
                            quantile);
  BatchObjective phi = [&](const Matrix& thetas) { return probe.confidence_batch(thetas); };
  const SearchResult best = maximize_over_box(phi, Box::unit(theta_dim), search, rng);
  double beta = relaxed_beta(best.value, quantile);
  // Guard rounding so that theta* is always a member.
  if (!(best.value > beta)) beta = std::nextafter(best.value, -std::numeric_limits<double>::infinity());
  return SuperLevelSet(std::move(model), context, beta, best.best, quantile);
}

}  // namespace lss
