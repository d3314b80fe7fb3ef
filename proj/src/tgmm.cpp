#include "lss/tgmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lss/normal.hpp"

namespace lss {

namespace {

// log(Phi(b) - Phi(a)) for a <= b, computed on the side that avoids cancellation.
double log_mass(double a, double b) {
  if (a > 0.0) return log_mass(-b, -a);
  const double mass = normal::cdf(b) - normal::cdf(a);
  if (mass > 1e-300) return std::log(mass);
  return normal::log_cdf(b) + std::log1p(-std::exp(normal::log_cdf(a) - normal::log_cdf(b)));
}

}  // namespace

void Tgmm::validate() const {
  if (means.empty()) throw DomainError("TGMM needs at least one component");
  if (static_cast<std::size_t>(weights.size()) != means.size())
    throw DimensionError("TGMM weights and means differ in length");
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9)
    throw DomainError("TGMM weights must be non-negative and sum to 1");
  if (variances.size() != box.lower.size()) throw DimensionError("TGMM variance dimension mismatch");
  if (!(variances.array() > 0.0).all()) throw DomainError("TGMM variances must be positive");
  for (const Vector& m : means)
    if (!box.contains(m)) throw DomainError("TGMM component mean lies outside the box");
}

double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
  const double za = (lo - mean) / sd;
  const double zb = (hi - mean) / sd;
  // Work on the side where the CDF has more precision.
  const bool flip = za > 0.0 || (za + zb) > 0.0;
  const double a = flip ? -zb : za;
  const double b = flip ? -za : zb;
  const double pa = normal::cdf(a);
  const double pb = normal::cdf(b);
  const double u = pa + (pb - pa) * rng.uniform();
  double z = normal::quantile(std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 1e-16));
  z = std::clamp(z, a, b);
  if (flip) z = -z;
  return std::clamp(mean + sd * z, lo, hi);
}

std::vector<Vector> sample_tgmm(std::size_t count, const Tgmm& mix, Rng& rng) {
  mix.validate();
  std::discrete_distribution<std::size_t> pick(mix.weights.data(), mix.weights.data() + mix.weights.size());
  const Vector sd = mix.variances.array().sqrt().matrix();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vector& mean = mix.means[pick(rng.engine())];
    Vector x(mean.size());
    for (Eigen::Index d = 0; d < mean.size(); ++d)
      x[d] = sample_truncated_normal(mean[d], sd[d], mix.box.lower[d], mix.box.upper[d], rng);
    out.push_back(std::move(x));
  }
  return out;
}

double tgmm_log_density(const Vector& theta, const Tgmm& mix) {
  if (!mix.box.contains(theta)) throw DomainError("tgmm_density: theta lies outside the box");
  const Vector sd = mix.variances.array().sqrt().matrix();
  const Vector log_sd = sd.array().log().matrix();
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(mix.means.size());
  for (std::size_t k = 0; k < mix.means.size(); ++k) {
    const double w = mix.weights[static_cast<Eigen::Index>(k)];
    if (w <= 0.0) {
      terms[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double lp = std::log(w);
    const Vector& mu = mix.means[k];
    for (Eigen::Index d = 0; d < theta.size(); ++d) {
      const double z = (theta[d] - mu[d]) / sd[d];
      const double za = (mix.box.lower[d] - mu[d]) / sd[d];
      const double zb = (mix.box.upper[d] - mu[d]) / sd[d];
      lp += -0.5 * z * z + std::log(normal::kInvSqrt2Pi) - log_sd[d] - log_mass(za, zb);
    }
    terms[k] = lp;
    max_term = std::max(max_term, lp);
  }
  if (!std::isfinite(max_term)) return max_term;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

double tgmm_density(const Vector& theta, const Tgmm& mix) { return std::exp(tgmm_log_density(theta, mix)); }

}  // namespace lss
