#include "lss/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

namespace lss {

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Pour2D: return "pour";
    case ShapeKind::Scoop2D: return "scoop";
    case ShapeKind::Push: return "push";
    case ShapeKind::Piecewise: return "piecewise";
  }
  return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "pour") return ShapeKind::Pour2D;
  if (s == "scoop") return ShapeKind::Scoop2D;
  if (s == "push") return ShapeKind::Push;
  if (s == "piecewise") return ShapeKind::Piecewise;
  throw DomainError("unknown score shape '" + s + "'");
}

double ScoreShape::zero_crossing() const {
  switch (kind) {
    case ShapeKind::Pour2D: return 0.95;
    case ShapeKind::Scoop2D: return 0.5;
    case ShapeKind::Piecewise: return tau;
    case ShapeKind::Push: break;
  }
  throw DomainError("push shape has no fraction threshold");
}

double shape_score(const ScoreShape& shape, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("shape_score: fraction must lie in [0, 1]");
  switch (shape.kind) {
    case ShapeKind::Pour2D: return std::exp(2.0 * (10.0 * x - 9.5)) - 1.0;
    case ShapeKind::Scoop2D: return x - 0.5;
    case ShapeKind::Piecewise: {
      const double tau = shape.tau;
      if (!(tau > 0.0 && tau < 1.0)) throw DomainError("shape_score: tau must lie in (0, 1)");
      return x <= tau ? -1.0 + x / tau : (x - tau) / (1.0 - tau);
    }
    case ShapeKind::Push: break;
  }
  throw DomainError("shape_score: push shape takes a position");
}

double shape_score(const ScoreShape& shape, const Vector& position) {
  if (shape.kind != ShapeKind::Push) throw DomainError("shape_score: position given for a fraction shape");
  if (position.size() != shape.goal.size()) throw DimensionError("shape_score: position and goal differ in size");
  return 2.0 - (position - shape.goal).norm();
}

namespace {

std::uint64_t mix(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

// Standard normal noise that depends only on the query and the task seed.
double query_noise(const Vector& theta, const Vector& alpha, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (Eigen::Index i = 0; i < theta.size(); ++i) h = mix(h, theta[i]);
  h = mix(h, -1.0);
  for (Eigen::Index i = 0; i < alpha.size(); ++i) h = mix(h, alpha[i]);
  Rng rng(h);
  return rng.normal();
}

}  // namespace

void SyntheticTask::validate() const {
  if (d_theta == 0) throw DomainError(name + ": d_theta must be positive");
  if (noise_std < 0.0) throw DomainError(name + ": noise_std must be non-negative");
  if (shape.kind == ShapeKind::Piecewise && !(shape.tau > 0.0 && shape.tau < 1.0))
    throw DomainError(name + ": tau must lie in (0, 1)");
  if (region == RegionKind::Ellipsoid) {
    if (static_cast<std::size_t>(radii.size()) != d_theta) throw DimensionError(name + ": radii size != d_theta");
    if (!((radii.array() > 0.0).all() && (radii.array() <= 0.5).all()))
      throw DomainError(name + ": radii must lie in (0, 0.5]; the volume is too large for this dimension");
    if (!(drift >= 0.0 && drift <= 1.0)) throw DomainError(name + ": drift must lie in [0, 1]");
    if (!(falloff > 0.0)) throw DomainError(name + ": falloff must be positive");
  } else {
    if (boxes.empty()) throw DomainError(name + ": box union needs at least one box");
    for (const Box& b : boxes) {
      if (b.dim() != d_theta) throw DimensionError(name + ": box dimension != d_theta");
      if (!((b.upper.array() > b.lower.array()).all())) throw DomainError(name + ": empty box");
    }
  }
}

Vector SyntheticTask::center(const Vector& alpha) const {
  Vector c(static_cast<Eigen::Index>(d_theta));
  for (std::size_t d = 0; d < d_theta; ++d) {
    const auto di = static_cast<Eigen::Index>(d);
    const double a = d_alpha == 0 ? 0.5 : alpha[static_cast<Eigen::Index>(d % d_alpha)];
    const double r = radii[di];
    c[di] = r + (1.0 - 2.0 * r) * (0.5 + drift * (a - 0.5));
  }
  return c;
}

double SyntheticTask::region_distance(const Vector& theta, const Vector& alpha) const {
  if (static_cast<std::size_t>(theta.size()) != d_theta) throw DimensionError(name + ": theta has the wrong size");
  if (static_cast<std::size_t>(alpha.size()) != d_alpha) throw DimensionError(name + ": alpha has the wrong size");
  if (region == RegionKind::Ellipsoid)
    return ((theta - center(alpha)).array() / radii.array()).square().sum();
  double best = std::numeric_limits<double>::infinity();
  for (const Box& b : boxes) {
    const Vector c = 0.5 * (b.lower + b.upper);
    const Vector h = 0.5 * (b.upper - b.lower);
    best = std::min(best, ((theta - c).array() / h.array()).square().maxCoeff());
  }
  return best;
}

double SyntheticTask::latent_fraction(const Vector& theta, const Vector& alpha, bool with_noise) const {
  const double x0 = shape.zero_crossing();
  double f = 1.0 - (1.0 - x0) * std::pow(region_distance(theta, alpha), falloff);
  if (with_noise && noise_std > 0.0) f += noise_std * query_noise(theta, alpha, seed);
  return std::clamp(f, 0.0, 1.0);
}

double SyntheticTask::score(const Vector& theta, const Vector& alpha) const {
  if (shape.kind == ShapeKind::Push) {
    double dist = 2.0 * std::sqrt(region_distance(theta, alpha));
    if (noise_std > 0.0) dist = std::abs(dist + noise_std * query_noise(theta, alpha, seed));
    return 2.0 - dist;
  }
  return shape_score(shape, latent_fraction(theta, alpha));
}

bool SyntheticTask::member(const Vector& theta, const Vector& alpha) const {
  return region_distance(theta, alpha) < 1.0;
}

double ball_radius_for_volume(std::size_t dim, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("volume fraction must lie in (0, 1)");
  const double d = static_cast<double>(dim);
  const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return std::pow(fraction / unit_ball, 1.0 / d);
}

double SyntheticTask::volume_fraction() const {
  if (region == RegionKind::Ellipsoid) {
    const double d = static_cast<double>(d_theta);
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * radii.prod();
  }
  // Boxes are assumed disjoint.
  double v = 0.0;
  for (const Box& b : boxes) v += b.volume();
  return v;
}

ScoreFunction SyntheticTask::oracle() const {
  validate();
  SyntheticTask copy = *this;
  return [copy](const Vector& theta, const Vector& alpha) { return copy.score(theta, alpha); };
}

namespace {

SyntheticTask ellipsoid_task(std::string name, ShapeKind kind, std::size_t d_theta, std::size_t d_alpha,
                             double volume, double noise, std::uint64_t seed) {
  SyntheticTask t;
  t.name = std::move(name);
  t.d_theta = d_theta;
  t.d_alpha = d_alpha;
  t.region = RegionKind::Ellipsoid;
  t.radii = Vector::Constant(static_cast<Eigen::Index>(d_theta), ball_radius_for_volume(d_theta, volume));
  t.noise_std = noise;
  t.shape.kind = kind;
  t.seed = seed;
  if (kind == ShapeKind::Push) t.shape.goal = Vector::Zero(2);
  t.validate();
  return t;
}

}  // namespace

SyntheticTask make_pour_task(std::size_t d_theta, std::size_t d_alpha, double volume, double noise,
                             std::uint64_t seed) {
  return ellipsoid_task("pour", ShapeKind::Pour2D, d_theta, d_alpha, volume, noise, seed);
}

SyntheticTask make_scoop_task(std::size_t d_theta, std::size_t d_alpha, double volume, double noise,
                              std::uint64_t seed) {
  return ellipsoid_task("scoop", ShapeKind::Scoop2D, d_theta, d_alpha, volume, noise, seed);
}

SyntheticTask make_push_task(std::size_t d_theta, std::size_t d_alpha, double volume, double noise,
                             std::uint64_t seed) {
  return ellipsoid_task("push", ShapeKind::Push, d_theta, d_alpha, volume, noise, seed);
}

SyntheticTask make_piecewise_task(std::size_t d_theta, std::size_t d_alpha, double tau, double volume,
                                  double noise, std::uint64_t seed) {
  SyntheticTask t = ellipsoid_task("piecewise", ShapeKind::Piecewise, d_theta, d_alpha, volume, noise, seed);
  t.shape.tau = tau;
  t.validate();
  return t;
}

SyntheticTask make_two_box_task(double noise, std::uint64_t seed) {
  SyntheticTask t;
  t.name = "two-box";
  t.d_theta = 2;
  t.d_alpha = 0;
  t.region = RegionKind::BoxUnion;
  Vector lo(2), hi(2);
  lo << 0.10, 0.01;
  hi << 0.30, 0.99;
  t.boxes.push_back(Box{lo, hi});
  lo << 0.38, 0.15;
  hi << 0.52, 0.85;
  t.boxes.push_back(Box{lo, hi});
  t.noise_std = noise;
  t.shape.kind = ShapeKind::Push;
  t.shape.goal = Vector::Zero(2);
  t.seed = seed;
  t.validate();
  return t;
}

SyntheticTask make_task(const std::string& kind, std::size_t d_theta, std::size_t d_alpha, double volume,
                        double noise, std::uint64_t seed) {
  if (kind == "pour") return make_pour_task(d_theta, d_alpha, volume, noise, seed);
  if (kind == "scoop") return make_scoop_task(d_theta, d_alpha, volume, noise, seed);
  if (kind == "push") return make_push_task(d_theta, d_alpha, volume, noise, seed);
  if (kind == "piecewise") return make_piecewise_task(d_theta, d_alpha, 0.9, volume, noise, seed);
  if (kind == "two-box") return make_two_box_task(noise, seed);
  throw DomainError("unknown task '" + kind + "'");
}

}  // namespace lss
