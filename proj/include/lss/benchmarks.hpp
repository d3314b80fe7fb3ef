#ifndef LSS_BENCHMARKS_HPP
#define LSS_BENCHMARKS_HPP

#include <string>
#include <vector>

#include "lss/active_learning.hpp"
#include "lss/types.hpp"

namespace lss {

enum class ShapeKind { Pour2D, Scoop2D, Push, Piecewise };
std::string to_string(ShapeKind k);
ShapeKind shape_kind_from_string(const std::string& s);

/// Maps a simulated outcome to a score whose zero crossing is the success threshold.
struct ScoreShape {
  ShapeKind kind = ShapeKind::Pour2D;
  /// Threshold of the piecewise-linear shape, in (0, 1).
  double tau = 0.9;
  /// Target position for Push.
  Vector goal;

  /// Outcome value (success fraction) at which the fraction shapes cross zero.
  double zero_crossing() const;
  bool is_fraction() const { return kind != ShapeKind::Push; }
};

/// exp(2 (10x - 9.5)) - 1, x - 0.5, or the piecewise-linear shape; x in [0, 1].
double shape_score(const ScoreShape& shape, double fraction);
/// 2 - |x - goal| for Push.
double shape_score(const ScoreShape& shape, const Vector& position);

enum class RegionKind { Ellipsoid, BoxUnion };

/// Analytic stand-in for a skill simulator. The feasible region is an ellipsoid
/// (or a union of boxes) whose center moves affinely with the context; inside it
/// the latent outcome clears the shape's success threshold.
struct SyntheticTask {
  std::string name = "custom";
  std::size_t d_theta = 2;
  std::size_t d_alpha = 0;
  RegionKind region = RegionKind::Ellipsoid;
  /// Ellipsoid radii per control dimension (unit-box units).
  Vector radii;
  /// Context drift of the ellipsoid center, in [0, 1].
  double drift = 0.6;
  /// Boxes for RegionKind::BoxUnion (fixed, context independent).
  std::vector<Box> boxes;
  double noise_std = 0.01;
  /// Latent fraction is 1 - (1 - x0) q^falloff for normalized squared distance q:
  /// 1 gives a quadratic falloff in distance, 0.5 a linear one.
  double falloff = 1.0;
  ScoreShape shape;
  std::uint64_t seed = 0;

  void validate() const;
  Vector center(const Vector& alpha) const;
  /// Normalized squared distance to the region: < 1 exactly inside.
  double region_distance(const Vector& theta, const Vector& alpha) const;
  /// Success fraction in [0, 1]; deterministic in (theta, alpha, seed).
  double latent_fraction(const Vector& theta, const Vector& alpha, bool with_noise = true) const;
  double score(const Vector& theta, const Vector& alpha) const;
  /// Noise-free ground truth g > 0. For evaluation only.
  bool member(const Vector& theta, const Vector& alpha) const;
  /// Feasible volume fraction of the box implied by the geometry.
  double volume_fraction() const;
  ScoreFunction oracle() const;
};

/// Radius of a d-ball holding `fraction` of the unit cube.
double ball_radius_for_volume(std::size_t dim, double fraction);

SyntheticTask make_pour_task(std::size_t d_theta = 4, std::size_t d_alpha = 4, double volume = 0.1,
                             double noise = 0.01, std::uint64_t seed = 0);
SyntheticTask make_scoop_task(std::size_t d_theta = 7, std::size_t d_alpha = 2, double volume = 0.02,
                              double noise = 0.01, std::uint64_t seed = 0);
SyntheticTask make_push_task(std::size_t d_theta = 4, std::size_t d_alpha = 2, double volume = 0.1,
                             double noise = 0.01, std::uint64_t seed = 0);
/// Two feasible rectangles of unequal size side by side along coordinate 0;
/// coordinate 1 does not discriminate between them.
SyntheticTask make_two_box_task(double noise = 0.0, std::uint64_t seed = 0);
/// Piecewise-shape task with threshold tau.
SyntheticTask make_piecewise_task(std::size_t d_theta, std::size_t d_alpha, double tau, double volume,
                                  double noise = 0.01, std::uint64_t seed = 0);

SyntheticTask make_task(const std::string& kind, std::size_t d_theta, std::size_t d_alpha, double volume,
                        double noise, std::uint64_t seed);

}  // namespace lss

#endif  // LSS_BENCHMARKS_HPP
