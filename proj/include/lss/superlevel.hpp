#ifndef LSS_SUPERLEVEL_HPP
#define LSS_SUPERLEVEL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lss/gp.hpp"
#include "lss/search.hpp"

namespace lss {

/// A region of the control box that samplers draw from. Implementations must
/// be immutable so that independent streams can share one instance.
class MembershipSet {
 public:
  virtual ~MembershipSet() = default;
  virtual std::size_t dim() const = 0;
  virtual bool contains(const Vector& theta) const = 0;
  /// One flag per column; override when a vectorized path exists.
  virtual std::vector<bool> contains_batch(const Matrix& thetas) const;
  /// A known member used to seed samplers.
  virtual Vector anchor() const = 0;
  virtual Box box() const { return Box::unit(dim()); }
};

/// Membership from an arbitrary predicate (test fixtures, ground truth).
class PredicateSet final : public MembershipSet {
 public:
  PredicateSet(std::size_t dim, std::function<bool(const Vector&)> pred, Vector anchor)
      : dim_(dim), pred_(std::move(pred)), anchor_(std::move(anchor)) {}
  std::size_t dim() const override { return dim_; }
  bool contains(const Vector& theta) const override { return pred_(theta); }
  Vector anchor() const override { return anchor_; }

 private:
  std::size_t dim_;
  std::function<bool(const Vector&)> pred_;
  Vector anchor_;
};

/// Returned in place of mu / sigma when sigma < 1e-12.
inline constexpr double kDegenerateRatio = 1e12;

/// phi = mu(theta, alpha) / sigma(theta, alpha).
double confidence_ratio(const GpModel& model, const Vector& theta, const Vector& alpha);
double confidence_ratio(const Prediction& p);

/// Choice of pi_i with sum_i 1 / pi_i <= 1.
enum class PiScheme { Single, Uniform, Infinite };
std::string to_string(PiScheme s);
PiScheme pi_scheme_from_string(const std::string& s);

struct UnionBound {
  PiScheme scheme = PiScheme::Infinite;
  /// Number of draws T for the uniform scheme.
  std::size_t horizon = 1;
  double pi(std::size_t i) const;
};

/// sqrt(2 log(pi_i / (2 delta))) for draw i (1-based).
double beta_union_bound(double delta, std::size_t i, const UnionBound& bound);

/// Phi^-1(quantile * Phi(phi_star)), stable when Phi(phi_star) underflows.
double relaxed_beta(double phi_star, double quantile);

/// High-probability super-level set {theta : phi(theta, alpha) > beta}.
class SuperLevelSet final : public MembershipSet {
 public:
  SuperLevelSet(std::shared_ptr<const GpModel> model, Vector context, double beta, Vector theta_star,
                double quantile = 0.95);

  std::size_t dim() const override { return theta_dim_; }
  bool contains(const Vector& theta) const override;
  std::vector<bool> contains_batch(const Matrix& thetas) const override;
  Vector anchor() const override { return theta_star_; }

  double confidence(const Vector& theta) const;
  std::vector<double> confidence_batch(const Matrix& thetas) const;

  const GpModel& model() const { return *model_; }
  std::shared_ptr<const GpModel> model_ptr() const { return model_; }
  const Vector& context() const { return context_; }
  double beta() const { return beta_; }
  const Vector& theta_star() const { return theta_star_; }
  double quantile() const { return quantile_; }
  /// Same model, context and theta*, different threshold.
  SuperLevelSet with_beta(double beta) const;

 private:
  Matrix with_context(const Matrix& thetas) const;

  std::shared_ptr<const GpModel> model_;
  Vector context_;
  double beta_;
  Vector theta_star_;
  double quantile_;
  std::size_t theta_dim_;
};

/// Finds theta* = argmax phi over [0,1]^d and sets beta to the relaxed threshold.
SuperLevelSet build_superlevel_set(std::shared_ptr<const GpModel> model, const Vector& context,
                                   double quantile, const SearchConfig& search, Rng& rng);

}  // namespace lss

#endif  // LSS_SUPERLEVEL_HPP
