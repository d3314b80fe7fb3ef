#ifndef LSS_ACTIVE_LEARNING_HPP
#define LSS_ACTIVE_LEARNING_HPP

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lss/gp.hpp"
#include "lss/hyperfit.hpp"
#include "lss/search.hpp"

namespace lss {

/// Score function g(theta, alpha); the constraint is g > 0.
using ScoreFunction = std::function<double(const Vector& theta, const Vector& alpha)>;

/// Straddle acquisition -|mean| + 1.96 std.
inline double straddle(double mean, double std) { return -std::abs(mean) + 1.96 * std; }

struct AcquisitionQuery {
  Vector context;
  std::size_t theta_dim = 1;
};

struct Selection {
  Vector theta;
  double acquisition = 0.0;
};

/// argmax over theta in [0,1]^d of the straddle acquisition at a fixed context.
Selection select_next(const GpModel& model, const AcquisitionQuery& query, const SearchConfig& search,
                      Rng& rng);

/// Contexts presented during training: round-robin over a list, or i.i.d. draws.
class ContextSource {
 public:
  static ContextSource round_robin(std::vector<Vector> contexts);
  static ContextSource iid(std::size_t dim, std::function<Vector(Rng&)> draw);
  static ContextSource uniform(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Vector next(Rng& rng);

 private:
  std::size_t dim_ = 0;
  std::vector<Vector> list_;
  std::size_t cursor_ = 0;
  std::function<Vector(Rng&)> draw_;
};

enum class Strategy { Straddle, Random };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct ActiveLearningConfig {
  Strategy strategy = Strategy::Straddle;
  FitConfig fit;
  /// Refit hyperparameters every k-th observation (1 = after every one).
  int refit_every = 1;
  /// When false the initial kernel and noise are kept throughout.
  bool fit_hyperparameters = true;
  int n_seed = 5;
  SearchConfig search;
  std::uint64_t seed = 0;
  /// Used until at least two observations are available for fitting.
  std::optional<KernelSpec> initial_kernel;
  double initial_noise = 0.1;
};

struct StepRecord {
  Vector theta;
  Vector context;
  double y = 0.0;
  double acquisition = 0.0;
  /// Log marginal likelihood of the refit before this step; NaN if no refit.
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
};

struct ActiveLearningResult {
  Dataset data;
  KernelSpec kernel;
  std::size_t seed_rows = 0;
  std::vector<StepRecord> log;
};

/// Oracle failure; carries everything gathered so far.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, Dataset partial) : Error(what), partial_(std::move(partial)) {}
  const Dataset& partial() const { return partial_; }

 private:
  Dataset partial_;
};

/// Runs `budget` rounds of straddle (or random) selection, one context per round.
/// Inputs are stored as [theta, alpha]. If `seed_data` is absent, `cfg.n_seed`
/// uniform evaluations are made first.
ActiveLearningResult active_learn(const ScoreFunction& oracle, ContextSource& contexts,
                                  std::size_t theta_dim, int budget, const ActiveLearningConfig& cfg,
                                  const std::optional<Dataset>& seed_data = std::nullopt);

struct PoolResult {
  Dataset data;
  std::vector<std::size_t> order;
  KernelSpec kernel;
};

/// Discrete variant: repeatedly moves the pool row maximizing the acquisition
/// into the training set. Lowest pool index wins ties.
PoolResult active_learn_pool(const Dataset& pool, int budget, const ActiveLearningConfig& cfg);

}  // namespace lss

#endif  // LSS_ACTIVE_LEARNING_HPP
