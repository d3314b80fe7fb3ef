#ifndef LSS_HARNESS_HPP
#define LSS_HARNESS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lss/benchmarks.hpp"
#include "lss/hyperfit.hpp"
#include "lss/kernel_learning.hpp"

namespace lss {

/// One planning instance: the synthetic constraint plus a hidden downstream
/// rejector. For box-union tasks the rejector blocks one box.
struct MockTask {
  SyntheticTask synthetic;
  Vector context;
  std::optional<std::size_t> blocked_box;
  double invalid_penalty = -0.1;
};

/// Blocks one of the task's boxes uniformly at random.
MockTask draw_blocked_instance(const SyntheticTask& task, Rng& rng);

PlanOutcome plan_check(const MockTask& task, const Vector& theta);

/// Score the learner would record for an attempted sample: the true score when
/// the plan goes through, the invalid penalty otherwise.
double attempt_score(const MockTask& task, const Vector& theta);

/// sum_n flag_n gamma^n with n starting at 1.
double discounted_reward(const std::vector<bool>& flags, double gamma = 0.6);

/// Binary F1 of `predicted` against `actual`. Zero when there are no positives at all.
double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& actual);

/// Held-out (theta, alpha) pairs with ground-truth membership.
struct MembershipTestSet {
  std::vector<Vector> thetas;
  std::vector<Vector> contexts;
  std::vector<bool> truth;
};

/// Uniform test points; `positive_share` of them are resampled from inside the
/// region so that F1 is informative for small regions.
MembershipTestSet make_membership_test_set(const SyntheticTask& task, std::size_t count, Rng& rng,
                                           double positive_share = 0.5);

/// F1 of the classifier mu > 0 on the test set.
double membership_f1(const GpModel& model, const MembershipTestSet& test);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};
Summary summarize(const std::vector<double>& values);

struct SeedMetrics {
  std::uint64_t seed = 0;
  double fp_rate = 0.0;
  double t50_seconds = 0.0;
  std::size_t t50_calls = 0;
  /// Yields needed for the target number of positives; the cap when not reached.
  std::size_t n5 = 0;
  bool n5_capped = false;
  /// Only meaningful when n5 is not capped.
  double diversity5 = 0.0;
  double reward = 0.0;
  std::size_t yields = 0;
  std::size_t membership_calls = 0;
  /// The stream threw (e.g. a rejection cap) before finishing.
  bool failed = false;
  std::string failure;
};

struct SamplerMetrics {
  std::string method;
  std::vector<SeedMetrics> seeds;
  Summary fp_rate, t50_seconds, t50_calls, n5, diversity5, reward;
  std::size_t capped_runs = 0;
  std::size_t failed_runs = 0;
};

/// A stream together with the context its set was built for.
struct SamplerUnit {
  std::unique_ptr<SampleStream> stream;
  Vector context;
};

/// Builds the stream for one seed. Called concurrently when jobs > 1.
using StreamFactory = std::function<SamplerUnit(std::size_t index, std::uint64_t seed)>;

struct EvalConfig {
  std::size_t seeds = 50;
  std::uint64_t root_seed = 0;
  std::size_t fp_window = 50;
  std::size_t positives = 5;
  std::size_t yield_cap = 100;
  double gamma = 0.6;
  DiversityKernel reference = DiversityKernel::unit(1, 0.1);
  int jobs = 1;
};

/// Runs each seed's stream for up to `yield_cap` yields and scores the yields
/// against the task's ground truth. Seed i uses Rng::derive(root_seed, i).
SamplerMetrics evaluate_sampler(const std::string& method, const StreamFactory& factory,
                                const SyntheticTask& task, const EvalConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

struct Task1Config {
  std::size_t seeds = 10;
  std::size_t training_tasks = 50;
  std::size_t test_tasks = 100;
  /// Evaluate the learned kernel after every block of this many training tasks.
  std::size_t eval_every = 10;
  std::size_t attempt_cap = 30;
  double epsilon = 0.3;
  double gamma = 0.6;
  std::uint64_t seed = 0;
  DiverseConfig diverse;
  /// Learn the feasible set with a GP first instead of using the true boxes.
  bool learn_set = false;
  int gp_budget = 60;
  double quantile = 0.95;
  FitConfig fit;
  SearchConfig search;
  int jobs = 1;
};

struct CurvePoint {
  std::string method;
  std::size_t tasks_trained = 0;
  Summary reward;
  Summary samples;
  double solved_fraction = 0.0;
  /// Mean inverse length scales over seeds (fixed kernel for the fixed method).
  Vector scales;
};

struct Task1SeedResult {
  std::uint64_t seed = 0;
  Vector final_scales;
  std::size_t updates = 0;
};

struct Task1Result {
  std::vector<CurvePoint> curve;
  std::vector<Task1SeedResult> seeds;
  /// Best achievable mean reward: a sample in one box, then the other.
  double optimal_reward = 0.0;
  /// The same strategy scored on the drawn test instances, whose block split is
  /// not exactly even.
  double empirical_optimal_reward = 0.0;
};

/// Reward of the strategy that tries one box and switches after a failure,
/// when each box is blocked with probability one half.
double two_box_optimal_reward(double gamma);

Task1Result run_task1_experiment(const Task1Config& cfg);

}  // namespace lss

#endif  // LSS_HARNESS_HPP
