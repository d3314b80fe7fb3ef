#ifndef LSS_CONFIG_HPP
#define LSS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lss/active_learning.hpp"
#include "lss/benchmarks.hpp"
#include "lss/harness.hpp"
#include "lss/superlevel.hpp"

namespace lss {

/// Invalid configuration. `path` names the offending field, e.g. "sampler.batch".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TaskSpec {
  std::string kind = "pour";
  std::size_t d_theta = 4;
  std::size_t d_alpha = 4;
  double volume = 0.1;
  double noise = 0.01;
  /// Score shape override; empty keeps the kind's own shape.
  std::string shape;
  double tau = 0.9;
  double falloff = 1.0;
  double drift = 0.6;
};

struct LearnerSpec {
  std::string kernel = "se";
  int restarts = 2;
  int budget = 50;
  int n_seed = 50;
  std::string strategy = "straddle";
  int refit_every = 10;
  int max_iterations = 200;
  int candidates = 1000;
  double scale_max = 1e3;
};

struct SamplerSpec {
  std::vector<std::string> streams{"rejection", "adaptive", "diverse"};
  std::size_t batch = 100;
  std::size_t target = 20;
  double quantile = 0.99;
  std::string pi_scheme = "infinite";
  bool carry_variance = true;
  bool anchor_first = true;
  double diversity_noise = 0.1;
  int round_cap = 1000;
};

struct HarnessSpec {
  std::size_t seeds = 50;
  std::size_t test_tasks = 100;
  std::size_t training_tasks = 50;
  std::size_t eval_every = 10;
  std::size_t attempt_cap = 30;
  std::size_t yield_cap = 100;
  double epsilon = 0.3;
  double gamma = 0.6;
  bool learn_set = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  TaskSpec task;
  LearnerSpec learner;
  SamplerSpec sampler;
  HarnessSpec harness;
  std::string out = "out";
};

/// Parses and validates; unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved form (every field present).
nlohmann::json to_json(const ExperimentConfig& cfg);
/// FNV-1a of the resolved JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

SyntheticTask make_task(const ExperimentConfig& cfg);
ActiveLearningConfig make_learner(const ExperimentConfig& cfg);
DiverseConfig make_diverse(const ExperimentConfig& cfg);
Task1Config make_task1(const ExperimentConfig& cfg);

}  // namespace lss

#endif  // LSS_CONFIG_HPP
