#ifndef LSS_KERNEL_LEARNING_HPP
#define LSS_KERNEL_LEARNING_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lss/diverse.hpp"

namespace lss {

enum class PlanOutcome { Accepted, RejectedDownstream, InfeasibleConstraint };
std::string to_string(PlanOutcome o);

/// Planner feedback for one proposed control value on task `task`.
using PlanChecker = std::function<PlanOutcome(std::size_t task, const Vector& theta)>;
/// The learned super-level set the sampler draws from on task `task`.
using SetProvider = std::function<std::shared_ptr<const MembershipSet>(std::size_t task)>;

struct KernelLearningConfig {
  double epsilon = 0.3;
  std::size_t attempt_cap = 50;
  DiverseConfig diverse;
  std::uint64_t seed = 0;
};

struct TaskRecord {
  std::size_t task = 0;
  std::size_t attempts = 0;
  std::size_t updates = 0;
  bool solved = false;
  std::vector<PlanOutcome> outcomes;
  Vector scales_after;
};

struct KernelLearningResult {
  DiversityKernel kernel;
  std::vector<TaskRecord> log;
};

/// Draws from a fresh diverse stream until the planner accepts or the attempt cap
/// is hit. With `learn`, every rejection that had earlier samples shrinks the
/// scale of the coordinate that made it look most novel; `kernel` is updated in place.
TaskRecord run_planning_task(std::size_t task, const MembershipSet& set, const PlanChecker& planner,
                             DiversityKernel& kernel, const KernelLearningConfig& cfg, bool learn,
                             std::uint64_t seed);

/// Sequential kernel learning over tasks [0, task_count). The kernel persists
/// across tasks; the sample history resets per task.
KernelLearningResult task_kernel_learning(std::size_t task_count, const SetProvider& sets,
                                          const PlanChecker& planner, DiversityKernel initial,
                                          const KernelLearningConfig& cfg);

}  // namespace lss

#endif  // LSS_KERNEL_LEARNING_HPP
