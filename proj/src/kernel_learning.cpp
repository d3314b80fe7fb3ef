#include "lss/kernel_learning.hpp"

namespace lss {

std::string to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::Accepted: return "accepted";
    case PlanOutcome::RejectedDownstream: return "rejected-downstream";
    case PlanOutcome::InfeasibleConstraint: return "infeasible-constraint";
  }
  return "unknown";
}

namespace {

// Non-owning shared_ptr for a set whose lifetime the caller guarantees.
std::shared_ptr<const MembershipSet> borrow(const MembershipSet& set) {
  return std::shared_ptr<const MembershipSet>(&set, [](const MembershipSet*) {});
}

}  // namespace

TaskRecord run_planning_task(std::size_t task, const MembershipSet& set, const PlanChecker& planner,
                             DiversityKernel& kernel, const KernelLearningConfig& cfg, bool learn,
                             std::uint64_t seed) {
  TaskRecord rec;
  rec.task = task;
  DiverseStream stream(borrow(set), kernel, cfg.diverse, seed);
  for (std::size_t attempt = 0; attempt < cfg.attempt_cap; ++attempt) {
    const DiverseDraw draw = stream.draw();
    ++rec.attempts;
    const PlanOutcome outcome = planner(task, draw.theta);
    rec.outcomes.push_back(outcome);
    if (outcome == PlanOutcome::Accepted) {
      rec.solved = true;
      break;
    }
    if (learn && !draw.before.empty()) {
      kernel = kernel_update(kernel, draw.before, draw.theta, cfg.epsilon);
      stream.set_kernel(kernel);
      ++rec.updates;
    }
  }
  rec.scales_after = kernel.inverse_length_scales;
  return rec;
}

KernelLearningResult task_kernel_learning(std::size_t task_count, const SetProvider& sets,
                                          const PlanChecker& planner, DiversityKernel initial,
                                          const KernelLearningConfig& cfg) {
  KernelLearningResult result{std::move(initial), {}};
  for (std::size_t t = 0; t < task_count; ++t) {
    const auto set = sets(t);
    if (!set) throw DomainError("task_kernel_learning: no set for task " + std::to_string(t));
    result.log.push_back(
        run_planning_task(t, *set, planner, result.kernel, cfg, true, Rng::derive(cfg.seed, t)));
  }
  return result;
}

}  // namespace lss
