#include "lss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace lss {

MockTask draw_blocked_instance(const SyntheticTask& task, Rng& rng) {
  MockTask m;
  m.synthetic = task;
  m.context = rng.uniform_vector(task.d_alpha);
  if (task.region == RegionKind::BoxUnion && task.boxes.size() > 1) m.blocked_box = rng.index(task.boxes.size());
  return m;
}

PlanOutcome plan_check(const MockTask& task, const Vector& theta) {
  if (!task.synthetic.member(theta, task.context)) return PlanOutcome::InfeasibleConstraint;
  if (task.blocked_box && task.synthetic.boxes.at(*task.blocked_box).contains(theta))
    return PlanOutcome::RejectedDownstream;
  return PlanOutcome::Accepted;
}

double attempt_score(const MockTask& task, const Vector& theta) {
  if (plan_check(task, theta) != PlanOutcome::Accepted) return task.invalid_penalty;
  return task.synthetic.score(theta, task.context);
}

double discounted_reward(const std::vector<bool>& flags, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("discounted_reward: gamma must lie in (0, 1)");
  double j = 0.0, g = gamma;
  for (bool f : flags) {
    if (f) j += g;
    g *= gamma;
  }
  return j;
}

double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size()) throw DimensionError("f1_score: size mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++tp;
    else if (predicted[i]) ++fp;
    else if (actual[i]) ++fn;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

namespace {

Vector sample_inside(const SyntheticTask& task, const Vector& alpha, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(task.d_theta);
  if (task.region == RegionKind::Ellipsoid) {
    Vector dir(d);
    for (Eigen::Index i = 0; i < d; ++i) dir[i] = rng.normal();
    dir /= dir.norm();
    const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    return task.center(alpha) + (r * dir.array() * task.radii.array()).matrix();
  }
  std::vector<double> vols;
  for (const Box& b : task.boxes) vols.push_back(b.volume());
  std::discrete_distribution<std::size_t> pick(vols.begin(), vols.end());
  return rng.uniform_in(task.boxes[pick(rng.engine())]);
}

}  // namespace

MembershipTestSet make_membership_test_set(const SyntheticTask& task, std::size_t count, Rng& rng,
                                           double positive_share) {
  MembershipTestSet out;
  for (std::size_t i = 0; i < count; ++i) {
    Vector alpha = rng.uniform_vector(task.d_alpha);
    Vector theta = rng.uniform() < positive_share ? sample_inside(task, alpha, rng)
                                                  : rng.uniform_vector(task.d_theta);
    out.truth.push_back(task.member(theta, alpha));
    out.thetas.push_back(std::move(theta));
    out.contexts.push_back(std::move(alpha));
  }
  return out;
}

double membership_f1(const GpModel& model, const MembershipTestSet& test) {
  Matrix xs(static_cast<Eigen::Index>(model.input_dim()), static_cast<Eigen::Index>(test.thetas.size()));
  for (std::size_t i = 0; i < test.thetas.size(); ++i) xs.col(static_cast<Eigen::Index>(i)) = concat(test.thetas[i], test.contexts[i]);
  const auto preds = model.predict_batch(xs);
  std::vector<bool> predicted;
  for (const auto& p : preds) predicted.push_back(p.mean > 0.0);
  return f1_score(predicted, test.truth);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

SeedMetrics run_one_seed(const StreamFactory& factory, const SyntheticTask& task, const EvalConfig& cfg,
                         const DiversityKernel& reference, std::size_t index) {
  SeedMetrics m;
  m.seed = Rng::derive(cfg.root_seed, index);
  SamplerUnit unit = factory(index, m.seed);
  std::vector<bool> flags;
  std::vector<Vector> positives;
  const auto start = std::chrono::steady_clock::now();
  try {
    for (std::size_t y = 1; y <= cfg.yield_cap; ++y) {
      const Vector theta = unit.stream->next();
      const bool ok = task.member(theta, unit.context);
      flags.push_back(ok);
      if (ok && positives.size() < cfg.positives) {
        positives.push_back(theta);
        if (positives.size() == cfg.positives) m.n5 = y;
      }
      if (y == cfg.fp_window) {
        m.t50_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m.t50_calls = unit.stream->stats().membership_calls;
      }
      if (y >= cfg.fp_window && positives.size() == cfg.positives) break;
    }
  } catch (const std::exception& e) {
    m.failed = true;
    m.failure = e.what();
  }
  m.yields = flags.size();
  m.membership_calls = unit.stream->stats().membership_calls;
  const std::size_t window = std::min(flags.size(), cfg.fp_window);
  if (window > 0) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < window; ++i) bad += flags[i] ? 0 : 1;
    m.fp_rate = static_cast<double>(bad) / static_cast<double>(window);
  }
  m.reward = discounted_reward(std::vector<bool>(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(window)),
                               cfg.gamma);
  if (positives.size() < cfg.positives) {
    m.n5_capped = true;
    m.n5 = cfg.yield_cap;
  } else {
    m.diversity5 = diversity(positives, reference);
  }
  return m;
}

}  // namespace

SamplerMetrics evaluate_sampler(const std::string& method, const StreamFactory& factory, const SyntheticTask& task,
                                const EvalConfig& cfg) {
  if (cfg.positives == 0 || cfg.yield_cap < cfg.positives) throw DomainError("evaluate_sampler: bad yield cap");
  DiversityKernel reference = cfg.reference;
  if (reference.dim() != task.d_theta) reference = DiversityKernel::unit(task.d_theta, cfg.reference.noise);
  SamplerMetrics out;
  out.method = method;
  out.seeds.resize(cfg.seeds);
  parallel_for(cfg.seeds, cfg.jobs,
               [&](std::size_t i) { out.seeds[i] = run_one_seed(factory, task, cfg, reference, i); });
  std::vector<double> fp, t50s, t50c, n5, div, rew;
  for (const auto& s : out.seeds) {
    if (s.failed) ++out.failed_runs;
    if (s.n5_capped) ++out.capped_runs;
    if (s.yields >= cfg.fp_window) {
      t50s.push_back(s.t50_seconds);
      t50c.push_back(static_cast<double>(s.t50_calls));
    }
    if (s.failed) continue;
    fp.push_back(s.fp_rate);
    rew.push_back(s.reward);
    n5.push_back(static_cast<double>(s.n5));
    if (!s.n5_capped) div.push_back(s.diversity5);
  }
  out.fp_rate = summarize(fp);
  out.t50_seconds = summarize(t50s);
  out.t50_calls = summarize(t50c);
  out.n5 = summarize(n5);
  out.diversity5 = summarize(div);
  out.reward = summarize(rew);
  return out;
}

double two_box_optimal_reward(double gamma) { return 0.5 * gamma + 0.5 * gamma * gamma; }

namespace {

struct Attempt {
  double reward = 0.0;
  double samples = 0.0;
  bool solved = false;
};

Attempt score_record(const TaskRecord& rec, double gamma, std::size_t cap) {
  Attempt a;
  a.solved = rec.solved;
  a.samples = static_cast<double>(rec.solved ? rec.attempts : cap);
  if (rec.solved) a.reward = std::pow(gamma, static_cast<double>(rec.attempts));
  return a;
}

Attempt run_adaptive_task(const MembershipSet& set, const MockTask& task, const Task1Config& cfg,
                          std::uint64_t seed) {
  AdaptiveStream stream(std::shared_ptr<const MembershipSet>(&set, [](const MembershipSet*) {}),
                        cfg.diverse.adaptive, seed);
  TaskRecord rec;
  for (std::size_t i = 0; i < cfg.attempt_cap; ++i) {
    ++rec.attempts;
    if (plan_check(task, stream.next()) == PlanOutcome::Accepted) {
      rec.solved = true;
      break;
    }
  }
  return score_record(rec, cfg.gamma, cfg.attempt_cap);
}

std::shared_ptr<const MembershipSet> task1_set(const SyntheticTask& task, const Task1Config& cfg,
                                               std::uint64_t seed) {
  if (!cfg.learn_set) {
    std::size_t largest = 0;
    for (std::size_t b = 1; b < task.boxes.size(); ++b)
      if (task.boxes[b].volume() > task.boxes[largest].volume()) largest = b;
    const Vector anchor = 0.5 * (task.boxes[largest].lower + task.boxes[largest].upper);
    return std::make_shared<PredicateSet>(
        task.d_theta, [task](const Vector& t) { return task.member(t, Vector()); }, anchor);
  }
  ActiveLearningConfig al;
  al.fit = cfg.fit;
  al.fit.seed = Rng::derive(seed, 11);
  al.search = cfg.search;
  al.seed = Rng::derive(seed, 12);
  al.refit_every = 10;
  ContextSource contexts = ContextSource::uniform(task.d_alpha);
  const auto learned = active_learn(task.oracle(), contexts, task.d_theta, cfg.gp_budget, al);
  auto model = std::make_shared<const GpModel>(learned.data, learned.kernel);
  Rng rng(Rng::derive(seed, 13));
  return std::make_shared<SuperLevelSet>(
      build_superlevel_set(model, Vector(), cfg.quantile, cfg.search, rng));
}

struct SeedCurve {
  // [checkpoint][test task]
  std::vector<std::vector<Attempt>> learned;
  std::vector<Attempt> fixed;
  std::vector<Attempt> adaptive;
  std::vector<Vector> learned_scales;
  Task1SeedResult summary;
  std::size_t first_box_blocked = 0;
};

SeedCurve run_task1_seed(const Task1Config& cfg, std::size_t index, const std::vector<std::size_t>& checkpoints) {
  SeedCurve out;
  const std::uint64_t seed = Rng::derive(cfg.seed, index);
  out.summary.seed = seed;
  const SyntheticTask task = make_two_box_task(0.0, seed);
  const auto set = task1_set(task, cfg, seed);

  Rng train_rng(Rng::derive(seed, 1)), test_rng(Rng::derive(seed, 2));
  std::vector<MockTask> train, test;
  for (std::size_t t = 0; t < cfg.training_tasks; ++t) train.push_back(draw_blocked_instance(task, train_rng));
  for (std::size_t t = 0; t < cfg.test_tasks; ++t) test.push_back(draw_blocked_instance(task, test_rng));
  const std::uint64_t train_seed = Rng::derive(seed, 3), test_seed = Rng::derive(seed, 4);
  for (const MockTask& m : test) out.first_box_blocked += m.blocked_box == std::size_t{0};

  KernelLearningConfig kl;
  kl.epsilon = cfg.epsilon;
  kl.attempt_cap = cfg.attempt_cap;
  kl.diverse = cfg.diverse;

  const PlanChecker test_planner = [&](std::size_t t, const Vector& th) { return plan_check(test[t], th); };
  const PlanChecker train_planner = [&](std::size_t t, const Vector& th) { return plan_check(train[t], th); };

  auto evaluate = [&](const DiversityKernel& kernel) {
    std::vector<Attempt> res;
    for (std::size_t t = 0; t < cfg.test_tasks; ++t) {
      DiversityKernel k = kernel;
      res.push_back(score_record(run_planning_task(t, *set, test_planner, k, kl, false, Rng::derive(test_seed, t)),
                                 cfg.gamma, cfg.attempt_cap));
    }
    return res;
  };

  const DiversityKernel fixed = DiversityKernel::unit(task.d_theta);
  out.fixed = evaluate(fixed);
  for (std::size_t t = 0; t < cfg.test_tasks; ++t)
    out.adaptive.push_back(run_adaptive_task(*set, test[t], cfg, Rng::derive(test_seed, t)));

  DiversityKernel learned = fixed;
  std::size_t trained = 0;
  for (std::size_t cp : checkpoints) {
    for (; trained < cp; ++trained) {
      const auto rec = run_planning_task(trained, *set, train_planner, learned, kl, true,
                                         Rng::derive(train_seed, trained));
      out.summary.updates += rec.updates;
    }
    out.learned.push_back(evaluate(learned));
    out.learned_scales.push_back(learned.inverse_length_scales);
  }
  out.summary.final_scales = learned.inverse_length_scales;
  return out;
}

CurvePoint aggregate(const std::string& method, std::size_t trained, const std::vector<const std::vector<Attempt>*>& runs,
                     const Vector& scales) {
  CurvePoint p;
  p.method = method;
  p.tasks_trained = trained;
  std::vector<double> r, s;
  std::size_t solved = 0;
  for (const auto* run : runs)
    for (const Attempt& a : *run) {
      r.push_back(a.reward);
      s.push_back(a.samples);
      solved += a.solved ? 1 : 0;
    }
  p.reward = summarize(r);
  p.samples = summarize(s);
  p.solved_fraction = r.empty() ? 0.0 : static_cast<double>(solved) / static_cast<double>(r.size());
  p.scales = scales;
  return p;
}

}  // namespace

Task1Result run_task1_experiment(const Task1Config& cfg) {
  if (cfg.seeds == 0 || cfg.test_tasks == 0) throw DomainError("task1: seeds and test_tasks must be positive");
  if (cfg.eval_every == 0) throw DomainError("task1: eval_every must be positive");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw DomainError("task1: epsilon must lie in [0, 1)");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("task1: gamma must lie in (0, 1)");
  std::vector<std::size_t> checkpoints;
  for (std::size_t c = 0; c < cfg.training_tasks; c += cfg.eval_every) checkpoints.push_back(c);
  checkpoints.push_back(cfg.training_tasks);

  std::vector<SeedCurve> curves(cfg.seeds);
  parallel_for(cfg.seeds, cfg.jobs, [&](std::size_t i) { curves[i] = run_task1_seed(cfg, i, checkpoints); });

  Task1Result out;
  out.optimal_reward = two_box_optimal_reward(cfg.gamma);
  std::size_t blocked0 = 0;
  for (const auto& sc : curves) blocked0 += sc.first_box_blocked;
  const double p0 = static_cast<double>(blocked0) / static_cast<double>(cfg.seeds * cfg.test_tasks);
  const double g = cfg.gamma;
  out.empirical_optimal_reward = std::max(g * (1 - p0) + g * g * p0, g * p0 + g * g * (1 - p0));
  const Vector unit_scales = Vector::Ones(2);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<const std::vector<Attempt>*> adaptive, fixed, learned;
    Vector scales = Vector::Zero(2);
    for (const auto& sc : curves) {
      adaptive.push_back(&sc.adaptive);
      fixed.push_back(&sc.fixed);
      learned.push_back(&sc.learned[c]);
      scales += sc.learned_scales[c];
    }
    scales /= static_cast<double>(curves.size());
    out.curve.push_back(aggregate("adaptive", checkpoints[c], adaptive, Vector()));
    out.curve.push_back(aggregate("diverse-fixed", checkpoints[c], fixed, unit_scales));
    out.curve.push_back(aggregate("diverse-learned", checkpoints[c], learned, scales));
  }
  for (auto& sc : curves) out.seeds.push_back(std::move(sc.summary));
  return out;
}

}  // namespace lss
