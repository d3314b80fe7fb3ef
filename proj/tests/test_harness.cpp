#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "lss/harness.hpp"
#include "support.hpp"

using namespace lss;
using lss::testing::Gen;

namespace {

// Always yields the same point.
class ConstantStream final : public SampleStream {
 public:
  explicit ConstantStream(Vector p) : p_(std::move(p)) {}
  Vector next() override {
    ++stats_.yields;
    return p_;
  }
  std::string name() const override { return "constant"; }

 private:
  Vector p_;
};

// Uniform on the box, ignoring membership. Throws after `fail_after` yields when set.
class UniformStream final : public SampleStream {
 public:
  UniformStream(std::size_t dim, std::uint64_t seed, std::size_t fail_after = 0)
      : dim_(dim), rng_(seed), fail_after_(fail_after) {}
  Vector next() override {
    if (fail_after_ && stats_.yields == fail_after_) throw SamplerCapError("out of proposals");
    ++stats_.yields;
    ++stats_.membership_calls;
    return rng_.uniform_vector(dim_);
  }
  std::string name() const override { return "uniform"; }

 private:
  std::size_t dim_;
  Rng rng_;
  std::size_t fail_after_;
};

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("plan check outcomes") {
  const SyntheticTask two = make_two_box_task();
  MockTask m{two, Vector(), std::size_t{0}};
  CHECK(plan_check(m, v2(0.2, 0.5)) == PlanOutcome::RejectedDownstream);
  CHECK(plan_check(m, v2(0.45, 0.5)) == PlanOutcome::Accepted);
  CHECK(plan_check(m, v2(0.9, 0.5)) == PlanOutcome::InfeasibleConstraint);
  CHECK(attempt_score(m, v2(0.9, 0.5)) == -0.1);
  CHECK(attempt_score(m, v2(0.2, 0.5)) == -0.1);
  m.blocked_box.reset();
  CHECK(plan_check(m, v2(0.2, 0.5)) == PlanOutcome::Accepted);

  Rng rng(3);
  int first = 0;
  for (int i = 0; i < 2000; ++i) first += *draw_blocked_instance(two, rng).blocked_box == 0;
  CHECK(first / 2000.0 == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(draw_blocked_instance(make_pour_task(2, 1), rng).blocked_box.has_value());
}

TEST_CASE("discounted reward") {
  CHECK(discounted_reward({true}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(discounted_reward({true, true}) == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(discounted_reward({false, false}) == 0.0);
  CHECK(discounted_reward({false, true}, 0.5) == 0.25);
  CHECK(discounted_reward({}) == 0.0);
  CHECK_THROWS_AS(discounted_reward({true}, 1.0), DomainError);
  CHECK_THROWS_AS(discounted_reward({true}, 0.0), DomainError);

  Gen g(51);
  for (int t = 0; t < 200; ++t) {
    std::vector<bool> flags;
    const auto n = g.integer(0, 12);
    for (int i = 0; i < n; ++i) flags.push_back(g.uniform() < 0.5);
    const double j = discounted_reward(flags);
    CHECK(j >= 0.0);
    CHECK(j <= 1.5 + 1e-12);
    std::vector<bool> shifted{false};
    shifted.insert(shifted.end(), flags.begin(), flags.end());
    CHECK(discounted_reward(shifted) <= j + 1e-15);
  }
}

TEST_CASE("f1 score") {
  CHECK(f1_score({true, false, true}, {true, false, true}) == 1.0);
  CHECK(f1_score({false, false}, {false, false}) == 0.0);
  CHECK(f1_score({true, true, false}, {true, false, true}) == doctest::Approx(0.5));
  CHECK(f1_score({true, true, true, true}, {true, false, false, false}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(f1_score({true}, {true, false}), DimensionError);
}

TEST_CASE("summary statistics") {
  const Summary s = summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == 2.0);
  CHECK(s.sd == 1.0);
  CHECK(s.count == 3);
  CHECK(summarize({}).count == 0);
  CHECK(summarize({4.0}).sd == 0.0);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  for (int jobs : {1, 4}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, jobs,
                                 [](std::size_t i) {
                                   if (i == 6) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("evaluate_sampler on a perfect sampler") {
  const SyntheticTask t = make_pour_task(2, 1, 0.1, 0.0, 1);
  EvalConfig cfg;
  cfg.seeds = 8;
  const StreamFactory perfect = [&](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    SamplerUnit u;
    u.context = rng.uniform_vector(1);
    u.stream = std::make_unique<ConstantStream>(t.center(u.context));
    return u;
  };
  const SamplerMetrics m = evaluate_sampler("perfect", perfect, t, cfg);
  CHECK(m.method == "perfect");
  CHECK(m.seeds.size() == 8);
  CHECK(m.fp_rate.mean == 0.0);
  CHECK(m.n5.mean == 5.0);
  CHECK(m.capped_runs == 0);
  CHECK(m.failed_runs == 0);
  // Five copies of one point: log det(J / 0.01 + I) = log 501.
  CHECK(m.diversity5.mean == doctest::Approx(std::log(501.0)).epsilon(1e-9));
  double full = 0.0;
  for (int n = 1; n <= 50; ++n) full += std::pow(0.6, n);
  CHECK(m.reward.mean == doctest::Approx(full).epsilon(1e-12));
  for (const SeedMetrics& s : m.seeds) CHECK(s.yields == 50);
}

TEST_CASE("evaluate_sampler on a uniform sampler over a half-volume region") {
  const SyntheticTask t = make_pour_task(1, 0, 0.5, 0.0, 1);
  EvalConfig cfg;
  cfg.seeds = 400;
  cfg.root_seed = 9;
  const StreamFactory uniform = [&](std::size_t, std::uint64_t seed) {
    return SamplerUnit{std::make_unique<UniformStream>(1, seed), Vector()};
  };
  const SamplerMetrics m = evaluate_sampler("uniform", uniform, t, cfg);
  CHECK(m.fp_rate.mean == doctest::Approx(0.5).epsilon(0.05));
  CHECK(m.n5.mean == doctest::Approx(10.0).epsilon(0.1));
  CHECK(m.t50_calls.mean == 50.0);

  cfg.jobs = 4;
  const SamplerMetrics par = evaluate_sampler("uniform", uniform, t, cfg);
  CHECK(par.fp_rate.mean == m.fp_rate.mean);
  CHECK(par.n5.mean == m.n5.mean);
  CHECK(par.diversity5.mean == m.diversity5.mean);
  for (std::size_t i = 0; i < m.seeds.size(); ++i) CHECK(par.seeds[i].seed == m.seeds[i].seed);
}

TEST_CASE("evaluate_sampler records failures and caps") {
  const SyntheticTask t = make_pour_task(2, 0, 0.01, 0.0, 1);
  EvalConfig cfg;
  cfg.seeds = 5;
  const StreamFactory failing = [&](std::size_t, std::uint64_t seed) {
    return SamplerUnit{std::make_unique<UniformStream>(2, seed, 3), Vector()};
  };
  const SamplerMetrics m = evaluate_sampler("failing", failing, t, cfg);
  CHECK(m.failed_runs == 5);
  CHECK(m.fp_rate.count == 0);
  for (const SeedMetrics& s : m.seeds) {
    CHECK(s.yields == 3);
    CHECK_FALSE(s.failure.empty());
  }
  const StreamFactory far = [&](std::size_t, std::uint64_t) {
    return SamplerUnit{std::make_unique<ConstantStream>(Vector::Zero(2)), Vector()};
  };
  const SamplerMetrics capped = evaluate_sampler("far", far, t, cfg);
  CHECK(capped.capped_runs == 5);
  CHECK(capped.n5.mean == 100.0);
  CHECK(capped.fp_rate.mean == 1.0);
  CHECK(capped.diversity5.count == 0);
  cfg.yield_cap = 4;
  CHECK_THROWS_AS(evaluate_sampler("far", far, t, cfg), DomainError);
}

TEST_CASE("membership test set") {
  Rng rng(4);
  const SyntheticTask t = make_pour_task(3, 2, 0.05, 0.0, 1);
  const MembershipTestSet inside = make_membership_test_set(t, 500, rng, 1.0);
  for (bool b : inside.truth) CHECK(b);
  const MembershipTestSet plain = make_membership_test_set(t, 20000, rng, 0.0);
  double pos = 0.0;
  for (bool b : plain.truth) pos += b;
  CHECK(pos / 20000.0 == doctest::Approx(0.05).epsilon(0.2));
  CHECK(plain.contexts.size() == 20000);
  CHECK(plain.contexts[0].size() == 2);
  const MembershipTestSet two = make_membership_test_set(make_two_box_task(), 300, rng, 1.0);
  for (bool b : two.truth) CHECK(b);

  const GpModel prior(Dataset{}, KernelSpec::isotropic(KernelKind::SquaredExponential, 5));
  CHECK(membership_f1(prior, inside) == 0.0);
}

TEST_CASE("task one experiment") {
  Task1Config cfg;
  cfg.seeds = 3;
  cfg.training_tasks = 20;
  cfg.test_tasks = 20;
  cfg.eval_every = 10;
  cfg.epsilon = 0.0;
  const Task1Result frozen = run_task1_experiment(cfg);
  CHECK(frozen.curve.size() == 9);
  CHECK(frozen.optimal_reward == doctest::Approx(0.48));
  CHECK(frozen.empirical_optimal_reward >= frozen.optimal_reward);
  CHECK(frozen.empirical_optimal_reward <= 0.6);
  for (std::size_t i = 0; i < frozen.curve.size(); i += 3) {
    CHECK(frozen.curve[i].method == "adaptive");
    CHECK(frozen.curve[i + 2].reward.mean == frozen.curve[i + 1].reward.mean);
    CHECK(frozen.curve[i + 2].samples.mean == frozen.curve[i + 1].samples.mean);
  }
  for (const Task1SeedResult& s : frozen.seeds) CHECK(s.final_scales == Vector::Ones(2));

  cfg.epsilon = 0.3;
  cfg.seeds = 6;
  const Task1Result learned = run_task1_experiment(cfg);
  const CurvePoint& fixed = learned.curve[learned.curve.size() - 2];
  const CurvePoint& last = learned.curve.back();
  MESSAGE("learned J " << last.reward.mean << " fixed J " << fixed.reward.mean);
  CHECK(last.reward.mean >= fixed.reward.mean);
  CHECK(last.scales[1] < 1.0);

  cfg.jobs = 3;
  const Task1Result par = run_task1_experiment(cfg);
  CHECK(par.curve.back().reward.mean == last.reward.mean);

  cfg.eval_every = 0;
  CHECK_THROWS_AS(run_task1_experiment(cfg), DomainError);
  cfg.eval_every = 10;
  cfg.epsilon = 1.0;
  CHECK_THROWS_AS(run_task1_experiment(cfg), DomainError);
}
