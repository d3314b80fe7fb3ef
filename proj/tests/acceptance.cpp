// Acceptance gate: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "lss/diverse.hpp"
#include "lss/harness.hpp"
#include "lss/normal.hpp"
#include "lss/superlevel.hpp"
#include "support.hpp"

using namespace lss;
using lss::testing::Gen;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// One-sided paired t statistic of a - b.
double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
  const Summary s = summarize(d);
  return s.mean / (s.sd / std::sqrt(static_cast<double>(d.size())));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict gp_oracle() {
  Gen g(1001);
  double worst = 0.0;
  const KernelKind kinds[] = {KernelKind::SquaredExponential, KernelKind::Matern52, KernelKind::MultiLayerPerceptron};
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 30));
    const auto d = static_cast<std::size_t>(g.integer(1, 6));
    const KernelSpec k = g.kernel(kinds[t % 3], d);
    const Dataset data = g.dataset(n, d, g.uniform(0.05, 0.5));
    const GpModel model(data, k);
    for (int q = 0; q < 20; ++q) {
      const Vector x = g.point(d);
      const Prediction p = model.predict(x), r = lss::testing::ref_posterior(data, k, x);
      worst = std::max({worst, std::abs(p.mean - r.mean), std::abs(p.variance - r.variance)});
    }
  }
  return {worst <= 1e-8, "max abs error " + fmt("%.3g", worst) + " (tol 1e-8)"};
}

Verdict shape_anchors() {
  auto make = [](ShapeKind kind, double tau = 0.9) {
    ScoreShape s;
    s.kind = kind;
    s.tau = tau;
    return s;
  };
  ScoreShape push = make(ShapeKind::Push);
  push.goal = (Vector(2) << 0.25, 0.6).finished();
  const double checks[][2] = {
      {shape_score(make(ShapeKind::Pour2D), 0.95), 0.0},
      {shape_score(make(ShapeKind::Pour2D), 1.0), std::numbers::e - 1.0},
      {shape_score(make(ShapeKind::Scoop2D), 0.5), 0.0},
      {shape_score(push, push.goal), 2.0},
      {shape_score(make(ShapeKind::Piecewise, 0.9), 0.0), -1.0},
      {shape_score(make(ShapeKind::Piecewise, 0.9), 0.9), 0.0},
      {shape_score(make(ShapeKind::Piecewise, 0.9), 1.0), 1.0},
      {shape_score(make(ShapeKind::Piecewise, 0.3), 0.3), 0.0},
  };
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, std::abs(c[0] - c[1]));
  return {worst <= 1e-12, "max deviation " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

// Prior draws on a grid; each trial conditions on 5 noisy points, then picks up to
// T grid points with phi > beta_i, taking the least confident admissible point
// each time. A trial is violated when any pick has g <= 0.
Verdict union_bound_monte_carlo() {
  const int grid = 200, trials = 1000, horizon = 10;
  const double noise = 0.1;
  const KernelSpec k = KernelSpec::isotropic(KernelKind::SquaredExponential, 1, 1.0, 0.1);
  std::vector<Vector> xs;
  Matrix xm(1, grid);
  for (int i = 0; i < grid; ++i) {
    xs.push_back(Vector::Constant(1, i / (grid - 1.0)));
    xm(0, i) = i / (grid - 1.0);
  }
  Matrix kk = gram(k, xs);
  kk.diagonal().array() += 1e-10;
  const Matrix chol = kk.llt().matrixL();
  std::vector<double> betas;
  for (int i = 1; i <= horizon; ++i) betas.push_back(beta_union_bound(0.05, static_cast<std::size_t>(i), {PiScheme::Uniform, static_cast<std::size_t>(horizon)}));

  Rng rng(2024);
  int violated = 0;
  double picks = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector z(grid);
    for (int i = 0; i < grid; ++i) z[i] = rng.normal();
    const Vector f = chol * z;
    Dataset d;
    d.noise_std = noise;
    for (std::size_t j = 0; j < 5; ++j) {
      const auto idx = static_cast<Eigen::Index>(rng.index(grid));
      d.add(xs[static_cast<std::size_t>(idx)], f[idx] + noise * rng.normal());
    }
    const GpModel model(d, k);
    const auto preds = model.predict_batch(xm);
    std::vector<bool> used(grid, false);
    bool bad = false;
    for (int i = 0; i < horizon; ++i) {
      int pick = -1;
      double lowest = 1e300;
      for (int j = 0; j < grid; ++j) {
        const double phi = confidence_ratio(preds[static_cast<std::size_t>(j)]);
        if (!used[static_cast<std::size_t>(j)] && phi > betas[static_cast<std::size_t>(i)] && phi < lowest) {
          lowest = phi;
          pick = j;
        }
      }
      if (pick < 0) break;
      used[static_cast<std::size_t>(pick)] = true;
      picks += 1.0;
      bad = bad || f[pick] <= 0.0;
    }
    violated += bad;
  }
  const double rate = violated / static_cast<double>(trials);
  return {rate <= 0.07, "violation rate " + fmt("%.3f", rate) + " (max 0.07), mean picks per trial " +
                            fmt("%.2f", picks / trials)};
}

Verdict straddle_vs_random() {
  std::vector<double> straddle, random;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SyntheticTask task = make_piecewise_task(4, 4, 0.9, 0.1, 0.01, Rng::derive(1, s));
    Rng test_rng(Rng::derive(2, s));
    const MembershipTestSet test = make_membership_test_set(task, 2000, test_rng);
    for (Strategy strategy : {Strategy::Straddle, Strategy::Random}) {
      ActiveLearningConfig al;
      al.strategy = strategy;
      al.n_seed = 50;
      al.refit_every = 10;
      al.seed = Rng::derive(3, s);
      al.fit.seed = Rng::derive(4, s);
      al.fit.restarts = 0;
      al.fit.max_iterations = 60;
      ContextSource ctx = ContextSource::uniform(4);
      const ActiveLearningResult r = active_learn(task.oracle(), ctx, 4, 50, al);
      const double f1 = membership_f1(GpModel(r.data, r.kernel), test);
      (strategy == Strategy::Straddle ? straddle : random).push_back(f1);
    }
  }
  const double t = paired_t(straddle, random);
  const double ms = summarize(straddle).mean, mr = summarize(random).mean;
  return {ms > mr && t > 1.729, "F1 straddle " + fmt("%.3f", ms) + " random " + fmt("%.3f", mr) + ", paired t " +
                                    fmt("%.2f", t) + " (one-sided 95%: 1.729)"};
}

Verdict adaptive_vs_rejection() {
  const double volume = 0.002;
  const SyntheticTask t = make_pour_task(4, 0, volume, 0.0, 1);
  auto set = std::make_shared<PredicateSet>(4, [t](const Vector& x) { return t.member(x, Vector()); }, t.center(Vector()));
  std::vector<double> ratios;
  for (std::uint64_t s = 0; s < 20; ++s) {
    AdaptiveStream a(set, AdaptiveConfig{}, Rng::derive(7, s));
    RejectionStream r(set, Rng::derive(8, s));
    for (int i = 0; i < 50; ++i) {
      a.next();
      r.next();
    }
    ratios.push_back(static_cast<double>(r.stats().membership_calls) / static_cast<double>(a.stats().membership_calls));
  }
  const double m = median(ratios);
  return {m >= 5.0, "median call ratio " + fmt("%.2f", m) + " at volume " + fmt("%.3f", volume) + " (min 5)"};
}

Verdict diverse_vs_adaptive() {
  const SyntheticTask task = make_pour_task(4, 4, 0.1, 0.01, 3);
  ActiveLearningConfig al;
  al.n_seed = 50;
  al.refit_every = 10;
  al.seed = 5;
  al.fit.seed = 6;
  al.fit.restarts = 0;
  al.fit.max_iterations = 60;
  ContextSource ctx = ContextSource::uniform(4);
  const ActiveLearningResult r = active_learn(task.oracle(), ctx, 4, 100, al);
  auto model = std::make_shared<const GpModel>(r.data, r.kernel);
  EvalConfig ec;
  ec.seeds = 50;
  ec.root_seed = 17;
  std::map<std::string, SamplerMetrics> out;
  for (const std::string method : {"adaptive", "diverse"}) {
    const StreamFactory factory = [&](std::size_t, std::uint64_t seed) {
      Rng rng(seed);
      SamplerUnit u;
      u.context = rng.uniform_vector(4);
      auto set = std::make_shared<SuperLevelSet>(build_superlevel_set(model, u.context, 0.99, SearchConfig{}, rng));
      if (method == "adaptive")
        u.stream = std::make_unique<AdaptiveStream>(set, AdaptiveConfig{}, rng.next_u64());
      else
        u.stream = std::make_unique<DiverseStream>(set, DiversityKernel::unit(4), DiverseConfig{}, rng.next_u64());
      return u;
    };
    out.emplace(method, evaluate_sampler(method, factory, task, ec));
  }
  const SamplerMetrics &a = out.at("adaptive"), &d = out.at("diverse");
  const bool ok = d.diversity5.mean > a.diversity5.mean && a.fp_rate.mean <= 0.10 && d.fp_rate.mean <= 0.10;
  return {ok, "D5 diverse " + fmt("%.2f", d.diversity5.mean) + " adaptive " + fmt("%.2f", a.diversity5.mean) + ", FP " +
                  fmt("%.3f", d.fp_rate.mean) + " / " + fmt("%.3f", a.fp_rate.mean) + " (max 0.10)"};
}

Verdict greedy_equivalence() {
  Gen g(707);
  int mismatches = 0;
  double worst_ratio = 1e300, worst_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto d = static_cast<std::size_t>(g.integer(1, 4));
    DiversityKernel k = DiversityKernel::unit(d, g.uniform(0.05, 0.5));
    for (std::size_t i = 0; i < d; ++i) k.inverse_length_scales[static_cast<Eigen::Index>(i)] = g.log_uniform(0.3, 10.0);

    // Argmax against the marginal gain of D computed from scratch.
    std::vector<Vector> buffer, s;
    const auto nb = static_cast<std::size_t>(g.integer(1, 8));
    for (std::size_t i = 0; i < nb; ++i) buffer.push_back(g.point(d));
    SelectionHistory h(k);
    for (int i = g.integer(0, 4); i > 0; --i) {
      s.push_back(g.point(d));
      h.add(s.back());
    }
    // Candidates whose gains agree to rounding count as the same argmax.
    const double base = diversity(s, k);
    std::vector<double> gains;
    for (const Vector& x : buffer) {
      auto with = s;
      with.push_back(x);
      gains.push_back(diversity(with, k) - base);
    }
    const double best = *std::max_element(gains.begin(), gains.end());
    const double gap = best - gains[most_diverse(h, buffer)];
    worst_gap = std::max(worst_gap, gap);
    mismatches += gap > 1e-9;

    // Greedy prefix against the best subset of the same size.
    std::vector<Vector> pool;
    const auto np = static_cast<std::size_t>(g.integer(2, 12));
    for (std::size_t i = 0; i < np; ++i) pool.push_back(g.point(d));
    const auto n = std::min<std::size_t>(np, static_cast<std::size_t>(g.integer(1, 4)));
    SelectionHistory greedy(k);
    std::vector<Vector> remaining = pool, picked;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = most_diverse(greedy, remaining);
      greedy.add(remaining[j]);
      picked.push_back(remaining[j]);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(j));
    }
    double optimum = 0.0;
    std::vector<bool> mask(np, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
      std::vector<Vector> subset;
      for (std::size_t i = 0; i < np; ++i)
        if (mask[i]) subset.push_back(pool[i]);
      optimum = std::max(optimum, diversity(subset, k));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    worst_ratio = std::min(worst_ratio, diversity(picked, k) / optimum);
  }
  const bool ok = mismatches == 0 && worst_ratio >= 1.0 - 1.0 / std::numbers::e;
  return {ok, std::to_string(mismatches) + " argmax mismatches in 200 (largest gain gap " + fmt("%.2g", worst_gap) + "), worst greedy/optimum " + fmt("%.4f", worst_ratio) +
                  " (min " + fmt("%.4f", 1.0 - 1.0 / std::numbers::e) + ")"};
}

Verdict kernel_learning() {
  Task1Config cfg;
  cfg.seeds = 10;
  cfg.training_tasks = 50;
  cfg.test_tasks = 100;
  cfg.epsilon = 0.3;
  const Task1Result r = run_task1_experiment(cfg);
  const CurvePoint *fixed = nullptr, *learned = nullptr;
  for (const CurvePoint& p : r.curve) {
    if (p.tasks_trained != cfg.training_tasks) continue;
    if (p.method == "diverse-fixed") fixed = &p;
    if (p.method == "diverse-learned") learned = &p;
  }
  if (!fixed || !learned) return {false, "missing curve points"};
  // The boxes are separated along coordinate 0; coordinate 1 does not tell them apart.
  const bool ok = learned->reward.mean >= fixed->reward.mean && learned->samples.mean <= fixed->samples.mean &&
                  learned->scales[1] < learned->scales[0];
  return {ok, "J learned " + fmt("%.3f", learned->reward.mean) + " fixed " + fmt("%.3f", fixed->reward.mean) +
                  ", samples " + fmt("%.2f", learned->samples.mean) + " vs " + fmt("%.2f", fixed->samples.mean) +
                  ", scales (" + fmt("%.3f", learned->scales[0]) + ", " + fmt("%.3f", learned->scales[1]) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "lss_acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = LSS_CLI_PATH, config = std::string(LSS_SOURCE_DIR) + "/configs/smoke.json";
  int failures = 0;
  // Both runs write to the same directory, which is part of the config.
  const fs::path dir = root / "run";
  for (const char* run : {"a", "b"}) {
    fs::create_directories(dir);
    const std::string base = "\"" + cli + "\" ";
    const std::string cfg = " --config \"" + config + "\" --out \"" + dir.string() + "\"";
    const std::vector<std::string> commands{
        base + "train" + cfg,
        base + "sample" + cfg + " --model \"" + (dir / "model.json").string() + "\" --context 0.4 --count 30 --sampler diverse",
        base + "evaluate" + cfg + " --jobs 3",
        base + "task1" + cfg,
        base + "report --out \"" + dir.string() + "\""};
    for (std::size_t i = 0; i < commands.size(); ++i) {
      const std::string cmd =
          commands[i] + " > \"" + (dir / ("stdout_" + std::to_string(i) + ".txt")).string() + "\" 2> /dev/null";
      failures += std::system(cmd.c_str()) != 0;
    }
    fs::rename(dir, root / run);
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "run.log" || name == "timings.csv") continue;
    ++compared;
    const fs::path other = root / "b" / name;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      ++differing;
      std::printf("  differs: %s\n", name.c_str());
    }
  }
  const bool ok = failures == 0 && differing == 0 && compared >= 10;
  return {ok, std::to_string(compared) + " outputs compared, " + std::to_string(differing) + " differ, " +
                  std::to_string(failures) + " command failures"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 GP posterior matches dense-inverse reference", gp_oracle},
      {"2 score-shape anchors", shape_anchors},
      {"3 union-bound threshold Monte Carlo", union_bound_monte_carlo},
      {"4 straddle beats random on held-out F1", straddle_vs_random},
      {"5 adaptive beats rejection on membership calls", adaptive_vs_rejection},
      {"6 diverse beats adaptive on diversity", diverse_vs_adaptive},
      {"7 greedy selection equals marginal-gain argmax", greedy_equivalence},
      {"8 kernel learning on the two-box task", kernel_learning},
      {"9 CLI outputs are byte-identical across reruns", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
