#include "lss/active_learning.hpp"

#include <cmath>

namespace lss {

Selection select_next(const GpModel& model, const AcquisitionQuery& query, const SearchConfig& search,
                      Rng& rng) {
  if (model.input_dim() != query.theta_dim + static_cast<std::size_t>(query.context.size()))
    throw DimensionError("select_next: model dimension must equal theta_dim + context dimension");
  const auto dt = static_cast<Eigen::Index>(query.theta_dim);
  const auto da = query.context.size();
  BatchObjective psi = [&](const Matrix& thetas) {
    Matrix xs(dt + da, thetas.cols());
    xs.topRows(dt) = thetas;
    if (da > 0) xs.bottomRows(da) = query.context.replicate(1, thetas.cols());
    const auto preds = model.predict_batch(xs);
    std::vector<double> out(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) out[i] = straddle(preds[i].mean, preds[i].stddev());
    return out;
  };
  const SearchResult r = maximize_over_box(psi, Box::unit(query.theta_dim), search, rng);
  return {r.best, r.value};
}

ContextSource ContextSource::round_robin(std::vector<Vector> contexts) {
  if (contexts.empty()) throw DomainError("round-robin context list is empty");
  ContextSource s;
  s.dim_ = static_cast<std::size_t>(contexts.front().size());
  s.list_ = std::move(contexts);
  return s;
}

ContextSource ContextSource::iid(std::size_t dim, std::function<Vector(Rng&)> draw) {
  ContextSource s;
  s.dim_ = dim;
  s.draw_ = std::move(draw);
  return s;
}

ContextSource ContextSource::uniform(std::size_t dim) {
  return iid(dim, [dim](Rng& rng) { return rng.uniform_vector(dim); });
}

Vector ContextSource::next(Rng& rng) {
  if (!list_.empty()) return list_[cursor_++ % list_.size()];
  if (draw_) return draw_(rng);
  return Vector(static_cast<Eigen::Index>(dim_));
}

std::string to_string(Strategy s) { return s == Strategy::Straddle ? "straddle" : "random"; }

Strategy strategy_from_string(const std::string& s) {
  if (s == "straddle") return Strategy::Straddle;
  if (s == "random") return Strategy::Random;
  throw DomainError("unknown strategy '" + s + "' (expected straddle or random)");
}

namespace {

struct Hyper {
  KernelSpec kernel;
  double noise;
};

Hyper initial_hyper(const ActiveLearningConfig& cfg, std::size_t dim) {
  if (cfg.initial_kernel) return {*cfg.initial_kernel, cfg.initial_noise};
  return {KernelSpec::isotropic(cfg.fit.kind, dim, 1.0, 0.3), cfg.initial_noise};
}

// Refits when the cadence asks for it; returns the LML if a fit happened.
double maybe_refit(const ActiveLearningConfig& cfg, const Dataset& data, std::size_t step, Hyper& hyper) {
  if (!cfg.fit_hyperparameters || data.size() < 2) return std::nan("");
  if (cfg.refit_every > 1 && step % static_cast<std::size_t>(cfg.refit_every) != 0) return std::nan("");
  FitConfig fc = cfg.fit;
  fc.seed = Rng::derive(cfg.seed, 1000003 + step);
  if (hyper.kernel.kind == fc.kind) {
    fc.warm_start = hyper.kernel;
    fc.warm_noise = hyper.noise;
  }
  const FitResult fit = fit_hyperparameters(data, fc);
  hyper.kernel = fit.kernel;
  hyper.noise = fit.noise_std;
  return fit.log_likelihood;
}

GpModel build(const Dataset& data, const Hyper& h) {
  Dataset d = data;
  d.noise_std = h.noise;
  return GpModel(std::move(d), h.kernel);
}

}  // namespace

ActiveLearningResult active_learn(const ScoreFunction& oracle, ContextSource& contexts,
                                  std::size_t theta_dim, int budget, const ActiveLearningConfig& cfg,
                                  const std::optional<Dataset>& seed_data) {
  if (budget < 0) throw DomainError("active_learn: budget must be >= 0");
  const std::size_t dim = theta_dim + contexts.dim();
  Rng rng(cfg.seed);
  ActiveLearningResult result;
  Hyper hyper = initial_hyper(cfg, dim);

  auto evaluate = [&](const Vector& theta, const Vector& alpha) {
    double y;
    try {
      y = oracle(theta, alpha);
    } catch (const std::exception& e) {
      throw OracleError(std::string("score function failed: ") + e.what(), result.data);
    }
    if (!std::isfinite(y)) throw OracleError("score function returned a non-finite value", result.data);
    return y;
  };

  if (seed_data) {
    result.data = *seed_data;
    if (!result.data.empty() && result.data.dim() != dim)
      throw DimensionError("active_learn: seed data dimension does not match theta + context");
  } else {
    for (int i = 0; i < cfg.n_seed; ++i) {
      const Vector alpha = contexts.next(rng);
      const Vector theta = rng.uniform_vector(theta_dim);
      result.data.add(concat(theta, alpha), evaluate(theta, alpha));
    }
  }
  result.seed_rows = result.data.size();
  result.data.noise_std = hyper.noise;

  for (int t = 0; t < budget; ++t) {
    StepRecord rec;
    rec.log_likelihood = maybe_refit(cfg, result.data, static_cast<std::size_t>(t), hyper);
    rec.context = contexts.next(rng);
    if (cfg.strategy == Strategy::Straddle) {
      const GpModel model = build(result.data, hyper);
      const Selection sel = select_next(model, {rec.context, theta_dim}, cfg.search, rng);
      rec.theta = sel.theta;
      rec.acquisition = sel.acquisition;
    } else {
      rec.theta = rng.uniform_vector(theta_dim);
      rec.acquisition = std::nan("");
    }
    rec.y = evaluate(rec.theta, rec.context);
    result.data.add(concat(rec.theta, rec.context), rec.y);
    result.log.push_back(std::move(rec));
  }

  if (budget > 0 && cfg.fit_hyperparameters && result.data.size() >= 2) {
    FitConfig fc = cfg.fit;
    fc.seed = Rng::derive(cfg.seed, 7);
    fc.warm_start = hyper.kernel;
    fc.warm_noise = hyper.noise;
    const FitResult fit = fit_hyperparameters(result.data, fc);
    hyper = {fit.kernel, fit.noise_std};
  }
  result.kernel = hyper.kernel;
  result.data.noise_std = hyper.noise;
  return result;
}

PoolResult active_learn_pool(const Dataset& pool, int budget, const ActiveLearningConfig& cfg) {
  if (pool.empty()) throw DomainError("active_learn_pool: pool is empty");
  pool.validate();
  if (budget < 0 || static_cast<std::size_t>(budget) > pool.size())
    throw DomainError("active_learn_pool: budget must lie in [0, pool size]");

  Hyper hyper = initial_hyper(cfg, pool.dim());
  std::vector<bool> taken(pool.size(), false);
  PoolResult result;
  result.data.noise_std = hyper.noise;

  for (int t = 0; t < budget; ++t) {
    maybe_refit(cfg, result.data, static_cast<std::size_t>(t), hyper);
    const GpModel model = build(result.data, hyper);

    std::size_t best = pool.size();
    double best_psi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      const Prediction p = model.predict(pool.points[i]);
      const double psi = straddle(p.mean, p.stddev());
      if (best == pool.size() || psi > best_psi) {
        best = i;
        best_psi = psi;
      }
    }
    if (best == pool.size()) throw DomainError("active_learn_pool: pool exhausted");
    taken[best] = true;
    result.order.push_back(best);
    result.data.add(pool.points[best], pool.values[best]);
  }
  result.kernel = hyper.kernel;
  result.data.noise_std = hyper.noise;
  return result;
}

}  // namespace lss
