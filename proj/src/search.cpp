#include "lss/search.hpp"

#include <algorithm>
#include <numeric>

namespace lss {

SearchResult maximize_over_box(const BatchObjective& objective, const Box& box,
                               const SearchConfig& cfg, Rng& rng) {
  if (cfg.candidates < 1) throw DomainError("search needs at least one candidate");
  const auto dim = static_cast<Eigen::Index>(box.dim());
  Matrix cands(dim, cfg.candidates);
  for (int j = 0; j < cfg.candidates; ++j) cands.col(j) = rng.uniform_in(box);
  const std::vector<double> scores = objective(cands);

  SearchResult result;
  result.evaluations = scores.size();
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[best]) best = j;
  result.best = cands.col(static_cast<Eigen::Index>(best));
  result.value = scores[best];
  if (!cfg.refine) return result;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const auto starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.refine_starts, 0)), order.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const Vector span = box.upper - box.lower;
  for (std::size_t s = 0; s < starts; ++s) {
    Vector x = cands.col(static_cast<Eigen::Index>(order[s]));
    double fx = scores[order[s]];
    double step = cfg.initial_step;
    for (int it = 0; it < cfg.refine_iterations && step >= cfg.min_step; ++it) {
      Matrix probes(dim, 2 * dim);
      for (Eigen::Index d = 0; d < dim; ++d) {
        Vector up = x, down = x;
        up[d] = std::min(box.upper[d], x[d] + step * span[d]);
        down[d] = std::max(box.lower[d], x[d] - step * span[d]);
        probes.col(2 * d) = up;
        probes.col(2 * d + 1) = down;
      }
      const std::vector<double> vals = objective(probes);
      result.evaluations += vals.size();
      std::size_t arg = 0;
      for (std::size_t j = 1; j < vals.size(); ++j)
        if (vals[j] > vals[arg]) arg = j;
      if (vals[arg] > fx) {
        fx = vals[arg];
        x = probes.col(static_cast<Eigen::Index>(arg));
      } else {
        step *= 0.5;
      }
    }
    if (fx > result.value) {
      result.value = fx;
      result.best = x;
    }
  }
  return result;
}

}  // namespace lss
