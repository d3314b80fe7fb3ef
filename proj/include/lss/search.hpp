#ifndef LSS_SEARCH_HPP
#define LSS_SEARCH_HPP

#include <functional>
#include <vector>

#include "lss/types.hpp"

namespace lss {

/// Candidate-set maximization over a box with optional compass refinement.
struct SearchConfig {
  int candidates = 1000;
  bool refine = true;
  int refine_starts = 5;
  int refine_iterations = 60;
  double initial_step = 0.05;
  double min_step = 1e-4;
};

/// Scores every column of the matrix.
using BatchObjective = std::function<std::vector<double>(const Matrix&)>;

struct SearchResult {
  Vector best;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Draws `candidates` uniform points, keeps the best (lowest index on ties), and
/// polishes the top `refine_starts` with a bounded compass search. The result is
/// never worse than any evaluated point.
SearchResult maximize_over_box(const BatchObjective& objective, const Box& box,
                               const SearchConfig& cfg, Rng& rng);

}  // namespace lss

#endif  // LSS_SEARCH_HPP
