#ifndef LSS_DIVERSE_HPP
#define LSS_DIVERSE_HPP

#include <memory>

#include "lss/adaptive.hpp"
#include "lss/diversity.hpp"

namespace lss {

struct DiverseConfig {
  AdaptiveConfig adaptive;
  /// Yield the set's anchor (theta*) before drawing from the buffer.
  bool anchor_first = true;
};

struct DiverseDraw {
  Vector theta;
  /// Samples yielded before theta, with the kernel in force when theta was chosen.
  SelectionHistory before;
};

/// Greedy diversity sampler: each yield maximizes eta_S over the current buffer,
/// where S holds everything yielded earlier in this stream.
class DiverseStream final : public SampleStream {
 public:
  DiverseStream(std::shared_ptr<const MembershipSet> set, DiversityKernel kernel, DiverseConfig cfg,
                std::uint64_t seed);

  Vector next() override { return draw().theta; }
  DiverseDraw draw();
  std::string name() const override { return "diverse"; }

  void set_kernel(DiversityKernel kernel) { history_.set_kernel(std::move(kernel)); }
  const DiversityKernel& kernel() const { return history_.kernel(); }
  const SelectionHistory& history() const { return history_; }
  /// Entries currently waiting in the buffer.
  std::vector<Vector> buffer() const { return {buffer_.begin(), buffer_.end()}; }
  /// Replaces the buffer (used by tests and by callers that pre-draw candidates).
  void set_buffer(std::vector<Vector> buffer) { buffer_ = std::move(buffer); }

 private:
  std::shared_ptr<const MembershipSet> set_;
  DiverseConfig cfg_;
  Rng rng_;
  SelectionHistory history_;
  std::vector<Vector> buffer_;
  std::optional<Vector> variance_;
  std::optional<Vector> pending_;
  bool started_ = false;
};

/// Index of the entry with the largest eta (lowest index on ties).
std::size_t most_diverse(const SelectionHistory& history, const std::vector<Vector>& candidates);

}  // namespace lss

#endif  // LSS_DIVERSE_HPP
