#include "lss/diverse.hpp"

namespace lss {

std::size_t most_diverse(const SelectionHistory& history, const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw DomainError("most_diverse: no candidates");
  std::size_t best = 0;
  double best_eta = history.eta(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double e = history.eta(candidates[i]);
    if (e > best_eta) {
      best = i;
      best_eta = e;
    }
  }
  return best;
}

DiverseStream::DiverseStream(std::shared_ptr<const MembershipSet> set, DiversityKernel kernel, DiverseConfig cfg,
                             std::uint64_t seed)
    : set_(std::move(set)), cfg_(std::move(cfg)), rng_(seed), history_(std::move(kernel)) {
  if (!set_) throw DomainError("DiverseStream needs a set");
  if (history_.kernel().dim() != set_->dim())
    throw DimensionError("DiverseStream: kernel dimension does not match the set");
}

DiverseDraw DiverseStream::draw() {
  if (!started_ && cfg_.anchor_first) {
    started_ = true;
    pending_ = set_->anchor();
    ++stats_.yields;
    return {*pending_, history_};
  }
  started_ = true;
  if (2 * buffer_.size() < cfg_.adaptive.buffer.target || buffer_.empty())
    buffer_ = refill_buffer(*set_, cfg_.adaptive, rng_, variance_, stats_);
  if (pending_) history_.add(*pending_);
  const std::size_t idx = most_diverse(history_, buffer_);
  pending_ = buffer_[idx];
  buffer_.erase(buffer_.begin() + static_cast<std::ptrdiff_t>(idx));
  ++stats_.yields;
  return {*pending_, history_};
}

}  // namespace lss
