#ifndef LSS_ADAPTIVE_HPP
#define LSS_ADAPTIVE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lss/superlevel.hpp"
#include "lss/tgmm.hpp"

namespace lss {

struct BufferConfig {
  /// Proposals per round, from the mixture and from the uniform reseeding each.
  std::size_t batch = 100;
  /// Number of entries returned.
  std::size_t target = 20;
  int round_cap = 1000;
};

struct BufferRound {
  std::size_t mixture_proposed = 0;
  std::size_t mixture_accepted = 0;
  std::size_t uniform_accepted = 0;
  /// Variance multiplier applied this round: exactly 0.5 or 2.
  double variance_factor = 1.0;
  /// Sum of the normalized buffer weights after the round.
  double weight_sum = 0.0;
  double min_weight = 0.0;
};

struct BufferResult {
  std::vector<Vector> samples;
  /// Normalized importance weight of each returned sample within the final buffer.
  std::vector<double> weights;
  Vector variance;
  std::size_t membership_calls = 0;
  bool capped = false;
  std::vector<BufferRound> rounds;
};

/// Grows an importance-weighted buffer of members by alternating mixture proposals
/// around the current buffer with uniform reseeding, then draws `target` entries
/// without replacement by weight. `initial_variance` defaults to ones.
///
/// On hitting the round cap the buffer is returned padded with the set's anchor
/// and `capped` is set.
BufferResult sample_buffer(const MembershipSet& set, const std::vector<Vector>& init, const BufferConfig& cfg,
                           Rng& rng, const std::optional<Vector>& initial_variance = std::nullopt);

/// Weighted sampling without replacement (exponential keys) from log weights.
/// Returns indices in draw order.
std::vector<std::size_t> weighted_sample_without_replacement(const std::vector<double>& log_weights,
                                                             std::size_t count, Rng& rng);

struct SamplerStats {
  std::size_t yields = 0;
  std::size_t membership_calls = 0;
  std::size_t buffer_fills = 0;
  std::size_t buffer_rounds = 0;
  /// A buffer fill hit its round cap and was padded.
  bool capped = false;
};

/// Unbounded single-consumer sampler over a membership set.
class SampleStream {
 public:
  virtual ~SampleStream() = default;
  virtual Vector next() = 0;
  virtual std::string name() const = 0;
  const SamplerStats& stats() const { return stats_; }

 protected:
  SamplerStats stats_;
};

/// Uniform proposals on the box, filtered by membership.
class RejectionStream final : public SampleStream {
 public:
  RejectionStream(std::shared_ptr<const MembershipSet> set, std::uint64_t seed,
                  std::size_t proposal_cap = 1000000);
  /// Throws SamplerCapError when `proposal_cap` consecutive proposals fail.
  Vector next() override;
  std::string name() const override { return "rejection"; }

 private:
  std::shared_ptr<const MembershipSet> set_;
  Rng rng_;
  std::size_t cap_;
};

struct AdaptiveConfig {
  BufferConfig buffer;
  /// Start each refill from the variance the previous fill ended with.
  bool carry_variance = true;
};

/// Yields the front of a buffer from sample_buffer, refilling whenever fewer than
/// target / 2 entries remain.
class AdaptiveStream final : public SampleStream {
 public:
  AdaptiveStream(std::shared_ptr<const MembershipSet> set, AdaptiveConfig cfg, std::uint64_t seed);
  Vector next() override;
  std::string name() const override { return "adaptive"; }

 private:
  std::shared_ptr<const MembershipSet> set_;
  AdaptiveConfig cfg_;
  Rng rng_;
  std::vector<Vector> buffer_;
  std::size_t front_ = 0;
  std::optional<Vector> variance_;
};

/// Shared refill step for the buffered streams.
std::vector<Vector> refill_buffer(const MembershipSet& set, const AdaptiveConfig& cfg, Rng& rng,
                                  std::optional<Vector>& variance, SamplerStats& stats);

}  // namespace lss

#endif  // LSS_ADAPTIVE_HPP
