#include "lss/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lss {

namespace {

void normalize_log(std::vector<double>& logw) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double acc = 0.0;
  for (double w : logw) acc += std::exp(w - mx);
  const double lse = mx + std::log(acc);
  for (double& w : logw) w -= lse;
}

Matrix as_columns(const std::vector<Vector>& pts, Eigen::Index dim) {
  Matrix m(dim, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

}  // namespace

std::vector<std::size_t> weighted_sample_without_replacement(const std::vector<double>& log_weights,
                                                             std::size_t count, Rng& rng) {
  count = std::min(count, log_weights.size());
  std::vector<double> keys(log_weights.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    // Smallest E_i / w_i first, E_i ~ Exp(1); compared in log space.
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    keys[i] = std::log(-std::log(u)) - log_weights[i];
  }
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](std::size_t a, std::size_t b) { return keys[a] < keys[b] || (keys[a] == keys[b] && a < b); });
  idx.resize(count);
  return idx;
}

BufferResult sample_buffer(const MembershipSet& set, const std::vector<Vector>& init, const BufferConfig& cfg,
                           Rng& rng, const std::optional<Vector>& initial_variance) {
  if (init.empty()) throw DomainError("sample_buffer needs at least one initial member");
  if (cfg.batch < 2) throw DomainError("sample_buffer batch size must be >= 2");
  if (cfg.target < 1) throw DomainError("sample_buffer target must be >= 1");
  const Box box = set.box();
  const auto dim = static_cast<Eigen::Index>(set.dim());
  const double log_volume = std::log(box.volume());

  std::vector<Vector> buffer = init;
  std::vector<double> logp(buffer.size(), 0.0);
  Vector variance = initial_variance.value_or(Vector::Ones(dim));
  if (variance.size() != dim) throw DimensionError("sample_buffer: variance dimension mismatch");

  BufferResult result;
  for (int round = 0; round < cfg.round_cap; ++round) {
    BufferRound trace;
    std::vector<double> probs(logp.size());
    const double mx = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logp.size(); ++i) total += (probs[i] = std::exp(logp[i] - mx));
    Tgmm mix{Eigen::Map<Vector>(probs.data(), static_cast<Eigen::Index>(probs.size())) / total, buffer, variance,
             box};

    const std::vector<Vector> proposals = sample_tgmm(cfg.batch, mix, rng);
    const std::vector<bool> keep = set.contains_batch(as_columns(proposals, dim));
    result.membership_calls += proposals.size();
    std::vector<Vector> accepted;
    std::vector<double> log_pa;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (!keep[i]) continue;
      accepted.push_back(proposals[i]);
      log_pa.push_back(-tgmm_log_density(proposals[i], mix));
    }
    trace.mixture_proposed = proposals.size();
    trace.mixture_accepted = accepted.size();
    trace.variance_factor = 2 * accepted.size() < proposals.size() ? 0.5 : 2.0;
    variance *= trace.variance_factor;

    std::vector<Vector> uniform(cfg.batch);
    for (auto& u : uniform) u = rng.uniform_in(box);
    const std::vector<bool> keep_u = set.contains_batch(as_columns(uniform, dim));
    result.membership_calls += uniform.size();
    for (std::size_t i = 0; i < uniform.size(); ++i) {
      if (!keep_u[i]) continue;
      buffer.push_back(uniform[i]);
      logp.push_back(log_volume);
      ++trace.uniform_accepted;
    }
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      buffer.push_back(std::move(accepted[i]));
      logp.push_back(log_pa[i]);
    }
    normalize_log(logp);
    trace.weight_sum = 0.0;
    trace.min_weight = std::numeric_limits<double>::infinity();
    for (double w : logp) {
      trace.weight_sum += std::exp(w);
      trace.min_weight = std::min(trace.min_weight, std::exp(w));
    }
    result.rounds.push_back(trace);

    if (buffer.size() > cfg.target) {
      for (std::size_t i : weighted_sample_without_replacement(logp, cfg.target, rng)) {
        result.samples.push_back(buffer[i]);
        result.weights.push_back(std::exp(logp[i]));
      }
      result.variance = variance;
      return result;
    }
  }

  result.capped = true;
  for (std::size_t i : weighted_sample_without_replacement(logp, buffer.size(), rng)) {
    result.samples.push_back(buffer[i]);
    result.weights.push_back(std::exp(logp[i]));
  }
  while (result.samples.size() < cfg.target) {
    result.samples.push_back(set.anchor());
    result.weights.push_back(0.0);
  }
  result.variance = variance;
  return result;
}

RejectionStream::RejectionStream(std::shared_ptr<const MembershipSet> set, std::uint64_t seed,
                                 std::size_t proposal_cap)
    : set_(std::move(set)), rng_(seed), cap_(proposal_cap) {
  if (!set_) throw DomainError("RejectionStream needs a set");
}

Vector RejectionStream::next() {
  const Box box = set_->box();
  for (std::size_t i = 0; i < cap_; ++i) {
    Vector theta = rng_.uniform_in(box);
    ++stats_.membership_calls;
    if (set_->contains(theta)) {
      ++stats_.yields;
      return theta;
    }
  }
  throw SamplerCapError("rejection sampler found no member in " + std::to_string(cap_) +
                        " proposals; the set is empty or vanishingly small");
}

std::vector<Vector> refill_buffer(const MembershipSet& set, const AdaptiveConfig& cfg, Rng& rng,
                                  std::optional<Vector>& variance, SamplerStats& stats) {
  BufferResult r = sample_buffer(set, {set.anchor()}, cfg.buffer, rng, cfg.carry_variance ? variance : std::nullopt);
  ++stats.buffer_fills;
  stats.buffer_rounds += r.rounds.size();
  stats.membership_calls += r.membership_calls;
  stats.capped = stats.capped || r.capped;
  variance = r.variance;
  return std::move(r.samples);
}

AdaptiveStream::AdaptiveStream(std::shared_ptr<const MembershipSet> set, AdaptiveConfig cfg, std::uint64_t seed)
    : set_(std::move(set)), cfg_(std::move(cfg)), rng_(seed) {
  if (!set_) throw DomainError("AdaptiveStream needs a set");
}

Vector AdaptiveStream::next() {
  if (2 * (buffer_.size() - front_) < cfg_.buffer.target) {
    buffer_ = refill_buffer(*set_, cfg_, rng_, variance_, stats_);
    front_ = 0;
  }
  ++stats_.yields;
  return buffer_[front_++];
}

}  // namespace lss
