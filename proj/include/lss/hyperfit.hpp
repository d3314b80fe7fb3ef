#ifndef LSS_HYPERFIT_HPP
#define LSS_HYPERFIT_HPP

#include <cstdint>
#include <optional>

#include "lss/gp.hpp"

namespace lss {

struct FitBounds {
  double variance_min = 1e-3, variance_max = 1e3;
  double scale_min = 1e-3, scale_max = 1e3;
  double noise_min = 1e-4, noise_max = 1.0;
};

struct FitConfig {
  KernelKind kind = KernelKind::SquaredExponential;
  /// Random log-uniform starts, in addition to the deterministic ones.
  int restarts = 2;
  std::uint64_t seed = 0;
  bool fit_noise = true;
  int max_iterations = 200;
  FitBounds bounds;
  /// Extra deterministic start (e.g. the previous fit). The default start
  /// (unit variance, scales 0.3, noise 0.1) is always tried as well.
  std::optional<KernelSpec> warm_start;
  std::optional<double> warm_noise;
};

struct FitResult {
  KernelSpec kernel;
  double noise_std = 0.0;
  double log_likelihood = 0.0;
  int starts_succeeded = 0;
};

/// Maximizes the log marginal likelihood over log variance, log ARD scales and
/// (optionally) log noise, each box-bounded. Throws NumericalError if every
/// start fails.
FitResult fit_hyperparameters(const Dataset& data, const FitConfig& cfg);

/// Log marginal likelihood and its gradient with respect to
/// [log variance, log scales..., log noise].
double log_marginal_likelihood_with_gradient(const Dataset& data, const KernelSpec& kernel,
                                             Vector& gradient);

}  // namespace lss

#endif  // LSS_HYPERFIT_HPP
