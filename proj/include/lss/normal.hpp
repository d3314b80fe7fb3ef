#ifndef LSS_NORMAL_HPP
#define LSS_NORMAL_HPP

namespace lss::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double z);
double cdf(double z);
/// log Φ(z), accurate far into the lower tail.
double log_cdf(double z);
/// Φ⁻¹(p) for p in (0,1); rational approximation polished by one Halley step.
/// Returns ±infinity at p = 1 / p = 0.
double quantile(double p);

}  // namespace lss::normal

#endif  // LSS_NORMAL_HPP
