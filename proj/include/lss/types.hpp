#ifndef LSS_TYPES_HPP
#define LSS_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lss {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a factorization cannot be stabilized or a quantity is not finite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised when a sampler exhausts its proposal budget without finding a member.
class SamplerCapError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  static Box unit(std::size_t dim) {
    return Box{Vector::Zero(static_cast<Eigen::Index>(dim)),
               Vector::Ones(static_cast<Eigen::Index>(dim))};
  }

  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  double volume() const { return (upper - lower).prod(); }
  bool contains(const Vector& x) const {
    if (x.size() != lower.size()) return false;
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

/// The control box B = [0,1]^d together with the min-max map to raw units.
class ParameterSpace {
 public:
  explicit ParameterSpace(Box raw) : raw_(std::move(raw)) {
    if (raw_.lower.size() != raw_.upper.size())
      throw DimensionError("ParameterSpace: bound dimensions differ");
    if (!((raw_.upper.array() > raw_.lower.array()).all()))
      throw DomainError("ParameterSpace: every upper bound must exceed its lower bound");
  }
  static ParameterSpace unit(std::size_t dim) { return ParameterSpace(Box::unit(dim)); }

  std::size_t dim() const { return raw_.dim(); }
  const Box& raw() const { return raw_; }
  Box box() const { return Box::unit(dim()); }

  Vector normalize(const Vector& raw_point) const {
    return ((raw_point - raw_.lower).array() / (raw_.upper - raw_.lower).array()).matrix();
  }
  Vector denormalize(const Vector& unit_point) const {
    return (raw_.lower.array() + unit_point.array() * (raw_.upper - raw_.lower).array()).matrix();
  }

 private:
  Box raw_;
};

/// Seeded pseudo-random source. Child streams are derived with seed_seq so that
/// per-unit work is reproducible regardless of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double normal() { return gauss_(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  Vector uniform_vector(std::size_t dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform();
    return v;
  }
  Vector uniform_in(const Box& box) {
    Vector v = uniform_vector(box.dim());
    return (box.lower.array() + v.array() * (box.upper - box.lower).array()).matrix();
  }
  std::uint64_t next_u64() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t derive(std::uint64_t root, std::uint64_t unit) {
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(unit), static_cast<std::uint32_t>(unit >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

inline Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace lss

#endif  // LSS_TYPES_HPP
