#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace jointpred {

// Deterministic random stream identified by (master_seed, stream_id).
//
// Contract: equal identifiers replay the identical draw sequence; distinct
// stream_ids give streams with no shared state. Engine is xoshiro256++,
// seeded via SplitMix64. The 64-bit mixing function used to fold the stream
// id into the master seed is the SplitMix64 finalizer applied to
// master_seed + 0x9E3779B97F4A7C15 * (stream_id + 1).
//
// A stream is single-owner; distinct streams may be used from distinct
// threads simultaneously.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t x = mix64(master_seed + kGolden * (stream_id + 1));
    for (auto& word : state_) {
      x += kGolden;
      word = mix64(x);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream for per-sample / per-replication use. Derived from the
  // parent's identifiers only, never from its current position.
  RngStream substream(std::uint64_t index) const {
    return RngStream(mix64(master_seed_ ^ mix64(stream_id_ + kGolden)), index);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1): top 53 bits of one u64.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n), n >= 1. Rejection-free multiply-shift is not
  // used so the draw count per call stays fixed at one u64.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

  // Standard normal via the Marsaglia polar method.
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Gamma(shape, 1) via Marsaglia-Tsang with the squeeze test; shape < 1
  // handled by boosting.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_pos();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d - d * v + d * std::log(v)) return d * v;
    }
  }

  // Threshold for repeated Bernoulli(p) draws against (next_u64() >> 11):
  // bernoulli_by_threshold(t) replays exactly uniform01() < p.
  std::uint64_t bernoulli_threshold(double p) const {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return std::uint64_t{1} << 53;
    return static_cast<std::uint64_t>(std::ceil(p * 0x1.0p53));
  }
  bool bernoulli_by_threshold(std::uint64_t threshold) {
    return (next_u64() >> 11) < threshold;
  }

  double beta(double alpha, double beta_param) {
    const double a = gamma(alpha);
    const double b = gamma(beta_param);
    const double sum = a + b;
    if (sum <= 0.0) return alpha / (alpha + beta_param);
    return a / sum;
  }

  // Index draw proportional to non-negative weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("categorical: total weight must be > 0");
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  // SplitMix64 finalizer.
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

}  // namespace jointpred
