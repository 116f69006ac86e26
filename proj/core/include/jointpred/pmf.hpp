#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jointpred/rng.hpp"

namespace jointpred {

// Probability mass function over an explicitly enumerated finite outcome set.
//
// Outcomes are addressed by index; a label per outcome is optional (an
// unlabeled pmf stands for the canonical outcomes 0..n-1). Probabilities are
// validated non-negative and renormalized when their sum is within
// kNormalizationTolerance of 1; anything further off is rejected.
class FinitePmf {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  explicit FinitePmf(std::vector<double> probs);
  FinitePmf(std::vector<std::string> outcomes, std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  bool labeled() const { return !outcomes_.empty(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::string& outcome(std::size_t i) const { return outcomes_[i]; }
  // Index of a labeled outcome; throws if absent or unlabeled.
  std::size_t index_of(const std::string& label) const;

  // Two pmfs share an outcome set when sizes match and, if both carry
  // labels, the label sequences are identical.
  bool same_support(const FinitePmf& other) const;

 private:
  void validate_and_normalize();

  std::vector<std::string> outcomes_;
  std::vector<double> probs_;
};

// Conjugate prior over a Bernoulli success probability.
class BetaParams {
 public:
  BetaParams(double alpha, double beta);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mean() const { return alpha_ / (alpha_ + beta_); }

 private:
  double alpha_;
  double beta_;
};

BetaParams beta_update(const BetaParams& prior, long successes, long failures);

// Outcome index distributed per the pmf; deterministic given stream state.
std::size_t sample(const FinitePmf& dist, RngStream& rng);
double sample(const BetaParams& dist, RngStream& rng);

// Label for a packed bit pattern, element 0 first: bits_label(2, 2) == "01".
std::string bits_label(std::uint64_t packed, int n_bits);

// Bernoulli pmf as a 2-outcome FinitePmf ({0, 1} order).
FinitePmf bernoulli_pmf(double p);

}  // namespace jointpred
