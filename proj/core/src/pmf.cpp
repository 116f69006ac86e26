#include "jointpred/pmf.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "jointpred/stats.hpp"

namespace jointpred {

FinitePmf::FinitePmf(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_and_normalize();
}

FinitePmf::FinitePmf(std::vector<std::string> outcomes, std::vector<double> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
  if (outcomes_.size() != probs_.size()) {
    throw std::invalid_argument("FinitePmf: outcomes and probs must have equal length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& o : outcomes_) {
    if (!seen.insert(o).second) {
      throw std::invalid_argument("FinitePmf: duplicate outcome identifier '" + o + "'");
    }
  }
  validate_and_normalize();
}

void FinitePmf::validate_and_normalize() {
  if (probs_.empty()) throw std::invalid_argument("FinitePmf: empty outcome set");
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("FinitePmf: probabilities must be finite and >= 0");
    }
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("FinitePmf: probabilities sum to " + std::to_string(total) +
                                ", outside the 1e-12 normalization tolerance");
  }
  if (total != 1.0) {
    for (double& p : probs_) p /= total;
  }
}

std::size_t FinitePmf::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i] == label) return i;
  }
  throw std::invalid_argument("FinitePmf: unknown outcome '" + label + "'");
}

bool FinitePmf::same_support(const FinitePmf& other) const {
  if (size() != other.size()) return false;
  if (labeled() && other.labeled()) return outcomes_ == other.outcomes_;
  return true;
}

BetaParams::BetaParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("BetaParams: alpha and beta must be finite and > 0");
  }
}

BetaParams beta_update(const BetaParams& prior, long successes, long failures) {
  if (successes < 0 || failures < 0) {
    throw std::invalid_argument("beta_update: counts must be >= 0");
  }
  return BetaParams(prior.alpha() + static_cast<double>(successes),
                    prior.beta() + static_cast<double>(failures));
}

std::size_t sample(const FinitePmf& dist, RngStream& rng) {
  return rng.categorical(dist.probs());
}

double sample(const BetaParams& dist, RngStream& rng) {
  return rng.beta(dist.alpha(), dist.beta());
}

std::string bits_label(std::uint64_t packed, int n_bits) {
  std::string s(static_cast<std::size_t>(n_bits), '0');
  for (int i = 0; i < n_bits; ++i) {
    if ((packed >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

FinitePmf bernoulli_pmf(double p) {
  return FinitePmf({1.0 - p, p});
}

}  // namespace jointpred
