#include "jointpred/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "jointpred/stats.hpp"

namespace jointpred {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }
}  // namespace

double entropy(const FinitePmf& p) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double pi : p.probs()) {
    terms.push_back(pi > 0.0 ? -pi * std::log(pi) : 0.0);
  }
  return clamp_nonneg(compensated_sum(terms));
}

double kl_divergence(const FinitePmf& p, const FinitePmf& q) {
  if (!p.same_support(q)) {
    throw std::invalid_argument("kl_divergence: mismatched outcome sets");
  }
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i);
    if (pi == 0.0) continue;
    const double qi = q.prob(i);
    if (qi == 0.0) return kInf;
    terms.push_back(pi * std::log(pi / qi));
  }
  return clamp_nonneg(compensated_sum(terms));
}

double cross_entropy(const FinitePmf& p, const FinitePmf& q) {
  if (!p.same_support(q)) {
    throw std::invalid_argument("cross_entropy: mismatched outcome sets");
  }
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i);
    if (pi == 0.0) continue;
    const double qi = q.prob(i);
    if (qi == 0.0) return kInf;
    terms.push_back(-pi * std::log(qi));
  }
  return compensated_sum(terms);
}

double total_variation(const FinitePmf& p, const FinitePmf& q) {
  if (!p.same_support(q)) {
    throw std::invalid_argument("total_variation: mismatched outcome sets");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p.prob(i) - q.prob(i));
  return 0.5 * acc;
}

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> table)
    : axes_(std::move(axes)), table_(std::move(table)) {
  if (axes_.empty()) throw std::invalid_argument("JointPmf: at least one axis required");
  std::unordered_set<std::string> names;
  std::size_t cells = 1;
  for (const auto& a : axes_) {
    if (a.size < 1) throw std::invalid_argument("JointPmf: axis '" + a.name + "' has size < 1");
    if (!names.insert(a.name).second) {
      throw std::invalid_argument("JointPmf: duplicate axis name '" + a.name + "'");
    }
    cells *= static_cast<std::size_t>(a.size);
  }
  if (cells != table_.size()) {
    throw std::invalid_argument("JointPmf: table size does not match product of axis sizes");
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * static_cast<std::size_t>(axes_[i].size);
  }
  for (double p : table_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("JointPmf: probabilities must be finite and >= 0");
    }
  }
  const double total = compensated_sum(table_);
  if (std::abs(total - 1.0) > FinitePmf::kNormalizationTolerance) {
    throw std::invalid_argument("JointPmf: table sums to " + std::to_string(total) +
                                ", outside the 1e-12 normalization tolerance");
  }
  if (total != 1.0) {
    for (double& p : table_) p /= total;
  }
}

int JointPmf::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("JointPmf: unknown axis '" + name + "'");
}

FinitePmf JointPmf::marginal(std::span<const std::string> axis_names) const {
  if (axis_names.empty()) throw std::invalid_argument("JointPmf::marginal: empty axis list");
  std::vector<int> idx;
  idx.reserve(axis_names.size());
  std::size_t out_size = 1;
  for (const auto& n : axis_names) {
    const int i = axis_index(n);
    idx.push_back(i);
    out_size *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(i)].size);
  }
  std::vector<double> out(out_size, 0.0);
  for (std::size_t flat = 0; flat < table_.size(); ++flat) {
    std::size_t key = 0;
    for (int i : idx) {
      const auto ui = static_cast<std::size_t>(i);
      const std::size_t coord =
          (flat / strides_[ui]) % static_cast<std::size_t>(axes_[ui].size);
      key = key * static_cast<std::size_t>(axes_[ui].size) + coord;
    }
    out[key] += table_[flat];
  }
  return FinitePmf(std::move(out));
}

double mutual_information(const JointPmf& joint, std::span<const std::string> vars_a,
                          std::span<const std::string> vars_b,
                          std::span<const std::string> vars_cond,
                          bool* empty_side_warning) {
  if (empty_side_warning) *empty_side_warning = false;

  std::unordered_set<std::string> seen;
  for (auto span : {vars_a, vars_b, vars_cond}) {
    for (const auto& n : span) {
      joint.axis_index(n);
      if (!seen.insert(n).second) {
        throw std::invalid_argument("mutual_information: axis '" + n +
                                    "' appears in more than one subset");
      }
    }
  }
  if (vars_a.empty() || vars_b.empty()) {
    if (empty_side_warning) *empty_side_warning = true;
    return 0.0;
  }

  auto group_of = [&](std::span<const std::string> names) {
    std::vector<std::pair<std::size_t, std::size_t>> stride_size;  // (stride, axis size)
    std::size_t cells = 1;
    for (const auto& n : names) {
      const auto i = static_cast<std::size_t>(joint.axis_index(n));
      stride_size.emplace_back(joint.strides_[i],
                               static_cast<std::size_t>(joint.axes_[i].size));
      cells *= static_cast<std::size_t>(joint.axes_[i].size);
    }
    return std::make_pair(stride_size, cells);
  };

  const auto [ga, na] = group_of(vars_a);
  const auto [gb, nb] = group_of(vars_b);
  const auto [gc, nc] = group_of(vars_cond);

  auto key_of = [](const std::vector<std::pair<std::size_t, std::size_t>>& group,
                   std::size_t flat) {
    std::size_t key = 0;
    for (const auto& [stride, size] : group) {
      key = key * size + (flat / stride) % size;
    }
    return key;
  };

  std::vector<double> p_abc(na * nb * nc, 0.0);
  for (std::size_t flat = 0; flat < joint.table_.size(); ++flat) {
    const double p = joint.table_[flat];
    if (p == 0.0) continue;
    const std::size_t ka = key_of(ga, flat);
    const std::size_t kb = key_of(gb, flat);
    const std::size_t kc = vars_cond.empty() ? 0 : key_of(gc, flat);
    p_abc[(ka * nb + kb) * nc + kc] += p;
  }

  std::vector<double> p_c(nc, 0.0), p_ac(na * nc, 0.0), p_bc(nb * nc, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t c = 0; c < nc; ++c) {
        const double p = p_abc[(a * nb + b) * nc + c];
        p_c[c] += p;
        p_ac[a * nc + c] += p;
        p_bc[b * nc + c] += p;
      }
    }
  }

  std::vector<double> terms;
  terms.reserve(p_abc.size());
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t c = 0; c < nc; ++c) {
        const double p = p_abc[(a * nb + b) * nc + c];
        if (p == 0.0) continue;
        terms.push_back(p * std::log(p * p_c[c] / (p_ac[a * nc + c] * p_bc[b * nc + c])));
      }
    }
  }
  return clamp_nonneg(compensated_sum(terms));
}

}  // namespace jointpred
