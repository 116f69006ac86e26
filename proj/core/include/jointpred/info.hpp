#pragma once

#include <span>
#include <string>
#include <vector>

#include "jointpred/pmf.hpp"

namespace jointpred {

// All quantities are in nats.

// -sum p ln p with 0 ln 0 = 0.
double entropy(const FinitePmf& p);

// sum_x p(x) ln(p(x)/q(x)); +infinity iff some x has p(x) > 0 and q(x) = 0.
// Throws when the outcome sets differ.
double kl_divergence(const FinitePmf& p, const FinitePmf& q);

// -sum_x p(x) ln q(x); +infinity when q misses support of p.
double cross_entropy(const FinitePmf& p, const FinitePmf& q);

// (1/2) sum |p - q|.
double total_variation(const FinitePmf& p, const FinitePmf& q);

struct Axis {
  std::string name;
  int size = 0;
};

// Joint pmf over named finite axes, stored as a flat table over the
// Cartesian product (last axis fastest). Supports exact marginalization and
// conditional mutual information by full enumeration.
class JointPmf {
 public:
  JointPmf(std::vector<Axis> axes, std::vector<double> table);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t table_size() const { return table_.size(); }
  int axis_index(const std::string& name) const;

  // Marginal over the named axes, flattened in the order given
  // (mixed-radix, last listed axis fastest).
  FinitePmf marginal(std::span<const std::string> axis_names) const;

  FinitePmf to_pmf() const { return FinitePmf(table_); }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;

  friend double mutual_information(const JointPmf&, std::span<const std::string>,
                                   std::span<const std::string>,
                                   std::span<const std::string>, bool*);
};

// Exact conditional mutual information I(A; B | C) by full enumeration.
// Disjointness of the three axis subsets is required; an empty A or B yields
// 0 by convention, signalled through *empty_side_warning when provided.
double mutual_information(const JointPmf& joint, std::span<const std::string> vars_a,
                          std::span<const std::string> vars_b,
                          std::span<const std::string> vars_cond = {},
                          bool* empty_side_warning = nullptr);

}  // namespace jointpred
