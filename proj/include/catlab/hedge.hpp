#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "catlab/policies.hpp"
#include "catlab/rng.hpp"

namespace catlab {

// Hedge over a finite set of experts that only observes losses on steps where
// it queries, which it does independently with probability p.
class HedgeWithQueries {
 public:
  HedgeWithQueries(std::size_t experts, double p, std::int64_t T);

  struct Proposal {
    std::size_t index = 0;  // sampled expert; meaningless when query is set
    bool query = false;
  };

  Proposal propose(Rng& rng);
  // Multiplicative update on a query step; returns the lowest-index argmin of
  // the losses, which is the policy selected for this step.
  std::size_t update(std::span<const double> losses);

  std::size_t size() const { return weights_.size(); }
  double eta() const { return eta_; }
  double p() const { return p_; }
  std::int64_t horizon() const { return T_; }
  const std::vector<double>& weights() const { return weights_; }
  double probability(std::size_t i) const;
  // Highest-weight expert, lowest index on ties.
  std::size_t leader() const;
  std::size_t sample(Rng& rng) const;

 private:
  void rebuild_cdf() const;

  std::vector<double> weights_;
  double eta_;
  double p_;
  std::int64_t T_;
  mutable std::vector<double> cdf_;
  mutable bool cdf_dirty_ = true;
};

// eta = max(sqrt(p log N / (2T)), p^2 / sqrt(2)).
double hedge_learning_rate(double p, std::size_t experts, std::int64_t T);

// p = 1/sqrt(eps T) clamped into (0, 1]; requires eps >= 1/T.
double hedge_query_probability(double epsilon, std::int64_t T);

HedgeWithQueries hedge_init(const Cover& cover, std::int64_t T, double epsilon);

}  // namespace catlab
