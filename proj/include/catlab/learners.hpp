#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "catlab/core.hpp"
#include "catlab/hedge.hpp"
#include "catlab/policies.hpp"
#include "catlab/rng.hpp"

namespace catlab {

// What a learner may ask of the world: the mentor's action at an input. A
// channel may refuse (query budget exhausted); learners then act on their
// own best guess.
class MentorChannel {
 public:
  virtual ~MentorChannel() = default;
  virtual std::optional<ActionId> ask(const Input& x) = 0;
};

struct StepDecision {
  Decision decision = Decision::query();
  std::optional<ActionId> mentor_action;  // set iff the mentor answered this step
  // For a non-query action copied from a queried input x', an upper bound on
  // |x - x'|. Used by the scorer to check per-step loss ceilings.
  std::optional<double> support_radius;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) = 0;
  virtual std::string name() const = 0;
  // Decision boundary of the currently favoured policy, if the learner has one.
  // Adaptive input adversaries aim at it.
  virtual std::optional<double> boundary_hint() const { return std::nullopt; }
};

// Queried (input, mentor action) pairs with per-action nearest-neighbour
// distance. The minimum over an empty set is +infinity.
class MemorySet {
 public:
  explicit MemorySet(std::size_t dim) : dim_(dim) {}

  void add(const Input& x, ActionId a);
  double nearest_distance(const Input& x, ActionId a) const;
  // Action of the nearest stored input regardless of action, if any.
  std::optional<ActionId> nearest_action(const Input& x) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<Input, ActionId>>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::vector<std::pair<Input, ActionId>> entries_;
  // 1-D fast path: sorted coordinates per action.
  std::map<std::uint32_t, std::multiset<double>> by_action_;
  std::multiset<double> all_;
};

// Hedge over a cover plus an out-of-distribution test: query whenever no
// remembered input carrying the proposed action lies within eps^(1/n).
class OodHedgeLearner final : public Learner {
 public:
  OodHedgeLearner(Cover cover, std::int64_t T, double epsilon, std::size_t n);

  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "ood-hedge"; }
  std::optional<double> boundary_hint() const override;

  const MemorySet& memory() const { return memory_; }
  const HedgeWithQueries& hedge() const { return hedge_; }
  const Cover& cover() const { return cover_; }
  double epsilon() const { return epsilon_; }
  double ood_radius() const { return ood_radius_; }
  // Index of the policy pi_t chosen on the most recent step.
  std::size_t last_policy() const { return last_policy_; }

 private:
  Cover cover_;
  HedgeWithQueries hedge_;
  MemorySet memory_;
  double epsilon_;
  double ood_radius_;
  std::vector<double> losses_;
  std::size_t last_policy_ = 0;
  mutable std::optional<std::size_t> cached_leader_;
};

// Dynamic bucketing with routine querying for 1-D inputs.
class DbwrqLearner final : public Learner {
 public:
  struct Bucket {
    double lo = 0.0;
    double hi = 0.0;
    int depth = 0;
    std::int64_t visits = 0;
    std::optional<std::pair<double, ActionId>> sample;
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool is_leaf() const { return left < 0; }
    double length() const { return hi - lo; }
  };

  DbwrqLearner(std::int64_t T, std::int64_t g);

  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "dbwrq"; }

  std::int64_t g() const { return g_; }
  double split_threshold() const { return split_at_; }
  const std::vector<Bucket>& buckets() const { return buckets_; }
  std::size_t active_bucket_count() const;
  std::size_t queried_count() const { return queried_.size(); }
  // Bucket used on the most recent step.
  const Bucket& last_bucket() const { return buckets_[static_cast<std::size_t>(last_bucket_)]; }

 private:
  std::int32_t locate_leaf(double x);
  std::optional<std::pair<double, ActionId>> first_queried_in(double lo, double hi) const;
  std::optional<ActionId> nearest_queried(double x) const;
  StepDecision evaluate(double x, const Input& input, MentorChannel& mentor);
  std::int32_t new_bucket(double lo, double hi, int depth);

  std::int64_t T_;
  std::int64_t g_;
  double split_at_;
  std::vector<Bucket> buckets_;
  std::unordered_map<std::int64_t, std::int32_t> roots_;
  struct Queried {
    ActionId action;
    std::uint64_t order;
  };
  std::multimap<double, Queried> queried_;
  std::int32_t last_bucket_ = 0;
};

// g(T) = ceil(T^c).
std::int64_t dbwrq_default_g(std::int64_t T, double exponent);
// ceil((diam + 4) g): ceiling on the number of mentor queries DBWRQ makes.
std::int64_t dbwrq_query_ceiling(double diam, std::int64_t g_T);

// One binary OOD-Hedge copy per action, each learning 1(pi^m(x) = y). At most
// one mentor query per step; only copies that asked receive the label.
class MultiActionLearner final : public Learner {
 public:
  MultiActionLearner(const Cover& cover, std::size_t action_count, std::int64_t T, double epsilon, std::size_t n);

  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "multi"; }

  std::size_t copies() const { return copies_.size(); }
  const OodHedgeLearner& copy(std::size_t y) const { return copies_[y]; }
  // Per-copy outputs b_t^y of the last step.
  const std::vector<Decision>& last_votes() const { return votes_; }

 private:
  std::vector<OodHedgeLearner> copies_;
  std::vector<Decision> votes_;
};

// Lowest action whose copy voted 1; action 0 when none did.
ActionId combine_votes(std::span<const Decision> votes);

// Cover of the one-vs-rest class Pi_y induced by a cover of Pi.
Cover one_vs_rest_cover(const Cover& cover, ActionId y);

class AlwaysQueryLearner final : public Learner {
 public:
  explicit AlwaysQueryLearner(std::size_t n) : memory_(n) {}
  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "always"; }

 private:
  MemorySet memory_;
};

class NeverQueryRandomLearner final : public Learner {
 public:
  explicit NeverQueryRandomLearner(std::size_t action_count) : action_count_(action_count) {}
  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "never-random"; }

 private:
  std::size_t action_count_;
};

// Never queries; plays the most frequent mentor label it has observed, which
// without queries stays at the action-0 default.
class NeverQueryMajorityLearner final : public Learner {
 public:
  explicit NeverQueryMajorityLearner(std::size_t action_count) : counts_(action_count, 0) {}
  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override { return "never-majority"; }

 private:
  std::vector<std::int64_t> counts_;
};

// Wraps a learner and refuses its queries once `budget` have been answered.
class BudgetCappedLearner final : public Learner {
 public:
  BudgetCappedLearner(std::int64_t budget, std::unique_ptr<Learner> inner);
  StepDecision step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) override;
  std::string name() const override;
  std::optional<double> boundary_hint() const override { return inner_->boundary_hint(); }

  std::int64_t spent() const { return spent_; }
  const Learner& inner() const { return *inner_; }

 private:
  std::int64_t budget_;
  std::int64_t spent_ = 0;
  std::unique_ptr<Learner> inner_;
};

}  // namespace catlab
