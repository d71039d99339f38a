#include <algorithm>
#include <cmath>
#include <limits>

#include "catlab/learners.hpp"

namespace catlab {

void MemorySet::add(const Input& x, ActionId a) {
  if (x.dim() != dim_) throw ArgumentError("memory input has the wrong dimension");
  entries_.emplace_back(x, a);
  if (dim_ == 1) {
    by_action_[a.value].insert(x[0]);
    all_.insert(x[0]);
  }
}

namespace {

double nearest_in(const std::multiset<double>& s, double x) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  const auto it = s.lower_bound(x);
  double best = std::numeric_limits<double>::infinity();
  if (it != s.end()) best = *it - x;
  if (it != s.begin()) best = std::min(best, x - *std::prev(it));
  return best;
}

}  // namespace

double MemorySet::nearest_distance(const Input& x, ActionId a) const {
  if (dim_ == 1) {
    const auto it = by_action_.find(a.value);
    if (it == by_action_.end()) return std::numeric_limits<double>::infinity();
    return nearest_in(it->second, x[0]);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [stored, action] : entries_) {
    if (action == a) best = std::min(best, distance(stored, x));
  }
  return best;
}

std::optional<ActionId> MemorySet::nearest_action(const Input& x) const {
  std::optional<ActionId> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [action, coords] : by_action_) {
    const double d = nearest_in(coords, x[0]);
    if (d < best) {
      best = d;
      out = ActionId(action);
    }
  }
  if (dim_ == 1) return out;
  for (const auto& [stored, action] : entries_) {
    const double d = distance(stored, x);
    if (d < best) {
      best = d;
      out = action;
    }
  }
  return out;
}

OodHedgeLearner::OodHedgeLearner(Cover cover, std::int64_t T, double epsilon, std::size_t n)
    : cover_(std::move(cover)),
      hedge_(hedge_init(cover_, T, epsilon)),
      memory_(n),
      epsilon_(epsilon),
      ood_radius_(std::pow(epsilon, 1.0 / static_cast<double>(n))),
      losses_(cover_.size(), 0.0) {
  if (n < 1) throw ArgumentError("input dimension must be at least 1");
}

StepDecision OodHedgeLearner::step(std::int64_t, const Input& x, MentorChannel& mentor, Rng& rng) {
  std::optional<ActionId> label;
  bool asked = false;

  const HedgeWithQueries::Proposal proposal = hedge_.propose(rng);
  std::size_t policy = proposal.index;
  if (proposal.query) {
    asked = true;
    label = mentor.ask(x);
    if (label) {
      for (std::size_t i = 0; i < cover_.size(); ++i) losses_[i] = cover_.members[i](x) == *label ? 0.0 : 1.0;
      policy = hedge_.update(losses_);
      cached_leader_.reset();
    } else {
      policy = hedge_.sample(rng);
    }
  }
  last_policy_ = policy;
  const ActionId proposed = cover_.members[policy](x);

  StepDecision out;
  const bool in_distribution = memory_.nearest_distance(x, proposed) <= ood_radius_;
  if (!in_distribution) {
    if (!asked) {
      asked = true;
      label = mentor.ask(x);
    }
    // A refused query leaves the memory untouched.
    if (label) memory_.add(x, *label);
  }

  if (label) {
    out.decision = Decision::query();
    out.mentor_action = label;
  } else {
    out.decision = Decision::act(proposed);
    if (in_distribution) out.support_radius = ood_radius_;
  }
  return out;
}

std::optional<double> OodHedgeLearner::boundary_hint() const {
  if (!cached_leader_) cached_leader_ = hedge_.leader();
  const Policy& p = cover_.members[*cached_leader_];
  if (const auto* th = std::get_if<Threshold>(&p.descriptor())) return th->theta;
  if (const auto* iv = std::get_if<Interval>(&p.descriptor())) return iv->lo;
  if (const auto* ks = std::get_if<KSegment>(&p.descriptor())) {
    if (!ks->boundaries.empty()) return ks->boundaries.front();
  }
  return std::nullopt;
}

}  // namespace catlab
