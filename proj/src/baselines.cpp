#include <algorithm>

#include <fmt/format.h>

#include "catlab/learners.hpp"

namespace catlab {

StepDecision AlwaysQueryLearner::step(std::int64_t, const Input& x, MentorChannel& mentor, Rng&) {
  StepDecision out;
  if (const std::optional<ActionId> label = mentor.ask(x)) {
    memory_.add(x, *label);
    out.decision = Decision::query();
    out.mentor_action = label;
  } else {
    out.decision = Decision::act(memory_.nearest_action(x).value_or(ActionId(0)));
  }
  return out;
}

StepDecision NeverQueryRandomLearner::step(std::int64_t, const Input&, MentorChannel&, Rng& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(action_count_ - 1));
  StepDecision out;
  out.decision = Decision::act(ActionId(pick(rng)));
  return out;
}

StepDecision NeverQueryMajorityLearner::step(std::int64_t, const Input&, MentorChannel&, Rng&) {
  const auto best = std::max_element(counts_.begin(), counts_.end()) - counts_.begin();
  StepDecision out;
  out.decision = Decision::act(ActionId(static_cast<std::uint32_t>(best)));
  return out;
}

namespace {

class BudgetChannel final : public MentorChannel {
 public:
  BudgetChannel(MentorChannel& real, std::int64_t budget, std::int64_t& spent)
      : real_(real), budget_(budget), spent_(spent) {}
  std::optional<ActionId> ask(const Input& x) override {
    if (spent_ >= budget_) return std::nullopt;
    const std::optional<ActionId> a = real_.ask(x);
    if (a) ++spent_;
    return a;
  }

 private:
  MentorChannel& real_;
  std::int64_t budget_;
  std::int64_t& spent_;
};

}  // namespace

BudgetCappedLearner::BudgetCappedLearner(std::int64_t budget, std::unique_ptr<Learner> inner)
    : budget_(budget), inner_(std::move(inner)) {
  if (budget < 0) throw ArgumentError("query budget must be non-negative");
  if (!inner_) throw ArgumentError("budget cap needs an inner learner");
}

StepDecision BudgetCappedLearner::step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) {
  BudgetChannel capped(mentor, budget_, spent_);
  return inner_->step(t, x, capped, rng);
}

std::string BudgetCappedLearner::name() const { return fmt::format("budget:{}:{}", budget_, inner_->name()); }

}  // namespace catlab
