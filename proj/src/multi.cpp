#include "catlab/learners.hpp"

namespace catlab {

namespace {

// Issues at most one real query per step, however many copies ask.
class SharedQuery final : public MentorChannel {
 public:
  explicit SharedQuery(MentorChannel& real) : real_(real) {}
  std::optional<ActionId> ask(const Input& x) override {
    if (!answer_) answer_ = real_.ask(x);
    return *answer_;
  }
  bool asked() const { return answer_.has_value(); }
  std::optional<ActionId> answer() const { return answer_ ? *answer_ : std::nullopt; }

 private:
  MentorChannel& real_;
  std::optional<std::optional<ActionId>> answer_;
};

// Hands a copy the binary label 1(pi^m(x) = y).
class IndicatorChannel final : public MentorChannel {
 public:
  IndicatorChannel(SharedQuery& shared, ActionId y) : shared_(shared), y_(y) {}
  std::optional<ActionId> ask(const Input& x) override {
    const std::optional<ActionId> a = shared_.ask(x);
    if (!a) return std::nullopt;
    return ActionId(*a == y_ ? 1U : 0U);
  }

 private:
  SharedQuery& shared_;
  ActionId y_;
};

}  // namespace

Cover one_vs_rest_cover(const Cover& cover, ActionId y) {
  Cover out;
  out.kind = cover.kind;
  out.epsilon = cover.epsilon;
  out.source = cover.source;
  out.source.action_count = 2;
  out.members.reserve(cover.size());
  for (const Policy& p : cover.members) out.members.push_back(p.one_vs_rest(y));
  if (out.source.kind == ClassKind::kFiniteExplicit) out.source.members = out.members;
  return out;
}

MultiActionLearner::MultiActionLearner(const Cover& cover, std::size_t action_count, std::int64_t T,
                                       double epsilon, std::size_t n) {
  if (action_count < 2) throw ArgumentError("multi-action learner needs at least two actions");
  copies_.reserve(action_count);
  for (std::size_t y = 0; y < action_count; ++y) {
    copies_.emplace_back(one_vs_rest_cover(cover, ActionId(static_cast<std::uint32_t>(y))), T, epsilon, n);
  }
  votes_.assign(action_count, Decision::act(ActionId(0)));
}

StepDecision MultiActionLearner::step(std::int64_t t, const Input& x, MentorChannel& mentor, Rng& rng) {
  SharedQuery shared(mentor);
  for (std::size_t y = 0; y < copies_.size(); ++y) {
    IndicatorChannel channel(shared, ActionId(static_cast<std::uint32_t>(y)));
    votes_[y] = copies_[y].step(t, x, channel, rng).decision;
  }

  StepDecision out;
  if (const std::optional<ActionId> label = shared.answer()) {
    out.decision = Decision::query();
    out.mentor_action = label;
    return out;
  }
  out.decision = Decision::act(combine_votes(votes_));
  return out;
}

ActionId combine_votes(std::span<const Decision> votes) {
  for (std::size_t y = 0; y < votes.size(); ++y) {
    if (!votes[y].is_query() && votes[y].action() == ActionId(1)) return ActionId(static_cast<std::uint32_t>(y));
  }
  return ActionId(0);
}

}  // namespace catlab
