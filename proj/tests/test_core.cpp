#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "catlab/core.hpp"

using namespace catlab;

TEST_SUITE("core") {
  TEST_CASE("additive regret") {
    CHECK(regret_additive(std::vector<double>{1, 1}, std::vector<double>{1, 0.5}) == doctest::Approx(0.5));
    CHECK(regret_additive(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 1}) == 0.0);
    CHECK(regret_additive(std::vector<double>{0.9, 0.8}, std::vector<double>{0.95, 0.8}) == doctest::Approx(-0.05));
    CHECK_THROWS_AS(regret_additive(std::vector<double>{1, 1}, std::vector<double>{1}), ArgumentError);
  }

  TEST_CASE("multiplicative regret") {
    const ExtendedReal r = regret_multiplicative(std::vector<double>{1, 1}, std::vector<double>{1, 0.5});
    CHECK(r.value() == doctest::Approx(std::log(2.0)));
    CHECK(regret_multiplicative(std::vector<double>{1}, std::vector<double>{0}).is_infinite());
    CHECK(regret_multiplicative(std::vector<double>{0.9, 0.9}, std::vector<double>{0.9, 0.9}) == ExtendedReal(0.0));
    CHECK_THROWS_AS(regret_multiplicative(std::vector<double>{0.0}, std::vector<double>{0.5}), InvariantError);
    CHECK_THROWS_AS(regret_multiplicative(std::vector<double>{1, 1}, std::vector<double>{1}), ArgumentError);
  }

  TEST_CASE("prod vs add examples") {
    ProdVsAdd a = check_prod_vs_add(std::vector<double>{1, 1}, std::vector<double>{1, 0.5});
    CHECK(a.additive_le_multiplicative == CheckResult::kPass);
    CHECK(a.multiplicative_le_scaled_additive == CheckResult::kPass);
    ProdVsAdd b = check_prod_vs_add(std::vector<double>{0.7, 0.4}, std::vector<double>{0.7, 0.4});
    CHECK(b.additive_le_multiplicative == CheckResult::kPass);
    CHECK(b.multiplicative_le_scaled_additive == CheckResult::kPass);
    ProdVsAdd c = check_prod_vs_add(std::vector<double>{1, 1}, std::vector<double>{1, 0});
    CHECK(c.additive_le_multiplicative == CheckResult::kPass);
    CHECK(c.multiplicative_le_scaled_additive == CheckResult::kNotApplicable);
  }

  TEST_CASE("prod vs add never fails on random series") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t len = 1 + trial % 20;
      std::vector<double> mentor(len);
      std::vector<double> agent(len);
      for (std::size_t i = 0; i < len; ++i) {
        mentor[i] = 0.01 + 0.99 * u(rng);
        agent[i] = (trial % 2 == 0) ? mentor[i] * u(rng) : u(rng);
      }
      const ProdVsAdd r = check_prod_vs_add(mentor, agent);
      CHECK(r.additive_le_multiplicative != CheckResult::kFail);
      CHECK(r.multiplicative_le_scaled_additive != CheckResult::kFail);
      if (trial % 2 == 0 && *std::min_element(agent.begin(), agent.end()) > 0.0) {
        CHECK(r.multiplicative_le_scaled_additive == CheckResult::kPass);
      }
    }
  }

  TEST_CASE("scaled direction needs mentor domination") {
    // R^mul = 0 but R+/min agent = -49: the agent outperforming the mentor on
    // one step breaks the bound, so the check must not apply.
    const std::vector<double> mentor{0.02, 0.5};
    const std::vector<double> agent{0.01, 1.0};
    CHECK(regret_multiplicative(mentor, agent).value() > regret_additive(mentor, agent) / 0.01);
    const ProdVsAdd r = check_prod_vs_add(mentor, agent);
    CHECK(r.additive_le_multiplicative == CheckResult::kNotApplicable);
    CHECK(r.multiplicative_le_scaled_additive == CheckResult::kNotApplicable);
  }

  TEST_CASE("extended real formatting") {
    CHECK(ExtendedReal::infinity().to_string() == "inf");
    CHECK(ExtendedReal::parse("inf").is_infinite());
    CHECK(ExtendedReal::parse(ExtendedReal(0.1).to_string()) == ExtendedReal(0.1));
    CHECK(ExtendedReal(1.0) < ExtendedReal::infinity());
    CHECK((ExtendedReal(1.0) + ExtendedReal::infinity()).is_infinite());
    CHECK_THROWS(ExtendedReal::infinity().value());
  }

  TEST_CASE("payoff validation") {
    CHECK(validate_payoff(1.0 + 1e-13) == 1.0);
    CHECK(validate_payoff(-1e-13) == 0.0);
    CHECK_THROWS_AS(validate_payoff(1.1), InvariantError);
    CHECK_THROWS_AS(validate_payoff(std::nan("")), InvariantError);
  }

  TEST_CASE("inputs and decisions") {
    CHECK_THROWS_AS(Input(std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(Input::scalar(std::nan("")), ArgumentError);
    CHECK(distance(Input{0.0, 0.0}, Input{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(Decision::query().is_query());
    CHECK(Decision::act(ActionId(2)).action() == ActionId(2));
    CHECK_THROWS(Decision::query().action());
  }

  TEST_CASE("regret report from step records") {
    std::vector<StepRecord> steps(3);
    steps[0].decision = Decision::query();
    steps[0].queried = true;
    steps[0].payoff = steps[0].mentor_payoff = 0.9;
    steps[1].decision = Decision::act(ActionId(1));
    steps[1].payoff = 0.5;
    steps[1].mentor_payoff = 1.0;
    steps[2].decision = Decision::act(ActionId(0));
    steps[2].payoff = 1.0;
    steps[2].mentor_payoff = 1.0;
    const RegretReport r = make_regret_report(steps);
    CHECK(r.T == 3);
    CHECK(r.query_count == 1);
    CHECK(r.additive == doctest::Approx(0.5));
    CHECK(r.multiplicative.value() == doctest::Approx(std::log(2.0)));
    REQUIRE(r.cumulative_additive.size() == 3);
    CHECK(r.cumulative_additive[1] == doctest::Approx(0.5));
    CHECK(r.cumulative_queries == std::vector<std::int64_t>{1, 1, 1});
  }
}
