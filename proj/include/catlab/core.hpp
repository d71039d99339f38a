#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace catlab {

// Bad caller input: wrong lengths, out-of-range parameters, unknown kinds.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A model assumption was violated (e.g. a mentor payoff of zero).
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

// The requested construction exists in theory but is not built here.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point in the input space X, a subset of R^n.
class Input {
 public:
  Input() = default;
  explicit Input(std::vector<double> coords);
  Input(std::initializer_list<double> coords);
  static Input scalar(double x) { return Input(std::vector<double>{x}); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double front() const { return coords_.front(); }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Input&, const Input&) = default;

 private:
  std::vector<double> coords_;
};

double distance(const Input& a, const Input& b);

struct ActionId {
  std::uint32_t value = 0;
  constexpr ActionId() = default;
  constexpr explicit ActionId(std::uint32_t v) : value(v) {}
  friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

// Either a real action or the query pseudo-action (ask the mentor).
class Decision {
 public:
  static Decision query() { return Decision(); }
  static Decision act(ActionId a) { return Decision(a); }

  bool is_query() const { return !action_.has_value(); }
  ActionId action() const;

  friend bool operator==(const Decision&, const Decision&) = default;

 private:
  Decision() = default;
  explicit Decision(ActionId a) : action_(a) {}
  std::optional<ActionId> action_;
};

// A real number or +infinity. Arithmetic with +infinity absorbs.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit by intent
  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  double value() const;
  // +inf maps to the IEEE infinity; only for comparisons and plotting.
  double to_double() const;
  std::string to_string() const;  // "inf" or a round-trippable decimal
  static ExtendedReal parse(const std::string& s);

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
  friend bool operator<=(ExtendedReal a, ExtendedReal b);
  friend bool operator<(ExtendedReal a, ExtendedReal b);
  friend bool operator==(ExtendedReal a, ExtendedReal b);

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline constexpr double kPayoffSlack = 1e-12;

// Values within kPayoffSlack of [0,1] are clamped; anything further out throws.
double validate_payoff(double v);

struct StepRecord {
  std::int64_t t = 0;
  Input x;
  Decision decision = Decision::query();
  bool queried = false;
  std::optional<ActionId> mentor_action;
  double payoff = 0.0;
  double mentor_payoff = 0.0;
};

struct RegretReport {
  double additive = 0.0;
  ExtendedReal multiplicative;
  std::int64_t query_count = 0;
  std::int64_t T = 0;
  std::vector<double> cumulative_additive;
  std::vector<std::int64_t> cumulative_queries;
};

double regret_additive(std::span<const double> mentor_payoffs,
                       std::span<const double> agent_payoffs);

ExtendedReal regret_multiplicative(std::span<const double> mentor_payoffs,
                                   std::span<const double> agent_payoffs);

enum class CheckResult { kPass, kFail, kNotApplicable };

struct ProdVsAdd {
  CheckResult additive_le_multiplicative = CheckResult::kNotApplicable;
  CheckResult multiplicative_le_scaled_additive = CheckResult::kNotApplicable;
};

// Both directions of the sandwich between additive and multiplicative regret.
// Both need the mentor to dominate pointwise; the second also needs every
// agent payoff to be positive. A failed hypothesis yields kNotApplicable.
ProdVsAdd check_prod_vs_add(std::span<const double> mentor_payoffs,
                            std::span<const double> agent_payoffs,
                            double rel_tol = 1e-9);

RegretReport make_regret_report(std::span<const StepRecord> steps);

}  // namespace catlab
