#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catlab/core.hpp"
#include "catlab/policies.hpp"
#include "catlab/rng.hpp"

namespace catlab {

// Piecewise-linear lower-bound construction: f equal sections of [0,1], the
// optimal action in section j is bits[j], and the wrong action loses up to
// L/(2f) at the section midpoint.
struct LowerBoundEnv {
  std::int64_t f = 1;
  std::vector<ActionId> bits;
  double L = 1.0;
};

// 1-based section index; a point on an interior boundary j/f falls in section j+1.
std::int64_t lowerbound_section(const LowerBoundEnv& env, double x);
double lowerbound_payoff(const LowerBoundEnv& env, double x, ActionId y);
Policy lowerbound_mentor(const LowerBoundEnv& env);
LowerBoundEnv make_lowerbound_env(std::int64_t T, std::int64_t query_budget_hint, double L, Rng& rng);

// Mentor plays 1 exactly on section j_m; payoff is 1 for matching the mentor
// and 0 otherwise, so local generalization fails.
struct NoLgEnv {
  std::int64_t f = 1;
  std::int64_t j_m = 1;
};

double nolg_payoff(const NoLgEnv& env, double x, ActionId y);
Policy nolg_mentor(const NoLgEnv& env);

// How the declared local-generalization constant is justified.
enum class LgBasis {
  kDirect,                  // the inequality holds with constant L as written
  kLipschitzOptimalMentor,  // payoff L-Lipschitz with an optimal mentor: constant 2L
  kNone,                    // no local generalization
};

class PayoffEnvironment {
 public:
  virtual ~PayoffEnvironment() = default;

  virtual double payoff(std::int64_t t, const Input& x, ActionId y) const = 0;
  virtual std::string name() const = 0;

  const Policy& mentor() const { return mentor_; }
  ActionId mentor_action(const Input& x) const { return mentor_(x); }
  double mentor_payoff(std::int64_t t, const Input& x) const { return payoff(t, x, mentor_action(x)); }

  // Constant appearing in |mu^m(x) - mu(x, pi^m(x'))| <= L |x - x'|: the
  // declared constant itself, or twice it when only Lipschitz continuity with
  // an optimal mentor is declared.
  double local_generalization() const;
  double declared_constant() const { return declared_; }
  LgBasis lg_basis() const { return lg_basis_; }
  bool has_local_generalization() const { return lg_basis_ != LgBasis::kNone; }
  double mentor_floor() const { return mu_min_; }
  std::size_t dim() const { return dim_; }
  std::size_t action_count() const { return action_count_; }
  // Number of segments of a 1-D mentor; empty for n-D mentors.
  std::optional<std::size_t> mentor_segments() const;
  // Class the mentor is drawn from, for learners that need a cover.
  const PolicyClass& natural_class() const { return natural_class_; }

 protected:
  PayoffEnvironment(Policy mentor, double declared, LgBasis basis, double mu_min, std::size_t dim,
                    std::size_t action_count, PolicyClass natural_class);

 private:
  Policy mentor_;
  double declared_;
  LgBasis lg_basis_;
  double mu_min_;
  std::size_t dim_;
  std::size_t action_count_;
  PolicyClass natural_class_;
};

class LowerBoundPayoff final : public PayoffEnvironment {
 public:
  explicit LowerBoundPayoff(LowerBoundEnv env);
  double payoff(std::int64_t t, const Input& x, ActionId y) const override;
  std::string name() const override { return "lowerbound"; }
  const LowerBoundEnv& params() const { return env_; }

 private:
  LowerBoundEnv env_;
};

class NoLgPayoff final : public PayoffEnvironment {
 public:
  explicit NoLgPayoff(NoLgEnv env);
  double payoff(std::int64_t t, const Input& x, ActionId y) const override;
  std::string name() const override { return "nolg"; }

 private:
  NoLgEnv env_;
};

// mu(x, y) = max(0, 1 - L * dist(x, {x' : pi^m(x') = y})) for a 1-D analytic
// mentor. The mentor earns 1 everywhere and local generalization holds with L.
class DistancePayoff final : public PayoffEnvironment {
 public:
  DistancePayoff(std::string name, Policy mentor, double L, PolicyClass natural_class,
                 std::size_t action_count = 2);
  double payoff(std::int64_t t, const Input& x, ActionId y) const override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::vector<Piece> pieces_;
  double slope_;
};

// n-D counterpart for explicit mentors tabulated on a grid:
// mu(x, y) = max(0, 1 - (L/2) * (dist(x, G_y) - dist(x, G))), where G_y are
// grid points labelled y. Payoff is L-Lipschitz and the nearest-point mentor
// is optimal, so local generalization holds with constant 2L.
class VoronoiPayoff final : public PayoffEnvironment {
 public:
  VoronoiPayoff(std::string name, Policy mentor, double L, PolicyClass natural_class,
                std::size_t action_count);
  double payoff(std::int64_t t, const Input& x, ActionId y) const override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  double slope_;
};

// Same payoff for every action and input.
class ConstantPayoff final : public PayoffEnvironment {
 public:
  ConstantPayoff(double value, Policy mentor, std::size_t dim = 1);
  double payoff(std::int64_t, const Input&, ActionId) const override { return value_; }
  std::string name() const override { return "constant"; }

 private:
  double value_;
};

enum class InputKind { kIIDUniform, kIIDSmooth, kScripted, kAdaptiveSmoothHostile };

// Input sequence generator. IIDSmooth draws uniformly from the slab
// [offset, offset + sigma] in the first coordinate (density exactly 1/sigma
// there); AdaptiveSmoothHostile centres a width-sigma slab on the focus point
// supplied by the harness each step (the current leader's decision boundary).
class InputProcess {
 public:
  static InputProcess uniform(std::size_t n = 1);
  static InputProcess smooth_slab(double sigma, double offset, std::size_t n = 1);
  static InputProcess scripted(std::vector<Input> sequence);
  static InputProcess hostile(double sigma, std::size_t n = 1);

  Input sample(std::int64_t t, Rng& rng);
  void set_focus(std::optional<double> focus) { focus_ = focus; }

  InputKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  std::size_t dim() const { return n_; }
  std::size_t script_length() const { return script_.size(); }

 private:
  InputKind kind_ = InputKind::kIIDUniform;
  std::size_t n_ = 1;
  double sigma_ = 1.0;
  double offset_ = 0.0;
  std::vector<Input> script_;
  std::optional<double> focus_;
};

std::vector<Input> load_script(const std::string& path);

struct LgCertificate {
  double max_ratio = 0.0;
  double declared = 0.0;
  double ceiling = 0.0;  // declared L, or 2L for Lipschitz-with-optimal-mentor
  std::int64_t pairs_evaluated = 0;
  bool pass = false;
};

// Samples input pairs (half uniform, half within 0.01 of each other) and
// reports the largest |mu^m(x) - mu(x, pi^m(x'))| / |x - x'| seen.
LgCertificate certify_local_generalization(const PayoffEnvironment& env, std::int64_t pairs, Rng& rng);

}  // namespace catlab
