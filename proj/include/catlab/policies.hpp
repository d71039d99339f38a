#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "catlab/core.hpp"

namespace catlab {

// 1(x >= theta) when positive, 1(x < theta) otherwise.
struct Threshold {
  double theta = 0.0;
  bool positive = true;
};

// 1(x in [lo, hi]).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// labels[i] on [boundaries[i-1], boundaries[i]); a boundary point belongs to
// the segment on its right.
struct KSegment {
  std::vector<double> boundaries;
  std::vector<ActionId> labels;
};

// Finite grid of inputs on which explicit policies are tabulated. Off-grid
// inputs take the label of the nearest grid point (lowest index on ties).
struct InputGrid {
  std::vector<Input> points;
  std::size_t nearest(const Input& x) const;
};

struct Explicit {
  std::shared_ptr<const InputGrid> grid;
  std::vector<ActionId> labels;
};

using PolicyDescriptor = std::variant<Threshold, Interval, KSegment, Explicit>;

// A maximal run [lo, hi) of constant action on [0,1].
struct Piece {
  double lo;
  double hi;
  ActionId action;
};

class Policy {
 public:
  Policy(PolicyDescriptor d);  // NOLINT: descriptors convert implicitly

  static Policy threshold(double theta, bool positive = true);
  static Policy interval(double lo, double hi);
  static Policy k_segment(std::vector<double> boundaries, std::vector<ActionId> labels);
  static Policy explicit_table(std::shared_ptr<const InputGrid> grid,
                               std::vector<ActionId> labels);

  // pi_y(x) = 1(pi(x) = y): the one-vs-rest view used by the multi-action
  // reduction.
  Policy one_vs_rest(ActionId y) const;

  ActionId operator()(const Input& x) const;
  ActionId at(double x) const;

  const PolicyDescriptor& descriptor() const { return desc_; }
  std::optional<ActionId> indicator_target() const { return indicator_; }
  bool is_analytic() const { return !std::holds_alternative<Explicit>(desc_); }

  // Piecewise-constant form over [0,1] for analytic kinds, adjacent equal
  // pieces merged.
  std::vector<Piece> pieces() const;
  std::size_t segment_count() const { return pieces().size(); }

  std::string describe() const;

 private:
  ActionId raw_at(double x) const;
  ActionId apply_indicator(ActionId a) const;

  PolicyDescriptor desc_;
  std::optional<ActionId> indicator_;
};

enum class ClassKind { kThresholds, kIntervals, kKSegments, kFiniteExplicit };

struct PolicyClass {
  ClassKind kind = ClassKind::kThresholds;
  std::size_t max_segments = 0;     // KSegments only
  std::size_t action_count = 2;
  std::vector<Policy> members;      // FiniteExplicit only
  std::optional<int> vc_dim;
  std::optional<int> littlestone_dim;

  static PolicyClass thresholds();
  static PolicyClass intervals();
  static PolicyClass k_segments(std::size_t K);
  static PolicyClass finite(std::vector<Policy> members, std::size_t action_count = 2);

  // Dimension used in the cover-size ceilings; VC when declared, otherwise
  // Littlestone.
  int dimension() const;
  std::string name() const;
};

enum class CoverKind { kSmoothEps, kAdversarial };

struct Cover {
  std::vector<Policy> members;
  CoverKind kind = CoverKind::kSmoothEps;
  double epsilon = 0.0;
  PolicyClass source;

  std::size_t size() const { return members.size(); }
  // (41/eps)^d for smooth covers, (eT/d)^d for adversarial ones.
  double size_ceiling(std::int64_t T = 0) const;
};

Cover build_smooth_cover(const PolicyClass& cls, double epsilon);
Cover build_adversarial_cover(const PolicyClass& cls);

// Uniform-measure disagreement on [0,1] (analytic kinds) or grid fraction
// (explicit tables on a shared grid).
double disagreement_uniform(const Policy& a, const Policy& b);

struct CoverReport {
  double max_min_disagreement = 0.0;
  std::size_t worst_probe = 0;
  std::size_t probes = 0;
  bool pass = false;
  // True when the construction itself guarantees the cover property for
  // every class member, not just the probed ones.
  bool exact_by_construction = false;
};

CoverReport verify_smooth_cover(const Cover& cover, std::span<const Policy> probes);

// Deterministic probe grid of at least 10/eps class members plus `random_probes`
// seeded extras.
std::vector<Policy> make_probe_policies(const PolicyClass& cls, double epsilon,
                                        std::size_t random_probes, std::uint64_t seed);

// eps/sigma: ceiling on disagreement under a sigma-smooth distribution.
double smooth_concentrate_bound(double epsilon, double sigma);

}  // namespace catlab
