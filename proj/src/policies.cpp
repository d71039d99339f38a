#include "catlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace catlab {

namespace {

constexpr std::size_t kMaxCoverSize = 2'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<Piece> merge_pieces(std::vector<Piece> in) {
  std::vector<Piece> out;
  for (const Piece& p : in) {
    if (!(p.hi > p.lo)) continue;
    if (!out.empty() && out.back().action == p.action) {
      out.back().hi = p.hi;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

// Grid {0, h, 2h, ...} with 1 appended, built by multiplication so that grid
// points are exact multiples of h.
std::vector<double> unit_grid(double h) {
  std::vector<double> g;
  for (std::size_t k = 0;; ++k) {
    const double v = static_cast<double>(k) * h;
    if (v >= 1.0 - 1e-9) break;
    g.push_back(v);
  }
  g.push_back(1.0);
  return g;
}

double pieces_disagreement(const std::vector<Piece>& a, const std::vector<Piece>& b) {
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (hi > lo && a[i].action != b[j].action) total += hi - lo;
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ArgumentError(fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
  }
}

}  // namespace

std::size_t InputGrid::nearest(const Input& x) const {
  if (points.empty()) throw InvariantError("empty input grid");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(points[i], x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Policy::Policy(PolicyDescriptor d) : desc_(std::move(d)) {
  if (const auto* k = std::get_if<KSegment>(&desc_)) {
    if (k->labels.size() != k->boundaries.size() + 1) {
      throw ArgumentError("k-segment policy needs one more label than boundaries");
    }
    for (std::size_t i = 1; i < k->boundaries.size(); ++i) {
      if (!(k->boundaries[i] > k->boundaries[i - 1])) {
        throw ArgumentError("k-segment boundaries must be strictly increasing");
      }
    }
  } else if (const auto* e = std::get_if<Explicit>(&desc_)) {
    if (!e->grid || e->grid->points.size() != e->labels.size() || e->labels.empty()) {
      throw ArgumentError("explicit policy needs one label per grid point");
    }
  } else if (const auto* iv = std::get_if<Interval>(&desc_)) {
    if (iv->lo > iv->hi) throw ArgumentError("interval needs lo <= hi");
  }
}

Policy Policy::threshold(double theta, bool positive) { return Policy(Threshold{theta, positive}); }
Policy Policy::interval(double lo, double hi) { return Policy(Interval{lo, hi}); }
Policy Policy::k_segment(std::vector<double> boundaries, std::vector<ActionId> labels) {
  return Policy(KSegment{std::move(boundaries), std::move(labels)});
}
Policy Policy::explicit_table(std::shared_ptr<const InputGrid> grid, std::vector<ActionId> labels) {
  return Policy(Explicit{std::move(grid), std::move(labels)});
}

Policy Policy::one_vs_rest(ActionId y) const {
  Policy p = *this;
  if (indicator_) {
    // 1(1(pi(x) = t) = y): identity for y = 1, complement for y = 0.
    throw UnsupportedError("one-vs-rest of a one-vs-rest policy");
  }
  p.indicator_ = y;
  return p;
}

ActionId Policy::apply_indicator(ActionId a) const {
  if (!indicator_) return a;
  return ActionId(a == *indicator_ ? 1U : 0U);
}

ActionId Policy::raw_at(double x) const {
  return std::visit(
      Overloaded{
          [x](const Threshold& t) { return ActionId((x >= t.theta) == t.positive ? 1U : 0U); },
          [x](const Interval& i) { return ActionId(x >= i.lo && x <= i.hi ? 1U : 0U); },
          [x](const KSegment& k) {
            const auto it = std::upper_bound(k.boundaries.begin(), k.boundaries.end(), x);
            return k.labels[static_cast<std::size_t>(it - k.boundaries.begin())];
          },
          [x](const Explicit& e) { return e.labels[e.grid->nearest(Input::scalar(x))]; },
      },
      desc_);
}

ActionId Policy::at(double x) const { return apply_indicator(raw_at(x)); }

ActionId Policy::operator()(const Input& x) const {
  if (const auto* e = std::get_if<Explicit>(&desc_)) {
    return apply_indicator(e->labels[e->grid->nearest(x)]);
  }
  if (x.dim() != 1) throw ArgumentError("analytic 1-D policy evaluated on a multi-dimensional input");
  return at(x[0]);
}

std::vector<Piece> Policy::pieces() const {
  std::vector<Piece> raw = std::visit(
      Overloaded{
          [](const Threshold& t) {
            const double th = std::clamp(t.theta, 0.0, 1.0);
            const ActionId below(t.positive ? 0U : 1U);
            const ActionId above(t.positive ? 1U : 0U);
            return std::vector<Piece>{{0.0, th, below}, {th, 1.0, above}};
          },
          [](const Interval& i) {
            const double lo = std::clamp(i.lo, 0.0, 1.0);
            const double hi = std::clamp(i.hi, 0.0, 1.0);
            return std::vector<Piece>{{0.0, lo, ActionId(0)}, {lo, hi, ActionId(1)}, {hi, 1.0, ActionId(0)}};
          },
          [](const KSegment& k) {
            std::vector<Piece> out;
            double lo = 0.0;
            for (std::size_t i = 0; i < k.labels.size(); ++i) {
              const double hi = i < k.boundaries.size() ? std::clamp(k.boundaries[i], 0.0, 1.0) : 1.0;
              out.push_back({lo, std::max(lo, hi), k.labels[i]});
              lo = std::max(lo, hi);
            }
            return out;
          },
          [](const Explicit&) -> std::vector<Piece> {
            throw UnsupportedError("explicit policies have no analytic piece form");
          },
      },
      desc_);
  for (Piece& p : raw) p.action = apply_indicator(p.action);
  return merge_pieces(std::move(raw));
}

std::string Policy::describe() const {
  std::string base = std::visit(
      Overloaded{
          [](const Threshold& t) { return fmt::format("threshold({}{})", t.positive ? "" : "-", t.theta); },
          [](const Interval& i) { return fmt::format("interval([{}, {}])", i.lo, i.hi); },
          [](const KSegment& k) { return fmt::format("k-segment({} boundaries)", k.boundaries.size()); },
          [](const Explicit& e) { return fmt::format("explicit({} points)", e.labels.size()); },
      },
      desc_);
  if (indicator_) base = fmt::format("1[{} = {}]", base, indicator_->value);
  return base;
}

PolicyClass PolicyClass::thresholds() {
  PolicyClass c;
  c.kind = ClassKind::kThresholds;
  c.vc_dim = 1;
  return c;
}

PolicyClass PolicyClass::intervals() {
  PolicyClass c;
  c.kind = ClassKind::kIntervals;
  c.vc_dim = 2;
  return c;
}

PolicyClass PolicyClass::k_segments(std::size_t K) {
  if (K < 1) throw ArgumentError("k-segment class needs K >= 1");
  PolicyClass c;
  c.kind = ClassKind::kKSegments;
  c.max_segments = K;
  c.vc_dim = static_cast<int>(K);
  return c;
}

PolicyClass PolicyClass::finite(std::vector<Policy> members, std::size_t action_count) {
  if (members.empty()) throw ArgumentError("finite policy class must be nonempty");
  PolicyClass c;
  c.kind = ClassKind::kFiniteExplicit;
  c.action_count = action_count;
  c.littlestone_dim = static_cast<int>(std::floor(std::log2(static_cast<double>(members.size()))));
  c.members = std::move(members);
  return c;
}

int PolicyClass::dimension() const {
  if (vc_dim) return *vc_dim;
  if (littlestone_dim) return *littlestone_dim;
  throw InvariantError("policy class declares no dimension");
}

std::string PolicyClass::name() const {
  switch (kind) {
    case ClassKind::kThresholds: return "thresholds";
    case ClassKind::kIntervals: return "intervals";
    case ClassKind::kKSegments: return fmt::format("k-segments({})", max_segments);
    case ClassKind::kFiniteExplicit: return fmt::format("finite({})", members.size());
  }
  return "unknown";
}

double Cover::size_ceiling(std::int64_t T) const {
  const double d = source.dimension();
  if (kind == CoverKind::kSmoothEps) return std::pow(41.0 / epsilon, d);
  if (d == 0) return 1.0;
  if (T <= 0) return std::numeric_limits<double>::infinity();
  return std::pow(std::numbers::e * static_cast<double>(T) / d, d);
}

Cover build_smooth_cover(const PolicyClass& cls, double epsilon) {
  validate_epsilon(epsilon);
  Cover cover;
  cover.kind = CoverKind::kSmoothEps;
  cover.epsilon = epsilon;
  cover.source = cls;

  switch (cls.kind) {
    case ClassKind::kThresholds: {
      for (double th : unit_grid(epsilon)) cover.members.push_back(Policy::threshold(th));
      break;
    }
    case ClassKind::kIntervals: {
      const std::vector<double> g = unit_grid(epsilon / 2.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) cover.members.push_back(Policy::interval(g[i], g[j]));
      }
      break;
    }
    case ClassKind::kKSegments: {
      const std::size_t K = cls.max_segments;
      const std::vector<double> g = unit_grid(epsilon / static_cast<double>(K));
      const std::size_t nb = K - 1;
      if (nb > g.size()) throw UnsupportedError("grid too coarse for the requested segment count");
      double tuples = 1.0;
      for (std::size_t i = 0; i < nb; ++i) tuples = tuples * static_cast<double>(g.size() - i) / static_cast<double>(i + 1);
      const double labelings = std::pow(static_cast<double>(cls.action_count), static_cast<double>(K));
      if (tuples * labelings > static_cast<double>(kMaxCoverSize)) {
        throw UnsupportedError(fmt::format("k-segment cover would have {:.3g} members (limit {})",
                                           tuples * labelings, kMaxCoverSize));
      }
      std::vector<std::size_t> idx(nb);
      for (std::size_t i = 0; i < nb; ++i) idx[i] = i;
      std::vector<ActionId> labels(K);
      while (true) {
        std::vector<double> b(nb);
        for (std::size_t i = 0; i < nb; ++i) b[i] = g[idx[i]];
        for (std::size_t code = 0; code < static_cast<std::size_t>(labelings); ++code) {
          std::size_t c = code;
          for (std::size_t s = 0; s < K; ++s) {
            labels[s] = ActionId(static_cast<std::uint32_t>(c % cls.action_count));
            c /= cls.action_count;
          }
          cover.members.push_back(Policy::k_segment(b, labels));
        }
        // next combination of nb indices out of g.size()
        std::size_t pos = nb;
        while (pos > 0 && idx[pos - 1] == g.size() - nb + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < nb; ++i) idx[i] = idx[i - 1] + 1;
      }
      break;
    }
    case ClassKind::kFiniteExplicit:
      cover.members = cls.members;
      break;
  }
  return cover;
}

Cover build_adversarial_cover(const PolicyClass& cls) {
  if (cls.kind != ClassKind::kFiniteExplicit) {
    throw UnsupportedError(fmt::format(
        "adversarial covers are only built for finite classes; use a smooth cover for {}", cls.name()));
  }
  Cover cover;
  cover.kind = CoverKind::kAdversarial;
  cover.members = cls.members;
  cover.source = cls;
  return cover;
}

double disagreement_uniform(const Policy& a, const Policy& b) {
  if (a.is_analytic() && b.is_analytic()) return pieces_disagreement(a.pieces(), b.pieces());
  if (a.is_analytic() || b.is_analytic()) {
    throw ArgumentError("cannot compare an analytic policy with an explicit table");
  }
  const auto& ea = std::get<Explicit>(a.descriptor());
  const auto& eb = std::get<Explicit>(b.descriptor());
  if (ea.grid != eb.grid && ea.grid->points != eb.grid->points) {
    throw ArgumentError("explicit policies tabulated on different grids");
  }
  std::size_t differ = 0;
  for (std::size_t i = 0; i < ea.labels.size(); ++i) {
    const ActionId la = a.indicator_target() ? ActionId(ea.labels[i] == *a.indicator_target() ? 1U : 0U) : ea.labels[i];
    const ActionId lb = b.indicator_target() ? ActionId(eb.labels[i] == *b.indicator_target() ? 1U : 0U) : eb.labels[i];
    differ += la != lb ? 1 : 0;
  }
  return static_cast<double>(differ) / static_cast<double>(ea.labels.size());
}

CoverReport verify_smooth_cover(const Cover& cover, std::span<const Policy> probes) {
  CoverReport report;
  report.probes = probes.size();
  const bool analytic = !cover.members.empty() && cover.members.front().is_analytic();
  std::vector<std::vector<Piece>> member_pieces;
  if (analytic) {
    member_pieces.reserve(cover.members.size());
    for (const Policy& m : cover.members) member_pieces.push_back(m.pieces());
  }
  for (std::size_t p = 0; p < probes.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    if (analytic && probes[p].is_analytic()) {
      const std::vector<Piece> probe_pieces = probes[p].pieces();
      for (const auto& mp : member_pieces) {
        best = std::min(best, pieces_disagreement(probe_pieces, mp));
        if (best == 0.0) break;
      }
    } else {
      for (const Policy& m : cover.members) {
        best = std::min(best, disagreement_uniform(probes[p], m));
        if (best == 0.0) break;
      }
    }
    if (best > report.max_min_disagreement || p == 0) {
      report.max_min_disagreement = best;
      report.worst_probe = p;
    }
  }
  report.pass = report.max_min_disagreement <= cover.epsilon + 1e-12;
  const ClassKind k = cover.source.kind;
  report.exact_by_construction =
      k == ClassKind::kThresholds || k == ClassKind::kIntervals || k == ClassKind::kFiniteExplicit;
  return report;
}

std::vector<Policy> make_probe_policies(const PolicyClass& cls, double epsilon,
                                        std::size_t random_probes, std::uint64_t seed) {
  validate_epsilon(epsilon);
  std::vector<Policy> probes;
  if (cls.kind == ClassKind::kFiniteExplicit) return cls.members;

  const auto grid_count = static_cast<std::size_t>(std::ceil(10.0 / epsilon)) + 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Weyl sequences give a deterministic, well-spread set of endpoint pairs.
  constexpr double kPhi1 = 0.6180339887498949;
  constexpr double kPhi2 = 0.7548776662466927;

  switch (cls.kind) {
    case ClassKind::kThresholds:
      for (std::size_t i = 0; i < grid_count; ++i) {
        probes.push_back(Policy::threshold(static_cast<double>(i) / static_cast<double>(grid_count - 1)));
      }
      for (std::size_t i = 0; i < random_probes; ++i) probes.push_back(Policy::threshold(unit(rng)));
      break;
    case ClassKind::kIntervals:
      for (std::size_t i = 0; i < grid_count; ++i) {
        const double a = std::fmod(static_cast<double>(i) * kPhi1, 1.0);
        const double b = std::fmod(static_cast<double>(i) * kPhi2, 1.0);
        probes.push_back(Policy::interval(std::min(a, b), std::max(a, b)));
      }
      for (std::size_t i = 0; i < random_probes; ++i) {
        const double a = unit(rng);
        const double b = unit(rng);
        probes.push_back(Policy::interval(std::min(a, b), std::max(a, b)));
      }
      break;
    case ClassKind::kKSegments: {
      const std::size_t K = cls.max_segments;
      std::uniform_int_distribution<std::uint32_t> label(0, static_cast<std::uint32_t>(cls.action_count - 1));
      for (std::size_t i = 0; i < grid_count + random_probes; ++i) {
        std::vector<double> b(K - 1);
        for (std::size_t j = 0; j < b.size(); ++j) {
          b[j] = i < grid_count ? std::fmod(static_cast<double>(i * (j + 1)) * kPhi1 + static_cast<double>(j) * kPhi2, 1.0)
                                : unit(rng);
        }
        std::sort(b.begin(), b.end());
        if (std::adjacent_find(b.begin(), b.end()) != b.end()) continue;
        std::vector<ActionId> labels(K);
        for (auto& l : labels) l = ActionId(label(rng));
        probes.push_back(Policy::k_segment(std::move(b), std::move(labels)));
      }
      break;
    }
    case ClassKind::kFiniteExplicit:
      break;
  }
  return probes;
}

double smooth_concentrate_bound(double epsilon, double sigma) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(sigma > 0.0) || sigma > 1.0) throw ArgumentError(fmt::format("sigma must lie in (0, 1], got {}", sigma));
  return epsilon / sigma;
}

}  // namespace catlab
