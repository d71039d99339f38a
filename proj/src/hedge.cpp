#include "catlab/hedge.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace catlab {

namespace {
constexpr double kRenormaliseBelow = 1e-100;
}

double hedge_learning_rate(double p, std::size_t experts, std::int64_t T) {
  const double log_n = std::log(static_cast<double>(experts));
  return std::max(std::sqrt(p * log_n / (2.0 * static_cast<double>(T))), p * p / std::sqrt(2.0));
}

double hedge_query_probability(double epsilon, std::int64_t T) {
  if (T < 1) throw ArgumentError("T must be at least 1");
  const double min_eps = 1.0 / static_cast<double>(T);
  // Tolerate the rounding in eps = 1/T computed by callers.
  if (!(epsilon >= min_eps * (1.0 - 1e-12))) {
    throw ArgumentError(fmt::format("eps below 1/T: eps = {} but the valid range starts at 1/T = {}", epsilon, min_eps));
  }
  return std::min(1.0, 1.0 / std::sqrt(epsilon * static_cast<double>(T)));
}

HedgeWithQueries::HedgeWithQueries(std::size_t experts, double p, std::int64_t T)
    : weights_(experts, 1.0), eta_(0.0), p_(p), T_(T) {
  if (experts == 0) throw ArgumentError("hedge needs at least one expert");
  if (!(p > 0.0) || p > 1.0) throw ArgumentError(fmt::format("query probability must lie in (0, 1], got {}", p));
  if (T < 1) throw ArgumentError("T must be at least 1");
  eta_ = hedge_learning_rate(p, experts, T);
}

HedgeWithQueries hedge_init(const Cover& cover, std::int64_t T, double epsilon) {
  return HedgeWithQueries(cover.size(), hedge_query_probability(epsilon, T), T);
}

HedgeWithQueries::Proposal HedgeWithQueries::propose(Rng& rng) {
  Proposal out;
  out.query = p_ >= 1.0 || uniform01(rng) < p_;
  if (!out.query) out.index = sample(rng);
  return out;
}

std::size_t HedgeWithQueries::update(std::span<const double> losses) {
  if (losses.size() != weights_.size()) throw ArgumentError("loss vector length differs from expert count");
  double best = losses[0];
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!(losses[i] >= 0.0 && losses[i] <= 1.0)) throw ArgumentError(fmt::format("loss {} outside [0, 1]", losses[i]));
    if (losses[i] < best) {
      best = losses[i];
      argmin = i;
    }
  }
  double max_w = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (losses[i] != best) weights_[i] *= std::exp(-eta_ * (losses[i] - best));
    max_w = std::max(max_w, weights_[i]);
  }
  if (max_w < kRenormaliseBelow) {
    for (double& w : weights_) w /= max_w;
  }
  cdf_dirty_ = true;
  return argmin;
}

void HedgeWithQueries::rebuild_cdf() const {
  cdf_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cdf_[i] = acc;
  }
  cdf_dirty_ = false;
}

double HedgeWithQueries::probability(std::size_t i) const {
  if (cdf_dirty_) rebuild_cdf();
  return weights_.at(i) / cdf_.back();
}

std::size_t HedgeWithQueries::sample(Rng& rng) const {
  if (cdf_dirty_) rebuild_cdf();
  const double r = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), weights_.size() - 1);
}

std::size_t HedgeWithQueries::leader() const {
  return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
}

}  // namespace catlab
