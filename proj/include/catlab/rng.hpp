#pragma once

#include <cstdint>
#include <random>

namespace catlab {

using Rng = std::mt19937_64;

// Component tags for independent substreams within one run.
enum class StreamTag : std::uint64_t {
  kInputs = 1,
  kHedge = 2,
  kLearner = 3,
  kEnvBits = 4,
  kCertify = 5,
};

// Reproducible substream for (master seed, run index, component). Distinct
// triples give statistically independent generators.
Rng derive_rng_stream(std::uint64_t master_seed, std::uint64_t run_index, std::uint64_t component_tag);

inline Rng derive_rng_stream(std::uint64_t master_seed, std::uint64_t run_index, StreamTag tag) {
  return derive_rng_stream(master_seed, run_index, static_cast<std::uint64_t>(tag));
}

double uniform01(Rng& rng);

}  // namespace catlab
