#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "faic/types.hpp"

namespace faic {

/// Monte-Carlo settings. Noise draw s for receiver j depends only on
/// (seed, j, s), so results do not depend on the worker count.
struct McConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  /// 0 selects the FAIC_THREADS environment variable, falling back to 1.
  unsigned threads = 0;

  void validate() const;
};

unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for i in [0, n) on up to `threads` workers with a static
/// partition. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// One CN(0, sigma2 I) vector of length `dim` from the (seed, stream, sample) stream.
CVector noise_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t sample, int dim,
                   double sigma2);

}  // namespace faic
