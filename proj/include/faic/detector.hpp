#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "faic/channel.hpp"
#include "faic/constellation.hpp"

namespace faic {

/// Bit labels of a user's transmit vectors. Vector p of the symbol table
/// carries label p XOR flip_mask over B = N_t log2 Q bits, most significant
/// bit first; bit value b maps to s = 1 - 2b.
struct BitMapping {
  int bits = 0;
  std::uint64_t flip_mask = 0;

  static BitMapping natural(const SymbolTable& table);
  /// s_i for vector p, i in [0, bits).
  int sign(std::size_t p, int i) const;
  /// Index of the transmit vector carrying the given +/-1 bit vector.
  std::size_t vector_index(std::span<const int> signs) const;
};

enum class LlrUnit { Natural, Log2 };

struct LlrOptions {
  LlrUnit unit = LlrUnit::Natural;
  /// Empty selects BitMapping::natural for user j.
  std::vector<BitMapping> mapping;
};

/// Extrinsic LLRs log P(s_i = +1 | y) / P(s_i = -1 | y) minus the bit's own
/// prior, for receiver j. Interferers are marginalized exactly and uniformly.
/// `priors` are natural-log a priori LLRs (empty means all zero).
std::vector<double> map_llr(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre,
                            std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j,
                            std::span<const double> priors = {}, const LlrOptions& options = {});

struct Whitened {
  CVector y;
  CMatrix channel;     // C^{-1/2} H_jj G_j
  CMatrix inv_sqrt;    // C^{-1/2}
};

/// Interference-plus-noise whitening at receiver j under a Gaussian model of
/// the interferers' transmit vectors (unit covariance).
Whitened whiten(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                std::size_t j);

/// Hermitian PD inverse square root with eigenvalues floored at 1e-12 tr(C).
CMatrix inverse_sqrt_hpd(const CMatrix& c);

/// Baseline detector: whitening followed by single-user MAP over user j's own
/// vectors with unit-variance noise.
std::vector<double> whitened_llr(const CVector& y, const ChannelSet& ch, const PrecoderSet& pre,
                                 std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j,
                                 std::span<const double> priors = {}, const LlrOptions& options = {});

}  // namespace faic
