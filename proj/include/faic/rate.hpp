#pragma once

#include <span>
#include <vector>

#include "faic/channel.hpp"
#include "faic/constellation.hpp"
#include "faic/mc.hpp"

namespace faic {

/// A rate in bits/s/Hz. Exact computations report std_error = 0.
struct RateEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Per-user weights with mu_j >= 0 and sum mu_j = K.
struct Weights {
  std::vector<double> mu;

  static Weights equal(std::size_t users);
  /// Throws unless the invariants hold for `users` users.
  void validate(std::size_t users) const;
};

/// Finite-alphabet achievable rate of user j with interference marginalized.
/// Inner sums are exact enumerations; the noise expectation uses mc.samples
/// draws from the stream (mc.seed, j).
RateEstimate finite_rate(const ChannelSet& ch, const PrecoderSet& pre,
                         std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j,
                         const McConfig& mc);

/// Per-draw values (1/prod M) sum_m log2(H1/H2) for user j, in draw order.
std::vector<double> finite_rate_draws(const ChannelSet& ch, const PrecoderSet& pre,
                                      std::span<const SymbolTable> tables, const NoiseSpec& noise,
                                      std::size_t j, const McConfig& mc);

/// sum_j mu_j finite_rate(j); users with mu_j = 0 are skipped and the
/// per-user errors are combined in quadrature.
RateEstimate finite_wsr(const ChannelSet& ch, const PrecoderSet& pre,
                        std::span<const SymbolTable> tables, const NoiseSpec& noise, const Weights& w,
                        const McConfig& mc);

/// Gaussian-input rate log2 det(sigma2 I + all) - log2 det(sigma2 I + interference).
RateEstimate gaussian_rate(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                           std::size_t j);
RateEstimate gaussian_wsr(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                          const Weights& w);

/// Deterministic approximation with the noise expectation moved inside the
/// logarithm; exponents carry 1/(2 sigma2). Zero at zero SNR.
RateEstimate jensen_rate(const ChannelSet& ch, const PrecoderSet& pre,
                         std::span<const SymbolTable> tables, const NoiseSpec& noise, std::size_t j);

/// Leading low-SNR term (log2 e / sigma2) tr(H_jj G_j G_j^H H_jj^H).
RateEstimate first_order_rate(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                              std::size_t j);

/// log2 det of a Hermitian positive definite matrix.
double log2_det_hpd(const CMatrix& a);

}  // namespace faic
