#pragma once

#include <optional>
#include <span>
#include <vector>

#include "faic/channel.hpp"
#include "faic/constellation.hpp"

namespace faic {

/// Beamforming along the dominant right singular vector of each direct link:
/// G_j = sqrt(P_j) [v_max, 0, ..., 0].
///
/// A degenerate top eigenspace resolves to the normalized projection of the
/// first unit vector e_t (t = 1, 2, ...) with a nonzero projection, which is the
/// member with the largest |first component|. Every returned vector has its
/// largest-magnitude entry real and positive.
PrecoderSet low_snr_design(const ChannelSet& ch, std::span<const double> powers);

/// Unit vector spanning the dominant eigenspace of a Hermitian PSD matrix,
/// with the tie-break and phase rule of low_snr_design.
CVector dominant_eigenvector(const CMatrix& hermitian);

/// Extremes of the distinct nonzero magnitudes |(H_ji (x_m - x_n))_t| over all
/// receivers j, symbol pairs (m, n) and receive antennas t, per transmitter i.
struct OmegaBounds {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::size_t> distinct;
};

inline constexpr double kOmegaTolerance = 1e-9;

OmegaBounds compute_omega(const ChannelSet& ch, std::span<const SymbolTable> tables);

struct HighSnrDesign {
  /// Position 0 holds the user with epsilon = 1.
  std::vector<std::size_t> order;
  std::vector<double> epsilon;
  OmegaBounds omega;
  PrecoderSet precoders;
};

inline constexpr double kCascadeMargin = 1.05;

/// Scaled-identity precoders G_i = sqrt(eps_i P_i / N_t_i) I whose amplitudes
/// s_i satisfy s_a w_{a,min} > sum_{b after a} s_b w_{b,max} along `order`.
/// The default order sorts users by descending P_j w_{j,min}^2.
HighSnrDesign high_snr_design(const ChannelSet& ch, std::span<const SymbolTable> tables,
                              std::span<const double> powers,
                              std::optional<std::vector<std::size_t>> order = std::nullopt);

/// Strict cascade check for a design; returns lhs / rhs per position (infinite
/// for the last user).
std::vector<double> cascade_ratios(const HighSnrDesign& design, const ChannelSet& ch);

/// Symbol-extension rate accounting for interference alignment at high SNR.
struct IaPoint {
  int n = 0;
  double extension = 0.0;  // nu_n
  double long_stream = 0.0;  // l_j for the first eta + 1 streams
  double short_stream = 0.0;  // l_j for the remaining streams
  double rate = 0.0;  // bits over the whole extension
  double average = 0.0;  // rate / nu_n
};

struct IaAccounting {
  int eta = 0;
  double rho = 0.0;
  /// log2 q_j for the K N_T single-antenna streams.
  std::vector<double> stream_bits;
  std::vector<IaPoint> head;
  double limit = 0.0;
};

/// `alphabet_sizes` holds M_j = Q_j^{N_T} per user. Requires K > eta.
IaAccounting ia_rate_loss(int users, int n_t, int n_r, std::span<const double> alphabet_sizes,
                          int head_length = 64);

}  // namespace faic
