#pragma once

#include <span>
#include <vector>

#include "faic/channel.hpp"
#include "faic/constellation.hpp"

namespace faic::detail {

/// Mixed-radix index over (m_1, ..., m_K); user 0 is the most significant digit.
class JointIndex {
 public:
  explicit JointIndex(std::span<const SymbolTable> tables);

  std::size_t total() const { return total_; }
  std::size_t users() const { return sizes_.size(); }
  std::size_t size(std::size_t k) const { return sizes_[k]; }
  std::size_t digit(std::size_t m, std::size_t k) const { return (m / strides_[k]) % sizes_[k]; }
  /// All joint indices whose digit k equals p, ascending.
  std::vector<std::size_t> with_digit(std::size_t k, std::size_t p) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

/// Noiseless received points at receiver j for every joint index:
/// points.col(m) = sum_i H_ji G_i x_{i, m_i}.
struct ReceiverGeometry {
  std::size_t receiver = 0;
  JointIndex index;
  CMatrix points;
  /// same_own[p]: joint indices with m_j = p (interference-only neighbours).
  std::vector<std::vector<std::size_t>> same_own;
};

ReceiverGeometry build_geometry(const ChannelSet& ch, const PrecoderSet& pre,
                                std::span<const SymbolTable> tables, std::size_t j);

void check_inputs(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                  double sigma2);

/// log sum_i exp(v_i) over a non-empty buffer.
double log_sum_exp(std::span<const double> v);

}  // namespace faic::detail
