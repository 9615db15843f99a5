#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faic/types.hpp"

namespace faic {

enum class Scheme { BPSK, QPSK, PSK, PAM, QAM };

/// A unit-energy, zero-mean modulation alphabet.
///
/// Point index k carries the bit label k (MSB first); the geometric placement
/// is Gray coded, per axis for QAM and around the circle for PSK.
struct Constellation {
  Scheme scheme = Scheme::BPSK;
  int order = 2;
  std::vector<cplx> points;

  int bits_per_symbol() const;
  /// Config-file name, e.g. "bpsk", "qam16", "psk8".
  std::string name() const;
};

Constellation make_constellation(Scheme scheme, int order);

/// Parses "bpsk", "qpsk", "pskN", "pamN", "qamN" (case-insensitive).
Constellation parse_constellation(std::string_view name);

/// All Q^{n_t} transmit vectors of one user, lexicographic over antennas
/// (antenna 0 is the most significant digit). Column p is x_p.
struct SymbolTable {
  int n_t = 1;
  int order = 2;
  CMatrix vectors;  // n_t x size

  std::size_t size() const { return static_cast<std::size_t>(vectors.cols()); }
  auto operator[](std::size_t p) const { return vectors.col(static_cast<Eigen::Index>(p)); }
  /// Bits carried per vector, n_t * log2(order).
  int bits() const;
};

SymbolTable product_space(const Constellation& c, int n_t);

/// d(m, n) = x_m - x_n for all ordered pairs.
class DifferenceTable {
 public:
  explicit DifferenceTable(const SymbolTable& table);

  std::size_t size() const { return size_; }
  auto operator()(std::size_t m, std::size_t n) const {
    return data_.col(static_cast<Eigen::Index>(m * size_ + n));
  }

 private:
  std::size_t size_;
  CMatrix data_;
};

/// Throws unless prod_j tables[j].size() stays within kEnumerationCap.
std::size_t checked_joint_size(std::span<const SymbolTable> tables);

}  // namespace faic
