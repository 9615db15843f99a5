#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace faic::detail {

JointIndex::JointIndex(std::span<const SymbolTable> tables) {
  total_ = checked_joint_size(tables);
  sizes_.resize(tables.size());
  strides_.resize(tables.size());
  std::size_t stride = 1;
  for (std::size_t k = tables.size(); k-- > 0;) {
    sizes_[k] = tables[k].size();
    strides_[k] = stride;
    stride *= sizes_[k];
  }
}

std::vector<std::size_t> JointIndex::with_digit(std::size_t k, std::size_t p) const {
  std::vector<std::size_t> out;
  out.reserve(total_ / sizes_[k]);
  for (std::size_t m = 0; m < total_; ++m) {
    if (digit(m, k) == p) out.push_back(m);
  }
  return out;
}

void check_inputs(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                  double sigma2) {
  check_dimensions(ch, pre);
  if (tables.size() != ch.users()) {
    throw Error("dimension mismatch: " + std::to_string(tables.size()) + " symbol tables for " +
                std::to_string(ch.users()) + " users");
  }
  for (std::size_t i = 0; i < ch.users(); ++i) {
    if (tables[i].n_t != ch.n_t(i)) {
      throw Error("dimension mismatch: symbol table " + std::to_string(i + 1) + " has n_t = " +
                  std::to_string(tables[i].n_t) + ", channel has " + std::to_string(ch.n_t(i)));
    }
  }
  if (!(sigma2 > 0.0)) throw Error("noise variance must be positive");
  checked_joint_size(tables);
}

ReceiverGeometry build_geometry(const ChannelSet& ch, const PrecoderSet& pre,
                                std::span<const SymbolTable> tables, std::size_t j) {
  ReceiverGeometry g{j, JointIndex(tables), CMatrix(), {}};
  const std::size_t users = ch.users();
  std::vector<CMatrix> per_user(users);
  for (std::size_t i = 0; i < users; ++i) per_user[i] = ch(j, i) * pre.G[i] * tables[i].vectors;

  const auto total = g.index.total();
  g.points = CMatrix::Zero(ch.n_r(j), static_cast<Eigen::Index>(total));
  for (std::size_t m = 0; m < total; ++m) {
    for (std::size_t i = 0; i < users; ++i) {
      g.points.col(static_cast<Eigen::Index>(m)) +=
          per_user[i].col(static_cast<Eigen::Index>(g.index.digit(m, i)));
    }
  }
  g.same_own.resize(g.index.size(j));
  for (std::size_t p = 0; p < g.index.size(j); ++p) g.same_own[p] = g.index.with_digit(j, p);
  return g;
}

double log_sum_exp(std::span<const double> v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - top);
  return top + std::log(acc);
}

}  // namespace faic::detail
