#include "faic/designs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace faic {
namespace {

void check_powers(const ChannelSet& ch, std::span<const double> powers) {
  if (powers.size() != ch.users()) {
    throw Error("expected " + std::to_string(ch.users()) + " power budgets, got " + std::to_string(powers.size()));
  }
  for (double p : powers) {
    if (!(p > 0.0)) throw Error("power budgets must be positive");
  }
}

}  // namespace

CVector dominant_eigenvector(const CMatrix& hermitian) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const auto& vals = eig.eigenvalues();
  const Eigen::Index n = vals.size();
  const double top = vals(n - 1);
  const double tol = 1e-10 * std::max(std::abs(top), 1.0);
  Eigen::Index first = n - 1;
  while (first > 0 && top - vals(first - 1) <= tol) --first;
  const CMatrix basis = eig.eigenvectors().rightCols(n - first);

  CVector v;
  if (basis.cols() == 1) {
    v = basis.col(0);
  } else {
    for (Eigen::Index t = 0; t < n; ++t) {
      const CVector proj = basis * basis.row(t).adjoint();
      if (proj.norm() > 1e-8) {
        v = proj.normalized();
        break;
      }
    }
  }
  Eigen::Index peak = 0;
  v.cwiseAbs().maxCoeff(&peak);
  return v * (std::abs(v(peak)) / v(peak));
}

PrecoderSet low_snr_design(const ChannelSet& ch, std::span<const double> powers) {
  check_powers(ch, powers);
  PrecoderSet pre;
  for (std::size_t j = 0; j < ch.users(); ++j) {
    const CMatrix& h = ch(j, j);
    if (h.squaredNorm() == 0.0) throw Error("low_snr_design: direct link of user " + std::to_string(j + 1) + " is zero");
    CMatrix g = CMatrix::Zero(ch.n_t(j), ch.n_t(j));
    g.col(0) = std::sqrt(powers[j]) * dominant_eigenvector(h.adjoint() * h);
    pre.G.push_back(std::move(g));
    pre.P.push_back(powers[j]);
  }
  return pre;
}

OmegaBounds compute_omega(const ChannelSet& ch, std::span<const SymbolTable> tables) {
  if (tables.size() != ch.users()) throw Error("compute_omega: one symbol table per user required");
  checked_joint_size(tables);
  OmegaBounds out;
  for (std::size_t i = 0; i < ch.users(); ++i) {
    if (tables[i].n_t != ch.n_t(i)) throw Error("compute_omega: symbol table dimension mismatch");
    const DifferenceTable diff(tables[i]);
    std::vector<double> mags;
    for (std::size_t j = 0; j < ch.users(); ++j) {
      for (std::size_t m = 0; m < diff.size(); ++m) {
        for (std::size_t n = 0; n < diff.size(); ++n) {
          const CVector a = ch(j, i) * diff(m, n);
          for (Eigen::Index t = 0; t < a.size(); ++t) {
            const double mag = std::abs(a(t));
            if (mag > kOmegaTolerance) mags.push_back(mag);
          }
        }
      }
    }
    if (mags.empty()) {
      throw Error("compute_omega: every rotated difference of user " + std::to_string(i + 1) + " is zero");
    }
    std::sort(mags.begin(), mags.end());
    std::size_t distinct = 1;
    for (std::size_t q = 1; q < mags.size(); ++q) {
      if (mags[q] - mags[q - 1] > kOmegaTolerance) ++distinct;
    }
    out.min.push_back(mags.front());
    out.max.push_back(mags.back());
    out.distinct.push_back(distinct);
  }
  return out;
}

HighSnrDesign high_snr_design(const ChannelSet& ch, std::span<const SymbolTable> tables,
                              std::span<const double> powers, std::optional<std::vector<std::size_t>> order) {
  check_powers(ch, powers);
  const std::size_t users = ch.users();
  HighSnrDesign d;
  d.omega = compute_omega(ch, tables);

  if (order) {
    d.order = *order;
    std::vector<std::size_t> sorted = d.order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(users);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    if (sorted != expected) throw Error("high_snr_design: order must be a permutation of the users");
  } else {
    d.order.resize(users);
    std::iota(d.order.begin(), d.order.end(), std::size_t{0});
    std::stable_sort(d.order.begin(), d.order.end(), [&](std::size_t a, std::size_t b) {
      return powers[a] * d.omega.min[a] * d.omega.min[a] > powers[b] * d.omega.min[b] * d.omega.min[b];
    });
  }

  // Amplitudes s_i = sqrt(eps_i P_i / N_t_i) along the order, solved backward.
  std::vector<double> s(users, 0.0);
  s[users - 1] = 1.0;
  for (std::size_t a = users - 1; a-- > 0;) {
    double tail = 0.0;
    for (std::size_t b = a + 1; b < users; ++b) tail += s[b] * d.omega.max[d.order[b]];
    s[a] = kCascadeMargin * tail / d.omega.min[d.order[a]];
  }
  const auto cap = [&](std::size_t a) { return std::sqrt(powers[d.order[a]] / ch.n_t(d.order[a])); };
  const double lead = cap(0) / s[0];
  for (double& v : s) v *= lead;
  // Shrinking every later user by one factor keeps the cascade strict.
  double shrink = 1.0;
  for (std::size_t a = 1; a < users; ++a) shrink = std::min(shrink, cap(a) / s[a]);
  for (std::size_t a = 1; a < users; ++a) s[a] *= shrink;

  d.epsilon.assign(users, 0.0);
  d.precoders.G.resize(users);
  d.precoders.P.assign(powers.begin(), powers.end());
  for (std::size_t a = 0; a < users; ++a) {
    const std::size_t i = d.order[a];
    const double eps = a == 0 ? 1.0 : std::min(1.0, (s[a] * s[a]) * ch.n_t(i) / powers[i]);
    if (!(eps > 0.0)) {
      throw Error("high_snr_design: cascade inequality at position " + std::to_string(a + 1) +
                  " forces a zero power fraction for user " + std::to_string(i + 1));
    }
    d.epsilon[i] = eps;
    d.precoders.G[i] = CMatrix::Identity(ch.n_t(i), ch.n_t(i)) * std::sqrt(eps * powers[i] / ch.n_t(i));
  }
  return d;
}

std::vector<double> cascade_ratios(const HighSnrDesign& design, const ChannelSet& ch) {
  const std::size_t users = design.order.size();
  std::vector<double> amp(users);
  for (std::size_t a = 0; a < users; ++a) {
    const std::size_t i = design.order[a];
    amp[a] = std::sqrt(design.epsilon[i] * design.precoders.P[i] / ch.n_t(i));
  }
  std::vector<double> ratios(users, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a + 1 < users; ++a) {
    double tail = 0.0;
    for (std::size_t b = a + 1; b < users; ++b) tail += amp[b] * design.omega.max[design.order[b]];
    ratios[a] = amp[a] * design.omega.min[design.order[a]] / tail;
  }
  return ratios;
}

IaAccounting ia_rate_loss(int users, int n_t, int n_r, std::span<const double> alphabet_sizes, int head_length) {
  if (users < 1 || n_t < 1 || n_r < 1) throw Error("ia_rate_loss: user and antenna counts must be positive");
  if (alphabet_sizes.size() != static_cast<std::size_t>(users)) {
    throw Error("ia_rate_loss: expected " + std::to_string(users) + " alphabet sizes");
  }
  if (head_length < 1) throw Error("ia_rate_loss: head length must be positive");
  IaAccounting out;
  out.eta = std::max(n_t, n_r) / std::min(n_t, n_r);
  if (users <= out.eta) {
    throw Error("ia_rate_loss: requires K > eta (K = " + std::to_string(users) + ", eta = " + std::to_string(out.eta) + ")");
  }
  const int streams = users * n_t;
  const double eta = out.eta;
  out.rho = streams * eta * (streams - eta - 1.0);

  for (int i = 0; i < users; ++i) {
    if (!(alphabet_sizes[i] >= 2.0)) throw Error("ia_rate_loss: alphabet sizes must be >= 2");
    const double bits = std::log2(alphabet_sizes[i]) / n_t;
    for (int t = 0; t < n_t; ++t) out.stream_bits.push_back(bits);
  }
  double long_bits = 0.0;
  double short_bits = 0.0;
  for (int q = 0; q < streams; ++q) (q <= out.eta ? long_bits : short_bits) += out.stream_bits[q];

  for (int n = 1; n <= head_length; ++n) {
    IaPoint p;
    p.n = n;
    p.long_stream = eta * std::pow(n + 1.0, out.rho);
    p.short_stream = eta * std::pow(static_cast<double>(n), out.rho);
    p.extension = (eta + 1.0) * std::pow(n + 1.0, out.rho);
    p.rate = p.long_stream * long_bits + p.short_stream * short_bits;
    // Ratio form stays finite when (n + 1)^rho overflows.
    p.average = eta / (eta + 1.0) * (long_bits + std::pow(n / (n + 1.0), out.rho) * short_bits);
    out.head.push_back(p);
  }
  out.limit = eta / (eta + 1.0) * (long_bits + short_bits);
  return out;
}

}  // namespace faic
