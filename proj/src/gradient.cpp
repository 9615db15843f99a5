#include "faic/gradient.hpp"

#include <cmath>
#include <limits>

#include "geometry.hpp"

namespace faic {
namespace {

// Per-draw T matrices at one receiver, indexed [sample][transmitter].
struct ReceiverDraws {
  std::vector<std::vector<CMatrix>> t1;
  std::vector<std::vector<CMatrix>> t2;
};

// Column block of user k inside the stacked symbol matrix.
struct Offsets {
  std::vector<Eigen::Index> start;
  Eigen::Index width = 0;
};

ReceiverDraws receiver_draws(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                             const NoiseSpec& noise, std::size_t i, const McConfig& mc) {
  const detail::ReceiverGeometry geo = detail::build_geometry(ch, pre, tables, i);
  const std::size_t users = ch.users();
  const auto total = static_cast<Eigen::Index>(geo.index.total());
  const double inv_s2 = 1.0 / noise.sigma2;

  Offsets off;
  for (std::size_t k = 0; k < users; ++k) {
    off.start.push_back(off.width);
    off.width += ch.n_t(k);
  }
  // Row n holds [x_{1,n_1}^H, ..., x_{K,n_K}^H].
  CMatrix stacked(total, off.width);
  for (Eigen::Index n = 0; n < total; ++n) {
    for (std::size_t k = 0; k < users; ++k) {
      const auto p = geo.index.digit(static_cast<std::size_t>(n), k);
      stacked.block(n, off.start[k], 1, ch.n_t(k)) = tables[k][p].adjoint();
    }
  }

  ReceiverDraws out;
  out.t1.assign(mc.samples, {});
  out.t2.assign(mc.samples, {});
  parallel_for(mc.samples, mc.threads, [&](std::size_t s) {
    const CVector z = noise_draw(mc.seed, i, s, ch.n_r(i), noise.sigma2);
    const auto nr = ch.n_r(i);
    Eigen::RowVectorXd expo(total);
    CMatrix u(nr, total);
    CMatrix acc1 = CMatrix::Zero(nr, off.width);
    CMatrix acc2 = CMatrix::Zero(nr, off.width);
    std::vector<double> sub;
    for (Eigen::Index m = 0; m < total; ++m) {
      const CVector v = geo.points.col(m) + z;
      u = (-geo.points).colwise() + v;
      expo = -u.colwise().squaredNorm() * inv_s2;

      const double top = expo.maxCoeff();
      Eigen::RowVectorXd w = (expo.array() - top).exp().matrix();
      w /= w.sum();
      const CVector wu_sum = u * w.transpose().cast<cplx>();
      CMatrix own_term = wu_sum * stacked.row(m);
      acc1 += own_term - u * (w.transpose().asDiagonal() * stacked);

      const auto& same = geo.same_own[geo.index.digit(static_cast<std::size_t>(m), i)];
      sub.resize(same.size());
      double top2 = -std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < same.size(); ++q) {
        sub[q] = expo(static_cast<Eigen::Index>(same[q]));
        top2 = std::max(top2, sub[q]);
      }
      double norm2 = 0.0;
      for (double& x : sub) norm2 += (x = std::exp(x - top2));
      CVector wu2 = CVector::Zero(nr);
      CMatrix wux2 = CMatrix::Zero(nr, off.width);
      for (std::size_t q = 0; q < same.size(); ++q) {
        const auto n = static_cast<Eigen::Index>(same[q]);
        const double wq = sub[q] / norm2;
        wu2 += wq * u.col(n);
        wux2.noalias() += (wq * u.col(n)) * stacked.row(n);
      }
      acc2 += wu2 * stacked.row(m) - wux2;
      // Receiver i's own symbol is fixed inside the interference-only sum;
      // extending its weights uniformly over n_i leaves d averaging to x_{i,m_i}.
      acc2.middleCols(off.start[i], ch.n_t(i)) =
          acc2.middleCols(off.start[i], ch.n_t(i)) + wux2.middleCols(off.start[i], ch.n_t(i));
    }
    const double inv_total = 1.0 / static_cast<double>(total);
    out.t1[s].resize(users);
    out.t2[s].resize(users);
    for (std::size_t k = 0; k < users; ++k) {
      out.t1[s][k] = acc1.middleCols(off.start[k], ch.n_t(k)) * inv_total;
      out.t2[s][k] = acc2.middleCols(off.start[k], ch.n_t(k)) * inv_total;
    }
  });
  return out;
}

struct Moments {
  CMatrix mean;
  RMatrix var_of_mean;  // sample variance / samples
};

template <typename Get>
Moments moments(std::size_t samples, Get get) {
  Moments r;
  r.mean = get(0) * 0.0;
  for (std::size_t s = 0; s < samples; ++s) r.mean += get(s);
  r.mean /= static_cast<double>(samples);
  r.var_of_mean = RMatrix::Zero(r.mean.rows(), r.mean.cols());
  if (samples < 2) return r;
  for (std::size_t s = 0; s < samples; ++s) r.var_of_mean += (get(s) - r.mean).cwiseAbs2();
  r.var_of_mean /= static_cast<double>(samples - 1) * static_cast<double>(samples);
  return r;
}

void check_user(const ChannelSet& ch, std::size_t k) {
  if (k >= ch.users()) {
    throw Error("user index " + std::to_string(k + 1) + " out of range 1.." + std::to_string(ch.users()));
  }
}

}  // namespace

TMatrices t_matrices(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                     const NoiseSpec& noise, std::size_t i, std::size_t j, const McConfig& mc) {
  check_user(ch, i);
  check_user(ch, j);
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  mc.validate();
  const auto draws = receiver_draws(ch, pre, tables, noise, i, mc);
  const auto m1 = moments(mc.samples, [&](std::size_t s) -> const CMatrix& { return draws.t1[s][j]; });
  const auto m2 = moments(mc.samples, [&](std::size_t s) -> const CMatrix& { return draws.t2[s][j]; });
  return {m1.mean, m2.mean, m1.var_of_mean.cwiseSqrt(), m2.var_of_mean.cwiseSqrt()};
}

GradientReport finite_wsr_gradients(const ChannelSet& ch, const PrecoderSet& pre,
                                    std::span<const SymbolTable> tables, const NoiseSpec& noise,
                                    const Weights& w, const McConfig& mc) {
  w.validate(ch.users());
  detail::check_inputs(ch, pre, tables, noise.sigma2);
  mc.validate();
  const std::size_t users = ch.users();
  const double scale = kLog2e / noise.sigma2;

  GradientReport report;
  report.mc = mc;
  for (std::size_t k = 0; k < users; ++k) {
    report.grad.push_back(CMatrix::Zero(ch.n_t(k), ch.n_t(k)));
    report.std_error.push_back(RMatrix::Zero(ch.n_t(k), ch.n_t(k)));
  }
  for (std::size_t i = 0; i < users; ++i) {
    if (w.mu[i] == 0.0) continue;
    const auto draws = receiver_draws(ch, pre, tables, noise, i, mc);
    for (std::size_t k = 0; k < users; ++k) {
      const CMatrix lead = (w.mu[i] * scale) * ch(i, k).adjoint();
      const auto mom = moments(mc.samples, [&](std::size_t s) -> CMatrix {
        return i == k ? CMatrix(lead * draws.t1[s][k]) : CMatrix(lead * (draws.t1[s][k] - draws.t2[s][k]));
      });
      report.grad[k] += mom.mean;
      report.std_error[k] += mom.var_of_mean;
    }
  }
  for (auto& e : report.std_error) e = e.cwiseSqrt();
  return report;
}

CMatrix finite_wsr_gradient(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                            const NoiseSpec& noise, const Weights& w, std::size_t k, const McConfig& mc) {
  check_user(ch, k);
  return finite_wsr_gradients(ch, pre, tables, noise, w, mc).grad[k];
}

std::vector<CMatrix> gaussian_wsr_gradients(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                                            const Weights& w) {
  w.validate(ch.users());
  check_dimensions(ch, pre);
  if (!(noise.sigma2 > 0.0)) throw Error("noise variance must be positive");
  const std::size_t users = ch.users();
  std::vector<CMatrix> grads;
  for (std::size_t k = 0; k < users; ++k) grads.push_back(CMatrix::Zero(ch.n_t(k), ch.n_t(k)));

  for (std::size_t j = 0; j < users; ++j) {
    if (w.mu[j] == 0.0) continue;
    CMatrix interference = noise.sigma2 * CMatrix::Identity(ch.n_r(j), ch.n_r(j));
    for (std::size_t i = 0; i < users; ++i) {
      if (i == j) continue;
      const CMatrix hg = ch(j, i) * pre.G[i];
      interference += hg * hg.adjoint();
    }
    const CMatrix own = ch(j, j) * pre.G[j];
    const CMatrix all = interference + own * own.adjoint();
    const Eigen::LLT<CMatrix> a(all);
    const Eigen::LLT<CMatrix> b(interference);
    for (std::size_t k = 0; k < users; ++k) {
      const CMatrix hg = ch(j, k) * pre.G[k];
      CMatrix term = ch(j, k).adjoint() * a.solve(hg);
      if (k != j) term -= ch(j, k).adjoint() * b.solve(hg);
      grads[k] += (w.mu[j] * kLog2e) * term;
    }
  }
  return grads;
}

CMatrix gaussian_wsr_gradient(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                              const Weights& w, std::size_t k) {
  check_user(ch, k);
  return gaussian_wsr_gradients(ch, pre, noise, w)[k];
}

KktReport kkt_residual(const PrecoderSet& pre, std::span<const CMatrix> grads) {
  if (grads.size() != pre.users()) throw Error("kkt_residual: one gradient per user required");
  KktReport r;
  for (std::size_t j = 0; j < pre.users(); ++j) {
    const double energy = pre.trace(j);
    const bool zero = !(energy > 0.0);
    const double kappa = zero ? 0.0 : std::max(0.0, (pre.G[j].adjoint() * grads[j]).trace().real() / energy);
    r.kappa.push_back(kappa);
    r.stationarity.push_back((grads[j] - kappa * pre.G[j]).norm());
    r.slackness.push_back(std::abs(kappa * (energy - pre.P[j])));
    r.zero_precoder.push_back(zero);
  }
  return r;
}

KktReport kkt_residual(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                       const NoiseSpec& noise, const Weights& w, const McConfig& mc) {
  if (!pre.feasible()) throw Error("kkt_residual: precoders violate the power constraint");
  const auto report = finite_wsr_gradients(ch, pre, tables, noise, w, mc);
  return kkt_residual(pre, report.grad);
}

std::vector<CMatrix> finite_difference_gradients(const std::function<double(const PrecoderSet&)>& f,
                                                 const PrecoderSet& at, double step_scale) {
  std::vector<CMatrix> out;
  PrecoderSet probe = at;
  for (std::size_t k = 0; k < at.users(); ++k) {
    CMatrix g(at.G[k].rows(), at.G[k].cols());
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      for (Eigen::Index r = 0; r < g.rows(); ++r) {
        const cplx base = at.G[k](r, c);
        const double h = step_scale * (1.0 + std::abs(base));
        double parts[2];
        for (int part = 0; part < 2; ++part) {
          const cplx dir = part == 0 ? cplx{h, 0.0} : cplx{0.0, h};
          probe.G[k](r, c) = base + dir;
          const double up = f(probe);
          probe.G[k](r, c) = base - dir;
          const double down = f(probe);
          parts[part] = (up - down) / (2.0 * h);
        }
        probe.G[k](r, c) = base;
        g(r, c) = 0.5 * cplx{parts[0], parts[1]};
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

double relative_gradient_error(std::span<const CMatrix> a, std::span<const CMatrix> b) {
  if (a.size() != b.size()) throw Error("relative_gradient_error: size mismatch");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]).squaredNorm();
    ref += b[k].squaredNorm();
  }
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / ref);
}

}  // namespace faic
