#pragma once

#include <functional>
#include <span>
#include <vector>

#include "faic/rate.hpp"

namespace faic {

// All gradients are Wirtinger derivatives dR/dG^* of rates in bits/s/Hz.
// A real perturbation G + t D changes R by 2 t Re tr(grad^H D) to first order.

/// Expectation matrices at receiver i for transmitter j (N_{r_i} x N_{t_j}).
/// Entry-wise standard errors are sqrt(E|c - mean|^2 / samples) over draws.
struct TMatrices {
  CMatrix T1;
  CMatrix T2;
  RMatrix T1_std_error;
  RMatrix T2_std_error;
};

TMatrices t_matrices(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                     const NoiseSpec& noise, std::size_t i, std::size_t j, const McConfig& mc);

struct GradientReport {
  std::vector<CMatrix> grad;
  std::vector<RMatrix> std_error;
  McConfig mc;
};

/// Finite-alphabet WSR gradient for every user, exact derivative of
/// finite_wsr under the same McConfig.
GradientReport finite_wsr_gradients(const ChannelSet& ch, const PrecoderSet& pre,
                                    std::span<const SymbolTable> tables, const NoiseSpec& noise,
                                    const Weights& w, const McConfig& mc);

CMatrix finite_wsr_gradient(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                            const NoiseSpec& noise, const Weights& w, std::size_t k, const McConfig& mc);

/// Gaussian-input WSR gradient, evaluated with Hermitian solves.
CMatrix gaussian_wsr_gradient(const ChannelSet& ch, const PrecoderSet& pre, const NoiseSpec& noise,
                              const Weights& w, std::size_t k);
std::vector<CMatrix> gaussian_wsr_gradients(const ChannelSet& ch, const PrecoderSet& pre,
                                            const NoiseSpec& noise, const Weights& w);

/// Diagnostic KKT quantities. kappa_j = max(0, Re tr(G^H grad) / tr(G^H G)) is
/// a least-squares fit; the optimizer never uses it.
struct KktReport {
  std::vector<double> kappa;
  std::vector<double> stationarity;
  std::vector<double> slackness;
  std::vector<bool> zero_precoder;
};

KktReport kkt_residual(const PrecoderSet& pre, std::span<const CMatrix> grads);
KktReport kkt_residual(const ChannelSet& ch, const PrecoderSet& pre, std::span<const SymbolTable> tables,
                       const NoiseSpec& noise, const Weights& w, const McConfig& mc);

/// Central differences over the real and imaginary part of every precoder
/// entry with step step_scale * (1 + |entry|), converted to dR/dG^*.
std::vector<CMatrix> finite_difference_gradients(const std::function<double(const PrecoderSet&)>& f,
                                                 const PrecoderSet& at, double step_scale = 1e-4);

/// ||a - b||_F / ||b||_F over all users jointly; b is the reference.
double relative_gradient_error(std::span<const CMatrix> a, std::span<const CMatrix> b);

}  // namespace faic
