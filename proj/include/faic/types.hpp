#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace faic {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

/// Every precondition violation in the library surfaces as this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Upper bound on the joint symbol enumeration prod_j M_j.
inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

inline constexpr double kLog2e = 1.4426950408889634;

}  // namespace faic
