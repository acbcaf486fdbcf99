#pragma once

#include <Eigen/Dense>

#include <complex>

namespace linrk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

}  // namespace linrk
