#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kvn {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kvn
