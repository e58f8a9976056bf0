#pragma once

#include <Eigen/Core>

namespace spaceform {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

}  // namespace spaceform
