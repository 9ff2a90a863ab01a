#pragma once

#include <Eigen/Dense>

namespace invlab {

// Dimensions are runtime values but always desk-scale; the bounded Eigen
// types below keep every vector and matrix on the stack.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec zero_vec(int d) { return Vec::Zero(d); }
inline Mat identity_mat(int d) { return Mat::Identity(d, d); }

} // namespace invlab
