#pragma once

#include <Eigen/Dense>

namespace admitune {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat7 = Eigen::Matrix<double, 7, 7>;

}  // namespace admitune
