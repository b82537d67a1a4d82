#pragma once

#include <Eigen/Core>

namespace geoaug {

// Point clouds are stored one point per row; couplings are source-by-target.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace geoaug
