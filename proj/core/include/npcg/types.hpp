#pragma once

#include <Eigen/Dense>

namespace npcg {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace npcg
