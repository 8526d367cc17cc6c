#pragma once

#include <Eigen/Dense>

#include <optional>

namespace ivd::detail {

struct LpSolution {
    Eigen::VectorXd x;
    double objective;
};

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is
/// feasible). Dense tableau simplex with Bland's rule; nullopt if unbounded.
std::optional<LpSolution> maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

} // namespace ivd::detail
