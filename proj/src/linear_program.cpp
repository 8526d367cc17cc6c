#include "linear_program.hpp"

#include <stdexcept>
#include <vector>

namespace ivd::detail {

std::optional<LpSolution> maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const Eigen::Index m = a.rows(), n = a.cols();
    if (b.size() != m || c.size() != n) throw std::invalid_argument("maximize: shape mismatch");
    if ((b.array() < 0).any()) throw std::invalid_argument("maximize: requires b >= 0");
    constexpr double eps = 1e-12;

    // Tableau rows 0..m-1 are constraints, row m is the objective (reduced costs).
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.topLeftCorner(m, n) = a;
    t.block(0, n, m, m).setIdentity();
    t.col(n + m).head(m) = b;
    t.row(m).head(n) = -c.transpose();
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    for (;;) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j)
            if (t(m, j) < -eps) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double best = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) <= eps) continue;
            const double ratio = t(i, n + m) / t(i, enter);
            if (leave < 0 || ratio < best - eps ||
                (ratio <= best + eps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) return std::nullopt;
        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i)
            if (i != leave && t(i, enter) != 0) t.row(i) -= t(i, enter) * t.row(leave);
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LpSolution sol{Eigen::VectorXd::Zero(n), t(m, n + m)};
    for (Eigen::Index i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] < n) sol.x(basis[static_cast<std::size_t>(i)]) = t(i, n + m);
    return sol;
}

} // namespace ivd::detail
