#include "ladder/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ladder {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<bool>& passive) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
    for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(static_cast<Eigen::Index>(k));
    return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol, int max_iter) {
    const Eigen::Index n = a.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
    const double wtol = tol * scale * static_cast<double>(std::max<Eigen::Index>(n, 1));

    NnlsResult r;
    r.x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
        const Eigen::VectorXd w = a.transpose() * (b - a * r.x);
        Eigen::Index best = -1;
        double best_w = wtol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        }
        if (best < 0) {
            r.converged = true;
            break;
        }
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            const Eigen::VectorXd z = solve_passive(a, b, passive);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
            }
            if (feasible) {
                r.x = z;
                break;
            }
            double step = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
                    step = std::min(step, r.x(j) / (r.x(j) - z(j)));
                }
            }
            r.x += step * (z - r.x);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && std::abs(r.x(j)) <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    r.x(j) = 0.0;
                }
            }
        }
    }
    r.residual_norm = (a * r.x - b).norm();
    return r;
}

}  // namespace ladder
