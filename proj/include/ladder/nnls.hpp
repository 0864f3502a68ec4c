#pragma once

#include <Eigen/Dense>

namespace ladder {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual_norm{0.0};
    int iterations{0};
    bool converged{false};
};

// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = 1e-12, int max_iter = 0);

}  // namespace ladder
