#pragma once

#include <Eigen/Dense>
#include <functional>

namespace spinsim {

struct FitResult {
    Eigen::VectorXd params;
    Eigen::VectorXd stderrs;  // from (J^T J)^{-1} * rss/(n-p)
    double rss = 0;
    bool converged = false;
    int iterations = 0;
};

// Levenberg-Marquardt with forward-difference Jacobian; deterministic.
FitResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& x0, int max_iter = 200, double tol = 1e-12);

// mean and standard deviation of a sample (the Gaussian-fit parameters)
std::pair<double, double> gaussian_fit(const std::vector<double>& xs);

}  // namespace spinsim
