#include "spinsim/fitting.hpp"

#include <cmath>
#include <vector>

namespace spinsim {

FitResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& x0, int max_iter, double tol) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    VectorXd x = x0;
    VectorXd r = residuals(x);
    double rss = r.squaredNorm();
    double lambda = 1e-3;
    FitResult out;
    const int n = static_cast<int>(r.size()), p = static_cast<int>(x.size());

    auto jacobian = [&](const VectorXd& xc, const VectorXd& rc) {
        MatrixXd jac(n, p);
        for (int j = 0; j < p; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(xc(j)));
            VectorXd xp = xc;
            xp(j) += h;
            jac.col(j) = (residuals(xp) - rc) / h;
        }
        return jac;
    };

    int it = 0;
    for (; it < max_iter; ++it) {
        MatrixXd jac = jacobian(x, r);
        MatrixXd jtj = jac.transpose() * jac;
        VectorXd jtr = jac.transpose() * r;
        bool stepped = false;
        for (int tries = 0; tries < 30; ++tries) {
            MatrixXd a = jtj;
            for (int d = 0; d < p; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
            VectorXd dx = a.ldlt().solve(-jtr);
            VectorXd xn = x + dx;
            VectorXd rn = residuals(xn);
            double rssn = rn.squaredNorm();
            if (rssn < rss) {
                double rel = (rss - rssn) / std::max(rss, 1e-300);
                x = xn;
                r = rn;
                rss = rssn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < tol || dx.cwiseAbs().maxCoeff() < tol) {
                    out.converged = true;
                    ++it;
                    goto done;
                }
                break;
            }
            lambda *= 10;
            if (lambda > 1e12) break;
        }
        if (!stepped) {
            out.converged = rss < 1e-20 || it > 0;
            break;
        }
    }
done:
    out.params = x;
    out.rss = rss;
    out.iterations = it;
    // parameter standard errors
    MatrixXd jac = jacobian(x, r);
    MatrixXd jtj = jac.transpose() * jac;
    double dof = std::max(1, n - p);
    MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * (rss / dof);
    out.stderrs = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

std::pair<double, double> gaussian_fit(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0;
    for (double v : xs) mean += v;
    mean /= double(xs.size());
    double var = 0;
    for (double v : xs) var += (v - mean) * (v - mean);
    var = xs.size() > 1 ? var / double(xs.size() - 1) : 0.0;
    return {mean, std::sqrt(var)};
}

}  // namespace spinsim
