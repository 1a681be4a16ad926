#include "varlag/local_models.hpp"

#include <cmath>
#include <stdexcept>

namespace varlag {

namespace {

constexpr double kSigma2Floor = 1e-12;
constexpr double kProbClamp = 1e-12;
constexpr double kOlsRescueRidge = 1e-8;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

std::optional<FitResult> fit_ols(const DesignMatrix& dm) {
    if (dm.n < dm.p) return std::nullopt;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.rows);
    Eigen::VectorXd beta;
    if (qr.rank() == dm.p) {
        beta = qr.solve(dm.response);
    } else {
        // Rank-deficient design: retry through ridge-stabilised normal equations.
        Eigen::MatrixXd gram = dm.rows.transpose() * dm.rows;
        gram.diagonal().array() += kOlsRescueRidge;
        beta = gram.ldlt().solve(dm.rows.transpose() * dm.response);
    }
    if (!all_finite(beta)) return std::nullopt;

    const double rss = (dm.response - dm.rows * beta).squaredNorm();
    const double n = static_cast<double>(dm.n);
    const double sigma2 = std::max(rss / n, kSigma2Floor);
    const double log_lik = -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0);
    if (!std::isfinite(log_lik)) return std::nullopt;

    FitResult fit;
    fit.coefficients = std::move(beta);
    fit.log_likelihood = log_lik;
    fit.param_count = dm.p + 1;  // regression coefficients plus the variance
    fit.n_used = dm.n;
    fit.converged = true;
    fit.iterations = 0;
    fit.sigma2 = sigma2;
    return fit;
}

std::optional<FitResult> fit_logistic_irls(const DesignMatrix& dm, const IrlsSettings& settings) {
    if (dm.n < dm.p) return std::nullopt;
    for (int r = 0; r < dm.n; ++r) {
        if (dm.response(r) != 0.0 && dm.response(r) != 1.0) {
            throw std::invalid_argument("logistic response must be 0/1");
        }
    }

    const auto& X = dm.rows;
    const auto& y = dm.response;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(dm.p);
    bool converged = false;
    int iterations = 0;

    for (int k = 0; k < settings.max_iter; ++k) {
        iterations = k + 1;
        const Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
        mu = mu.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
        const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        const Eigen::VectorXd z = eta.array() + (y - mu).array() / w.array();
        if (!w.allFinite() || !z.allFinite()) return std::nullopt;

        const Eigen::VectorXd sqrt_w = w.array().sqrt();
        const Eigen::MatrixXd xw = sqrt_w.asDiagonal() * X;
        const Eigen::VectorXd zw = sqrt_w.array() * z.array();
        Eigen::MatrixXd a = xw.transpose() * xw;
        a.diagonal().array() += settings.ridge;
        const Eigen::VectorXd b = xw.transpose() * zw;
        const Eigen::VectorXd next = a.ldlt().solve(b);
        if (!all_finite(next)) return std::nullopt;

        const double step = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (step < settings.tol) {
            converged = true;
            break;
        }
    }

    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
    mu = mu.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
    const double log_lik =
        (y.array() * mu.array().log() + (1.0 - y.array()) * (1.0 - mu.array()).log()).sum();
    if (!std::isfinite(log_lik)) return std::nullopt;

    FitResult fit;
    fit.coefficients = std::move(beta);
    fit.log_likelihood = log_lik;
    fit.param_count = dm.p;  // Bernoulli has no dispersion parameter
    fit.n_used = dm.n;
    fit.converged = converged;
    fit.iterations = iterations;
    fit.sigma2 = 0.0;
    return fit;
}

}  // namespace varlag
