#pragma once

#include "varlag/dataset.hpp"

#include <optional>

namespace varlag {

struct IrlsSettings {
    int max_iter = 25;
    double tol = 1e-8;
    double ridge = 1e-8;
};

struct FitResult {
    Eigen::VectorXd coefficients;
    double log_likelihood = 0.0;
    int param_count = 0;  // includes the Gaussian variance for OLS
    int n_used = 0;
    bool converged = true;
    int iterations = 0;
    double sigma2 = 0.0;  // Gaussian MLE variance (floored); unused for logistic
};

// Least squares via column-pivoted QR with a small-ridge fallback for
// rank-deficient designs. sigma2 is floored at 1e-12 so exact fits keep a
// finite likelihood. Returns nullopt when no finite solution exists.
std::optional<FitResult> fit_ols(const DesignMatrix& dm);

// Ridge-stabilised IRLS for a 0/1 response. Probabilities are clamped to
// [1e-12, 1 - 1e-12] before forming weights and the log-likelihood.
// Returns nullopt if the iteration produces non-finite values. Throws
// std::invalid_argument on a non-binary response.
std::optional<FitResult> fit_logistic_irls(const DesignMatrix& dm,
                                           const IrlsSettings& settings = {});

}  // namespace varlag
