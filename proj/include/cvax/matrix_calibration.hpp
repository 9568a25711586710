#ifndef CVAX_MATRIX_CALIBRATION_HPP
#define CVAX_MATRIX_CALIBRATION_HPP

#include "cvax/transition_matrix.hpp"

#include <optional>

namespace cvax {

struct MatrixFitOptions {
    int max_iterations = 500;
    double fd_step = 1e-6;       // forward finite-difference step
    double rms_tol = 1e-10;      // stop when weighted RMS improves less
    double lambda_init = 1e-3;   // Marquardt damping
};

struct MatrixFitDiagnostics {
    bool converged = false;
    int iterations = 0;
    double weighted_rms = 0.0;
    PDTable fitted;              // propagated PDs at the target tenors
    Eigen::MatrixXd residuals;   // fitted - target, n_tenors x n_ratings
};

struct MatrixFitResult {
    TransitionMatrix matrix;
    MatrixFitDiagnostics diagnostics;
};

// 1/tenor, normalized to sum 1 over tenors, replicated per rating: short
// tenors dominate the fit.
Eigen::MatrixXd default_pd_weights(const PDTable& targets);

// Weighted RMS of an error matrix under the given weights:
// sqrt(sum w e^2 / sum w).
double weighted_rms(const Eigen::MatrixXd& errors,
                    const Eigen::MatrixXd& weights);

// Fit a Markovian annual transition matrix whose propagated cumulative
// default probabilities reproduce the target table, by Levenberg-Marquardt
// over one unconstrained parameter per live-to-live cell. A row-wise
// logistic normalization (default column as the reference category) keeps
// every iterate row-stochastic with an absorbing default state.
MatrixFitResult risk_neutralize_matrix(
    const PDTable& targets, const Eigen::MatrixXd& weights,
    const std::optional<TransitionMatrix>& seed_matrix = std::nullopt,
    const MatrixFitOptions& options = {});

} // namespace cvax

#endif
