#include "cvax/matrix_calibration.hpp"
#include "cvax/errors.hpp"

#include <cmath>

namespace cvax {

namespace {

// Map unconstrained parameters (row-major over live x live cells) onto a
// row-stochastic matrix with absorbing default. Default column is the
// logistic reference category: q_iD = 1 / (1 + sum_j exp(theta_ij)).
TransitionMatrix matrix_from_params(const Eigen::VectorXd& theta,
                                    const std::vector<std::string>& ratings) {
    const Eigen::Index live = static_cast<Eigen::Index>(ratings.size()) - 1;
    const Eigen::Index n = live + 1;
    TransitionMatrix m;
    m.ratings = ratings;
    m.q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < live; ++i) {
        double mx = 0.0; // reference logit of the default column
        for (Eigen::Index j = 0; j < live; ++j)
            mx = std::max(mx, theta(i * live + j));
        double denom = std::exp(-mx);
        for (Eigen::Index j = 0; j < live; ++j)
            denom += std::exp(theta(i * live + j) - mx);
        for (Eigen::Index j = 0; j < live; ++j)
            m.q(i, j) = std::exp(theta(i * live + j) - mx) / denom;
        m.q(i, live) = std::exp(-mx) / denom;
    }
    m.q(live, live) = 1.0;
    return m;
}

Eigen::VectorXd params_from_matrix(const TransitionMatrix& m) {
    const Eigen::Index live = static_cast<Eigen::Index>(m.n_live());
    Eigen::VectorXd theta(live * live);
    constexpr double floor = 1e-12;
    for (Eigen::Index i = 0; i < live; ++i) {
        const double pd = std::max(m.q(i, live), floor);
        for (Eigen::Index j = 0; j < live; ++j)
            theta(i * live + j) = std::log(std::max(m.q(i, j), floor) / pd);
    }
    return theta;
}

// Generic starting point: diagonal-dominant rows with geometric spill to
// neighbours, default cell anchored at the shortest-tenor target.
TransitionMatrix initial_guess(const PDTable& targets) {
    const std::size_t live = targets.ratings.size();
    std::vector<std::string> ratings = targets.ratings;
    ratings.push_back("D");
    const Eigen::Index n = static_cast<Eigen::Index>(live) + 1;
    TransitionMatrix m;
    m.ratings = std::move(ratings);
    m.q = Eigen::MatrixXd::Zero(n, n);

    const double t0 = targets.tenors.front();
    for (std::size_t i = 0; i < live; ++i) {
        const double cum = targets.pd(0, static_cast<Eigen::Index>(i));
        // Annualized first-period default rate.
        double pd1 = 1.0 - std::pow(1.0 - std::min(cum, 0.999), 1.0 / t0);
        pd1 = std::clamp(pd1, 1e-10, 0.5);
        const double diag = std::min(0.88, 1.0 - pd1 - 1e-6);
        double rest = 1.0 - diag - pd1;
        // Spill the remainder geometrically to the nearest ratings.
        std::vector<double> w(live, 0.0);
        double wsum = 0.0;
        for (std::size_t j = 0; j < live; ++j) {
            if (j == i) continue;
            w[j] = std::pow(0.25, std::abs(static_cast<int>(j) -
                                           static_cast<int>(i)) - 1);
            wsum += w[j];
        }
        for (std::size_t j = 0; j < live; ++j) {
            const Eigen::Index ii = static_cast<Eigen::Index>(i);
            const Eigen::Index jj = static_cast<Eigen::Index>(j);
            m.q(ii, jj) = (j == i) ? diag : (wsum > 0 ? rest * w[j] / wsum : 0.0);
        }
        m.q(static_cast<Eigen::Index>(i), n - 1) = pd1;
    }
    m.q(n - 1, n - 1) = 1.0;
    return m;
}

} // namespace

Eigen::MatrixXd default_pd_weights(const PDTable& targets) {
    const Eigen::Index nt = static_cast<Eigen::Index>(targets.tenors.size());
    const Eigen::Index nr = static_cast<Eigen::Index>(targets.ratings.size());
    Eigen::VectorXd w(nt);
    for (Eigen::Index t = 0; t < nt; ++t)
        w(t) = 1.0 / targets.tenors[static_cast<std::size_t>(t)];
    w /= w.sum();
    return w.replicate(1, nr);
}

double weighted_rms(const Eigen::MatrixXd& errors,
                    const Eigen::MatrixXd& weights) {
    const double num = (weights.array() * errors.array().square()).sum();
    const double den = weights.sum();
    return std::sqrt(num / den);
}

MatrixFitResult risk_neutralize_matrix(
    const PDTable& targets, const Eigen::MatrixXd& weights,
    const std::optional<TransitionMatrix>& seed_matrix,
    const MatrixFitOptions& options) {
    targets.validate();
    const Eigen::Index nt = static_cast<Eigen::Index>(targets.tenors.size());
    const Eigen::Index nr = static_cast<Eigen::Index>(targets.ratings.size());
    require(weights.rows() == nt && weights.cols() == nr,
            "weight matrix shape must match the PD table");
    require((weights.array() >= 0.0).all(), "weights must be non-negative");

    // Tenors are annual propagation steps.
    std::vector<std::size_t> steps;
    std::size_t max_step = 0;
    for (double t : targets.tenors) {
        const double r = std::round(t);
        require(std::abs(t - r) < 1e-9 && r >= 1.0,
                "PD table tenors must be whole years");
        steps.push_back(static_cast<std::size_t>(r));
        max_step = std::max(max_step, steps.back());
    }

    std::vector<std::string> ratings = targets.ratings;
    ratings.push_back("D");
    if (seed_matrix) {
        require(seed_matrix->ratings == ratings,
                "seed matrix ratings must match targets plus D");
    }

    const Eigen::Index live = nr;
    const Eigen::Index n_params = live * live;
    const Eigen::Index n_resid = nt * nr;

    Eigen::MatrixXd sqw = weights.array().sqrt();

    auto fitted_pds = [&](const Eigen::VectorXd& theta) {
        const TransitionMatrix m = matrix_from_params(theta, ratings);
        const PropagationResult prop = propagate_matrix(m, max_step);
        Eigen::MatrixXd pd(nt, nr);
        for (Eigen::Index t = 0; t < nt; ++t)
            for (Eigen::Index r = 0; r < nr; ++r)
                pd(t, r) = prop.pd(static_cast<std::size_t>(r),
                                   steps[static_cast<std::size_t>(t)]);
        return pd;
    };
    auto residuals = [&](const Eigen::VectorXd& theta) {
        const Eigen::MatrixXd err = fitted_pds(theta) - targets.pd;
        Eigen::VectorXd f(n_resid);
        for (Eigen::Index t = 0; t < nt; ++t)
            for (Eigen::Index r = 0; r < nr; ++r)
                f(t * nr + r) = sqw(t, r) * err(t, r);
        return f;
    };
    const double wsum = weights.sum();
    auto rms_of = [&](const Eigen::VectorXd& f) {
        return std::sqrt(f.squaredNorm() / wsum);
    };

    Eigen::VectorXd theta = params_from_matrix(
        seed_matrix ? *seed_matrix : initial_guess(targets));
    Eigen::VectorXd f = residuals(theta);
    double rms = rms_of(f);

    double lambda = options.lambda_init;
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        // Forward finite-difference Jacobian.
        Eigen::MatrixXd jac(n_resid, n_params);
        for (Eigen::Index k = 0; k < n_params; ++k) {
            Eigen::VectorXd tk = theta;
            tk(k) += options.fd_step;
            jac.col(k) = (residuals(tk) - f) / options.fd_step;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtf = jac.transpose() * f;

        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index k = 0; k < n_params; ++k)
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtf);
            const Eigen::VectorXd theta_new = theta + delta;
            const Eigen::VectorXd f_new = residuals(theta_new);
            const double rms_new = rms_of(f_new);
            if (rms_new < rms) {
                const double gain = rms - rms_new;
                theta = theta_new;
                f = f_new;
                rms = rms_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (gain < options.rms_tol) converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped) {
            converged = true; // no descent direction left at any damping
            break;
        }
        if (converged) break;
    }

    MatrixFitResult out;
    out.matrix = matrix_from_params(theta, ratings);
    out.matrix.validate(1e-9);
    out.diagnostics.converged = converged;
    out.diagnostics.iterations = iter;
    out.diagnostics.weighted_rms = rms;
    out.diagnostics.fitted.ratings = targets.ratings;
    out.diagnostics.fitted.tenors = targets.tenors;
    out.diagnostics.fitted.pd = fitted_pds(theta);
    out.diagnostics.residuals = out.diagnostics.fitted.pd - targets.pd;
    return out;
}

} // namespace cvax
