#ifndef CVAX_FACTOR_MODEL_HPP
#define CVAX_FACTOR_MODEL_HPP

#include <Eigen/Dense>
#include <cstddef>

namespace cvax {

// Loadings of market risk factors and credit asset returns on a shared set
// of systematic shocks, plus a per-row idiosyncratic weight. Each row is
// unit variance: sum of squared loadings + idiosyncratic^2 = 1. Pairwise
// correlation between rows is the dot product of their systematic loadings.
struct FactorModel {
    Eigen::MatrixXd market_loadings;  // n_market x n_systematic
    Eigen::VectorXd market_idio;      // n_market
    Eigen::MatrixXd credit_loadings;  // n_entities x n_systematic
    Eigen::VectorXd credit_idio;      // n_entities

    std::size_t n_systematic() const {
        return static_cast<std::size_t>(market_loadings.cols());
    }
    std::size_t n_market() const {
        return static_cast<std::size_t>(market_loadings.rows());
    }
    std::size_t n_entities() const {
        return static_cast<std::size_t>(credit_loadings.rows());
    }

    // Implied correlation between market factor i and entity j.
    double market_credit_correlation(std::size_t i, std::size_t j) const {
        return market_loadings.row(static_cast<Eigen::Index>(i))
            .dot(credit_loadings.row(static_cast<Eigen::Index>(j)));
    }

    void validate() const; // unit variance rows, correlations in [-1,1]

    // Single market factor, single entity, given rate/asset correlation.
    static FactorModel single_market_single_entity(double rho);

    // n_entities entities all with the same loading rho on the one market
    // systematic factor; market loads fully on that factor.
    static FactorModel market_plus_entities(double rho, std::size_t n_entities);
};

// Decompose a joint (market..., credit...) correlation matrix into factor
// loadings. Cholesky columns used by a single row become that row's
// idiosyncratic weight; the rest are shared systematic factors.
// Rejects matrices with an eigenvalue below -psd_tol.
FactorModel loadings_from_correlation(const Eigen::MatrixXd& correlation,
                                      std::size_t n_market,
                                      double psd_tol = 1e-10);

} // namespace cvax

#endif
