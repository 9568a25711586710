#include "cvax/factor_model.hpp"
#include "cvax/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cvax {

void FactorModel::validate() const {
    require(market_loadings.cols() == credit_loadings.cols() ||
                credit_loadings.rows() == 0 || market_loadings.rows() == 0,
            "factor model: systematic factor count mismatch");
    auto check_rows = [](const Eigen::MatrixXd& load, const Eigen::VectorXd& idio,
                         const char* what) {
        require(load.rows() == idio.size(), "factor model: idio size mismatch");
        for (Eigen::Index r = 0; r < load.rows(); ++r) {
            const double var = load.row(r).squaredNorm() + idio(r) * idio(r);
            require(std::abs(var - 1.0) < 1e-8,
                    std::string("factor model: ") + what + " row " +
                        std::to_string(r) + " not unit variance");
        }
    };
    check_rows(market_loadings, market_idio, "market");
    check_rows(credit_loadings, credit_idio, "credit");
    for (Eigen::Index i = 0; i < market_loadings.rows(); ++i)
        for (Eigen::Index j = 0; j < credit_loadings.rows(); ++j) {
            const double rho = market_loadings.row(i).dot(credit_loadings.row(j));
            require(rho >= -1.0 - 1e-12 && rho <= 1.0 + 1e-12,
                    "factor model: implied correlation outside [-1,1]");
        }
}

FactorModel FactorModel::single_market_single_entity(double rho) {
    return market_plus_entities(rho, 1);
}

FactorModel FactorModel::market_plus_entities(double rho, std::size_t n) {
    require(rho >= -1.0 && rho <= 1.0, "correlation outside [-1,1]");
    FactorModel fm;
    fm.market_loadings = Eigen::MatrixXd::Ones(1, 1);
    fm.market_idio = Eigen::VectorXd::Zero(1);
    fm.credit_loadings = Eigen::MatrixXd::Constant(
        static_cast<Eigen::Index>(n), 1, rho);
    fm.credit_idio = Eigen::VectorXd::Constant(
        static_cast<Eigen::Index>(n), std::sqrt(1.0 - rho * rho));
    fm.validate();
    return fm;
}

FactorModel loadings_from_correlation(const Eigen::MatrixXd& correlation,
                                      std::size_t n_market, double psd_tol) {
    const Eigen::Index n = correlation.rows();
    require(correlation.cols() == n, "correlation matrix must be square");
    require(static_cast<Eigen::Index>(n_market) <= n,
            "n_market exceeds correlation dimension");
    for (Eigen::Index i = 0; i < n; ++i) {
        require(std::abs(correlation(i, i) - 1.0) < 1e-12,
                "correlation matrix must have unit diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            require(std::abs(correlation(i, j) - correlation(j, i)) < 1e-12,
                    "correlation matrix must be symmetric");
    }

    // Cholesky when positive definite; eigenvalue-clamped square root for
    // the semi-definite boundary.
    Eigen::MatrixXd root;
    Eigen::LLT<Eigen::MatrixXd> llt(correlation);
    if (llt.info() == Eigen::Success) {
        root = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(correlation);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -psd_tol)
            throw NumericalError(
                "correlation matrix not PSD: most negative eigenvalue " +
                std::to_string(min_eig));
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        root = es.eigenvectors() * lam.asDiagonal();
    }

    // Columns touched by a single row are that row's idiosyncratic shock.
    Eigen::VectorXd idio = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> shared_cols;
    for (Eigen::Index s = 0; s < root.cols(); ++s) {
        Eigen::Index user = -1;
        int users = 0;
        for (Eigen::Index r = 0; r < n; ++r)
            if (std::abs(root(r, s)) > 1e-14) {
                ++users;
                user = r;
            }
        if (users == 1) {
            idio(user) = std::sqrt(idio(user) * idio(user) +
                                   root(user, s) * root(user, s));
        } else if (users > 1) {
            shared_cols.push_back(s);
        }
    }

    Eigen::MatrixXd sys(n, static_cast<Eigen::Index>(shared_cols.size()));
    for (std::size_t k = 0; k < shared_cols.size(); ++k)
        sys.col(static_cast<Eigen::Index>(k)) = root.col(shared_cols[k]);

    FactorModel fm;
    const Eigen::Index m = static_cast<Eigen::Index>(n_market);
    fm.market_loadings = sys.topRows(m);
    fm.market_idio = idio.head(m);
    fm.credit_loadings = sys.bottomRows(n - m);
    fm.credit_idio = idio.tail(n - m);
    fm.validate();
    return fm;
}

} // namespace cvax
