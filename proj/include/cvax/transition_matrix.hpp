#ifndef CVAX_TRANSITION_MATRIX_HPP
#define CVAX_TRANSITION_MATRIX_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cvax {

// Annual rating migration matrix, row-stochastic, last state is the
// absorbing default state D.
struct TransitionMatrix {
    std::vector<std::string> ratings; // ordered best..worst, last is "D"
    Eigen::MatrixXd q;

    std::size_t n_ratings() const { return ratings.size(); }
    std::size_t n_live() const { return ratings.size() - 1; }

    void validate(double tol = 1e-12) const;

    static TransitionMatrix identity(std::vector<std::string> ratings);

    // Comma-separated, header row of rating labels (transition-table layout).
    static TransitionMatrix from_csv_text(const std::string& text);
    static TransitionMatrix from_file(const std::string& path);
    std::string to_csv_text() const;
};

// Rating distribution per propagation step and cumulative PD per starting
// rating: row i of `distribution[n]` is the unit vector at rating i times Q^n.
struct PropagationResult {
    std::vector<Eigen::MatrixXd> distribution; // [step] (n_live x n_ratings)

    // Cumulative PD of starting rating r after `step` annual steps.
    double pd(std::size_t rating, std::size_t step) const {
        const auto& d = distribution[step];
        return d(static_cast<Eigen::Index>(rating), d.cols() - 1);
    }
};

PropagationResult propagate_matrix(const TransitionMatrix& q,
                                   std::size_t horizon_steps);

// Rating-labelled PD table (rows = integer-year tenors, columns = ratings),
// the calibration target layout.
struct PDTable {
    std::vector<std::string> ratings; // non-default ratings
    std::vector<double> tenors;       // years
    Eigen::MatrixXd pd;               // n_tenors x n_ratings

    void validate() const;
    static PDTable from_csv_text(const std::string& text);
    static PDTable from_file(const std::string& path);
    std::string to_csv_text() const;
};

} // namespace cvax

#endif
