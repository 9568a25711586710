#ifndef CVAX_THRESHOLDS_HPP
#define CVAX_THRESHOLDS_HPP

#include "cvax/credit_curve.hpp"
#include "cvax/distributions.hpp"
#include "cvax/timegrid.hpp"
#include "cvax/transition_matrix.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cvax {

// A credit entity: current rating, market PD curve, factor loadings row.
struct CreditEntity {
    std::string name;
    std::size_t current_rating = 0; // index into the live rating order
    PDTermStructure pd_curve;
    std::optional<double> fat_tail_df;

    ReturnDistribution return_distribution() const {
        return ReturnDistribution{fat_tail_df};
    }
};

// Calibrated rating boundaries on the standardized cumulative asset
// return, per grid time. Boundaries are quantiles of the target rating
// distribution: boundary(i, k) is the level below which the entity is at
// rating worse than k (k in live-rating order, best first); the lowest
// boundary is the default threshold H_d.
//
// First-passage discretization: default is not read off the cumulative
// return directly. Each step carries the conditional default probability
// implied by the cumulative targets, applied to that step's standardized
// innovation, so the simulated cumulative default frequency matches the
// market PD at every grid time. Ratings of survivors are read from the
// cumulative return against these boundaries.
struct RatingThresholds {
    std::string entity;
    std::vector<std::string> live_ratings;
    ReturnDistribution dist;
    // boundaries[i][k]: time index i (grid point), k = 0..n_live-1;
    // boundaries[i][n_live-1] is H_d. Strictly decreasing in k.
    std::vector<std::vector<double>> boundaries;
    // target cumulative PD per grid time (what H_d inverts).
    std::vector<double> target_pd;

    std::size_t n_live() const { return live_ratings.size(); }
    double default_threshold(std::size_t time) const {
        return boundaries[time].back();
    }
    // Conditional default probability of the step ending at grid point i.
    double step_hazard(std::size_t i) const {
        const double p0 = target_pd[i - 1];
        const double p1 = target_pd[i];
        return p0 < 1.0 ? std::max(0.0, (p1 - p0) / (1.0 - p0)) : 1.0;
    }
    // Rating bucket (live index) of a standardized cumulative return.
    std::size_t rating_of(std::size_t time, double standardized_return) const;
};

// Rating distribution targets per grid time: rows aligned to grid points,
// columns = live ratings then default, each row summing to 1.
using RatingDistributionByTime = std::vector<Eigen::VectorXd>;

// Build the per-time rating distribution for one starting rating from an
// annual-step matrix propagation, interpolating the cumulative default
// mass linearly in time between whole years.
RatingDistributionByTime rating_distribution_on_grid(
    const TransitionMatrix& matrix, std::size_t start_rating,
    const TimeGrid& grid);

// Calibrate boundaries so the default mass equals the entity's market PD
// exactly (single-name scaling of the propagated distribution) and the
// remaining live mass keeps the propagated proportions.
RatingThresholds calibrate_thresholds(const CreditEntity& entity,
                                      const RatingDistributionByTime& dist,
                                      const std::vector<std::string>& ratings,
                                      const TimeGrid& grid);

// Conversion of a normal-world threshold into a fat-tailed world
// with the same exceedance probability: H_FT = F^{-1}(N(H_N)).
double fat_tail_convert(double normal_threshold,
                        const std::function<double(double)>& fat_quantile);
double fat_tail_convert(double normal_threshold, const ReturnDistribution& f);

// Mean-reverting diffusion for a stochastic default threshold.
struct StochasticThresholdParams {
    double mean_level = 0.0;
    double reversion_speed = 0.0;
    double volatility = 0.0;

    void validate() const;
};

// Euler path of dH = k (a - H) dt + sigma dW per grid step; counter-based
// draws so regeneration with the same seed is bit-identical.
// Result laid out time-major: value(i, p) = out[i * n_paths + p].
std::vector<double> evolve_stochastic_threshold(
    const StochasticThresholdParams& params, double h0, const TimeGrid& grid,
    std::size_t n_paths, std::uint64_t seed);

} // namespace cvax

#endif
