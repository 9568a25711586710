#include "cvax/thresholds.hpp"
#include "cvax/errors.hpp"
#include "cvax/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cvax {

namespace {
// Keep quantile arguments strictly inside (0,1); exact zero/one masses
// would put a boundary at infinity.
double clamp_prob(double p) { return std::clamp(p, 1e-15, 1.0 - 1e-15); }
} // namespace

std::size_t RatingThresholds::rating_of(std::size_t time,
                                        double standardized_return) const {
    const auto& b = boundaries[time];
    for (std::size_t k = 0; k < b.size(); ++k)
        if (standardized_return >= b[k]) return k;
    return b.size() - 1; // below H_d but surviving: clamp to worst live
}

RatingDistributionByTime rating_distribution_on_grid(
    const TransitionMatrix& matrix, std::size_t start_rating,
    const TimeGrid& grid) {
    require(start_rating + 1 < matrix.n_ratings(),
            "starting rating must be a live rating");
    const std::size_t years =
        static_cast<std::size_t>(std::ceil(grid.horizon() - 1e-12));
    const PropagationResult prop = propagate_matrix(matrix, std::max<std::size_t>(years, 1));
    const Eigen::Index r = static_cast<Eigen::Index>(start_rating);

    RatingDistributionByTime out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const std::size_t lo = static_cast<std::size_t>(std::floor(t + 1e-12));
        const std::size_t hi = std::min(lo + 1, prop.distribution.size() - 1);
        const double w = (t - static_cast<double>(lo));
        Eigen::VectorXd d =
            (1.0 - w) * prop.distribution[std::min(lo, prop.distribution.size() - 1)]
                            .row(r)
                            .transpose() +
            (lo == hi ? 0.0 : w) * prop.distribution[hi].row(r).transpose();
        out.push_back(d / d.sum());
    }
    return out;
}

RatingThresholds calibrate_thresholds(const CreditEntity& entity,
                                      const RatingDistributionByTime& dist,
                                      const std::vector<std::string>& ratings,
                                      const TimeGrid& grid) {
    require(dist.size() == grid.size(),
            "rating distribution must cover every grid point");
    require(!ratings.empty(), "need at least one live rating");
    const std::size_t n_live = ratings.size();

    RatingThresholds th;
    th.entity = entity.name;
    th.live_ratings = ratings;
    th.dist = entity.return_distribution();
    th.boundaries.resize(grid.size());
    th.target_pd.resize(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd& pi = dist[i];
        require(static_cast<std::size_t>(pi.size()) == n_live + 1,
                "rating distribution dimension mismatch");
        require((pi.array() >= -1e-12).all() &&
                    std::abs(pi.sum() - 1.0) < 1e-9,
                "rating distribution must be a probability vector");

        const double market_pd = entity.pd_curve.pd(grid[i]);
        require(market_pd < 1.0 - 1e-12, "market PD too close to 1");
        th.target_pd[i] = market_pd;

        // Single-name adjustment: default mass pinned to the market PD,
        // live masses rescaled proportionally.
        const double prop_live = 1.0 - pi(pi.size() - 1);
        const double scale =
            prop_live > 0.0 ? (1.0 - market_pd) / prop_live : 0.0;

        th.boundaries[i].resize(n_live);
        double cum = market_pd; // mass strictly below the boundary
        for (std::size_t k = n_live; k-- > 0;) {
            th.boundaries[i][k] = th.dist.quantile(clamp_prob(cum));
            cum += scale * pi(static_cast<Eigen::Index>(k));
        }
        for (std::size_t k = 1; k < n_live; ++k)
            require(th.boundaries[i][k - 1] >= th.boundaries[i][k],
                    "rating boundaries must be decreasing");
    }
    return th;
}

double fat_tail_convert(double normal_threshold,
                        const std::function<double(double)>& fat_quantile) {
    return fat_quantile(normal_cdf(normal_threshold));
}

double fat_tail_convert(double normal_threshold, const ReturnDistribution& f) {
    return f.quantile(normal_cdf(normal_threshold));
}

void StochasticThresholdParams::validate() const {
    require(reversion_speed >= 0.0, "reversion speed must be non-negative");
    require(volatility >= 0.0, "threshold volatility must be non-negative");
}

std::vector<double> evolve_stochastic_threshold(
    const StochasticThresholdParams& params, double h0, const TimeGrid& grid,
    std::size_t n_paths, std::uint64_t seed) {
    params.validate();
    std::vector<double> out(grid.size() * n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) out[p] = h0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid.dt(i - 1);
        const double sqdt = std::sqrt(dt);
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double h = out[(i - 1) * n_paths + p];
            const double z = params.volatility > 0.0
                                 ? normal_draw(seed, DrawStream::Threshold, i, p)
                                 : 0.0;
            out[i * n_paths + p] =
                h + params.reversion_speed * (params.mean_level - h) * dt +
                params.volatility * sqdt * z;
        }
    }
    return out;
}

} // namespace cvax
