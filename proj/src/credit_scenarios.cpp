#include "cvax/credit_scenarios.hpp"
#include "cvax/errors.hpp"
#include "cvax/rng.hpp"

#include <cmath>

namespace cvax {

bool CreditScenarioSet::operator==(const CreditScenarioSet& other) const {
    return grid_.times == other.grid_.times && entities_ == other.entities_ &&
           n_market_paths_ == other.n_market_paths_ &&
           oversample_ == other.oversample_ && seed_ == other.seed_ &&
           ratings_ == other.ratings_ && default_step_ == other.default_step_;
}

CreditScenarioSet generate_credit_scenarios(
    const std::vector<CreditEntity>& entities,
    const std::vector<RatingThresholds>& thresholds,
    const FactorModel& factors, const MarketScenarioSet& market,
    std::size_t oversample, std::uint64_t seed) {
    require(!entities.empty(), "no credit entities");
    require(thresholds.size() == entities.size(),
            "one calibrated threshold set per entity required");
    require(factors.n_entities() == entities.size(),
            "entity missing loadings in factor model");
    require(factors.n_systematic() == market.n_systematic(),
            "factor model and market scenario set disagree on systematic "
            "factor count");
    require(oversample >= 1, "oversample must be at least 1");

    const TimeGrid& grid = market.grid();
    const std::size_t n_times = grid.size();
    const std::size_t n_credit = market.n_paths() * oversample;
    const std::size_t n_sys = factors.n_systematic();

    CreditScenarioSet set;
    set.grid_ = grid;
    set.n_market_paths_ = market.n_paths();
    set.oversample_ = oversample;
    set.seed_ = seed;
    set.credit_loadings_ = factors.credit_loadings;
    set.credit_idio_ = factors.credit_idio;
    set.n_live_ = thresholds.front().n_live();
    set.entities_.reserve(entities.size());
    for (const auto& e : entities) set.entities_.push_back(e.name);
    set.ratings_.assign(entities.size() * n_times * n_credit, 0);
    set.default_step_.assign(entities.size() * n_credit,
                             CreditScenarioSet::kNoDefault);

    for (std::size_t e = 0; e < entities.size(); ++e) {
        const RatingThresholds& th = thresholds[e];
        require(th.boundaries.size() == n_times,
                "thresholds not calibrated on this grid");
        require(entities[e].current_rating < th.n_live(),
                "current rating must be a live rating");
        const Eigen::RowVectorXd load =
            factors.credit_loadings.row(static_cast<Eigen::Index>(e));
        const double idio = factors.credit_idio(static_cast<Eigen::Index>(e));
        const std::uint8_t def_state = static_cast<std::uint8_t>(th.n_live());

        // Per-step hazard quantiles, shared across paths.
        std::vector<double> hazard_q(n_times, 0.0);
        std::vector<bool> can_default(n_times, false);
        for (std::size_t i = 1; i < n_times; ++i) {
            const double p = th.step_hazard(i);
            if (p > 0.0) {
                can_default[i] = true;
                hazard_q[i] = normal_quantile(std::min(p, 1.0 - 1e-15));
            }
        }

        for (std::size_t c = 0; c < n_credit; ++c) {
            const std::size_t m = c / oversample;
            double cum = 0.0;
            bool defaulted = false;
            set.ratings_[(e * n_times + 0) * n_credit + c] =
                static_cast<std::uint8_t>(entities[e].current_rating);
            for (std::size_t i = 1; i < n_times; ++i) {
                double xi = 0.0;
                for (std::size_t s = 0; s < n_sys; ++s)
                    xi += load(static_cast<Eigen::Index>(s)) *
                          market.systematic_draw(i, m, s);
                if (idio != 0.0)
                    xi += idio * normal_draw(seed,
                                             DrawStream::CreditIdiosyncratic,
                                             pack32(i, e), c);
                std::uint8_t r;
                if (defaulted) {
                    r = def_state;
                } else if (can_default[i] && xi < hazard_q[i]) {
                    defaulted = true;
                    set.default_step_[e * n_credit + c] =
                        static_cast<std::int32_t>(i);
                    r = def_state;
                } else {
                    cum += std::sqrt(grid.dt(i - 1)) * xi;
                    double u = cum / std::sqrt(grid[i]);
                    // Boundaries live in the entity's return distribution;
                    // map the normal cumulative return into it (identity
                    // for normal entities).
                    if (th.dist.fat_tail_df)
                        u = fat_tail_convert(u, th.dist);
                    r = static_cast<std::uint8_t>(th.rating_of(i, u));
                }
                set.ratings_[(e * n_times + i) * n_credit + c] = r;
            }
        }
    }
    return set;
}

CreditScenarioSet remap_correlation(
    const CreditScenarioSet& credit, const std::vector<CreditEntity>& entities,
    const std::vector<RatingThresholds>& thresholds,
    const FactorModel& new_factors, const MarketScenarioSet& market) {
    require(credit.grid().times == market.grid().times,
            "credit/market grid mismatch in correlation remap");
    require(credit.n_market_paths() == market.n_paths(),
            "credit/market path count mismatch in correlation remap");
    require(new_factors.n_entities() == credit.entities().size(),
            "remap factor model entity count mismatch");
    return generate_credit_scenarios(entities, thresholds, new_factors, market,
                                     credit.oversample(), credit.seed());
}

std::size_t rating_before_default(const CreditScenarioSet& credit,
                                  std::size_t entity,
                                  std::size_t credit_path) {
    const std::int32_t d = credit.default_step(entity, credit_path);
    require(d != CreditScenarioSet::kNoDefault,
            "path never defaults: no pre-default rating");
    return credit.rating(entity, static_cast<std::size_t>(d) - 1, credit_path);
}

} // namespace cvax
