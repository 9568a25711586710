#ifndef CVAX_CREDIT_SCENARIOS_HPP
#define CVAX_CREDIT_SCENARIOS_HPP

#include "cvax/factor_model.hpp"
#include "cvax/market.hpp"
#include "cvax/thresholds.hpp"
#include "cvax/timegrid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cvax {

// Per-entity rating trajectories and default times on oversampled credit
// paths. Credit path c reuses the systematic draws of market path
// c / oversample with a fresh idiosyncratic stream per replicate, so every
// market path carries a credit distribution.
class CreditScenarioSet {
public:
    static constexpr std::int32_t kNoDefault = -1;

    const TimeGrid& grid() const { return grid_; }
    const std::vector<std::string>& entities() const { return entities_; }
    std::size_t n_market_paths() const { return n_market_paths_; }
    std::size_t oversample() const { return oversample_; }
    std::size_t n_credit_paths() const { return n_market_paths_ * oversample_; }
    std::size_t market_path_of(std::size_t credit_path) const {
        return credit_path / oversample_;
    }
    std::uint64_t seed() const { return seed_; }
    std::size_t default_state() const { return n_live_; }

    std::uint8_t rating(std::size_t entity, std::size_t time,
                        std::size_t credit_path) const {
        return ratings_[(entity * grid_.size() + time) * n_credit_paths() +
                        credit_path];
    }
    // Grid step index of default, or kNoDefault.
    std::int32_t default_step(std::size_t entity,
                              std::size_t credit_path) const {
        return default_step_[entity * n_credit_paths() + credit_path];
    }

    const Eigen::MatrixXd& credit_loadings() const { return credit_loadings_; }

    bool operator==(const CreditScenarioSet& other) const;

    friend CreditScenarioSet generate_credit_scenarios(
        const std::vector<CreditEntity>&, const std::vector<RatingThresholds>&,
        const FactorModel&, const MarketScenarioSet&, std::size_t,
        std::uint64_t);

private:
    TimeGrid grid_;
    std::vector<std::string> entities_;
    std::size_t n_market_paths_ = 0;
    std::size_t oversample_ = 1;
    std::size_t n_live_ = 0;
    std::uint64_t seed_ = 0;
    Eigen::MatrixXd credit_loadings_;
    Eigen::VectorXd credit_idio_;
    std::vector<std::uint8_t> ratings_;
    std::vector<std::int32_t> default_step_;
};

// Default is driven by each step's standardized innovation against the
// conditional hazard implied by the calibrated thresholds; survivor
// ratings are read from the cumulative standardized return against the
// rating boundaries. Deterministic in (seed, inputs).
CreditScenarioSet generate_credit_scenarios(
    const std::vector<CreditEntity>& entities,
    const std::vector<RatingThresholds>& thresholds,
    const FactorModel& factors, const MarketScenarioSet& market,
    std::size_t oversample, std::uint64_t seed);

// Recombine the stored systematic draws and the (regenerated, identical)
// idiosyncratic streams under new loadings: the wrong-way remap. Market
// scenarios untouched; remapping to the original loadings is bit-identical.
CreditScenarioSet remap_correlation(
    const CreditScenarioSet& credit, const std::vector<CreditEntity>& entities,
    const std::vector<RatingThresholds>& thresholds,
    const FactorModel& new_factors, const MarketScenarioSet& market);

// Rating at the grid step immediately preceding default on this path.
std::size_t rating_before_default(const CreditScenarioSet& credit,
                                  std::size_t entity, std::size_t credit_path);

} // namespace cvax

#endif
