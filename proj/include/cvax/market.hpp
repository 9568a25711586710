#ifndef CVAX_MARKET_HPP
#define CVAX_MARKET_HPP

#include "cvax/factor_model.hpp"
#include "cvax/timegrid.hpp"
#include "cvax/zero_curve.hpp"

#include <cstdint>
#include <vector>

namespace cvax {

// One-factor mean-reverting Gaussian short rate fitted to the initial
// zero curve.
struct HullWhiteParams {
    double mean_reversion = 0.03;
    double volatility = 0.01;
    ZeroCurve curve = ZeroCurve::flat(0.02);

    void validate() const;
};

struct MarketBump {
    double curve_shift = 0.0; // parallel shift of zero rates
    double vol_shift = 0.0;

    bool is_zero() const { return curve_shift == 0.0 && vol_shift == 0.0; }
};

HullWhiteParams shift_market_params(const HullWhiteParams& params,
                                    const MarketBump& bump);

// Simulated risk-neutral market paths on a shared grid. The pathwise
// discount factor uses the exact joint law of the rate and its time
// integral, so E[discount(t)] reproduces the input curve without
// discretization bias. Systematic shocks are retained for credit
// correlation. Immutable once built.
class MarketScenarioSet {
public:
    MarketScenarioSet() = default;

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_systematic() const { return n_systematic_; }
    std::uint64_t seed() const { return seed_; }
    const HullWhiteParams& params() const { return params_; }

    double short_rate(std::size_t time, std::size_t path) const {
        return short_rate_[time * n_paths_ + path];
    }
    // Cumulative pathwise discount factor from t=0; discount(0, .) == 1.
    double discount(std::size_t time, std::size_t path) const {
        return discount_[time * n_paths_ + path];
    }
    // Standardized systematic shock driving the step ending at grid point
    // `time` (time >= 1).
    double systematic_draw(std::size_t time, std::size_t path,
                           std::size_t factor) const {
        return systematic_[((time - 1) * n_paths_ + path) * n_systematic_ +
                           factor];
    }

    const std::vector<double>& short_rates() const { return short_rate_; }
    const std::vector<double>& discounts() const { return discount_; }
    const std::vector<double>& systematic_draws() const { return systematic_; }

    friend MarketScenarioSet generate_market_scenarios(
        const HullWhiteParams&, const TimeGrid&, std::size_t, std::uint64_t,
        const FactorModel&);
    friend class ScenarioStore;

private:
    TimeGrid grid_;
    std::size_t n_paths_ = 0;
    std::size_t n_systematic_ = 0;
    std::uint64_t seed_ = 0;
    HullWhiteParams params_;
    std::vector<double> short_rate_;
    std::vector<double> discount_;
    std::vector<double> systematic_;
};

// Deterministic in (params, grid, n_paths, seed, factors): every array is
// bit-identical across runs and worker layouts. The market shock combines
// the factor model's market row with an idiosyncratic draw.
MarketScenarioSet generate_market_scenarios(const HullWhiteParams& params,
                                            const TimeGrid& grid,
                                            std::size_t n_paths,
                                            std::uint64_t seed,
                                            const FactorModel& factors);

} // namespace cvax

#endif
