#ifndef CVAX_ANALYTICS_HPP
#define CVAX_ANALYTICS_HPP

#include "cvax/cva.hpp"
#include "cvax/instruments.hpp"
#include "cvax/matrix_calibration.hpp"
#include "cvax/valuation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cvax {

// Everything needed to rebuild credit scenarios from scratch: entities,
// their factor loadings, the annual transition matrix driving the rating
// distribution targets, oversampling and the credit seed.
struct CreditModelInputs {
    std::vector<CreditEntity> entities; // order matches factors credit rows
    FactorModel factors;
    TransitionMatrix matrix;
    std::vector<std::string> live_ratings;
    std::size_t oversample = 1;
    std::uint64_t seed = 0;
};

std::vector<RatingThresholds> build_thresholds(const CreditModelInputs& inputs,
                                               const TimeGrid& grid);
CreditScenarioSet build_credit(const CreditModelInputs& inputs,
                               const MarketScenarioSet& market);

struct IncrementalResult {
    double base_total = 0.0;
    double new_total = 0.0;
    double incremental = 0.0; // new_total - base_total
};

// CVA(base + new deal) - CVA(base) on the identical scenario set: reuse
// kills resampling noise and makes sequential incrementals telescope to
// the combined-portfolio CVA exactly. Empty base means standalone CVA.
IncrementalResult incremental_cva(const std::vector<ValueCube>& base_cubes,
                                  const ValueCube& new_cube,
                                  const MarketScenarioSet& market,
                                  const CreditScenarioSet& credit,
                                  const NettingSet& set, double cpty_recovery,
                                  double own_recovery);

// PD curve with an extra flat spread on top: survival scaled by
// exp(-bump t / (1 - R)). Reduces to a plain spread bump for flat-hazard
// curves.
PDTermStructure bump_pd_curve(const PDTermStructure& curve, double bump);

// d CVA / d spread for one name: thresholds re-calibrated from the bumped
// curve, credit scenarios regenerated with the same seed, market cubes
// reused unchanged.
double cds_delta(const ValueCube& net_cube, const MarketScenarioSet& market,
                 const CreditModelInputs& inputs, const NettingSet& set,
                 const std::string& entity, double spread_bump,
                 double cpty_recovery, double own_recovery);

struct PortfolioDeals {
    std::vector<CashflowInstrument> linear;
    std::vector<BermudanSwaption> bermudan;
};

struct GreekResult {
    double base = 0.0;
    double bumped = 0.0;
    double diff = 0.0;     // bumped - base; exactly 0 for a zero bump
    double per_unit = 0.0; // diff / bump size
};

// Market sensitivity by full revaluation on bumped scenarios with the
// identical seeds, then the same aggregation.
GreekResult market_greek(const PortfolioDeals& deals,
                         const HullWhiteParams& params, const TimeGrid& grid,
                         std::size_t n_paths, std::uint64_t market_seed,
                         const MarketBump& bump,
                         const CreditModelInputs& inputs, const NettingSet& set,
                         double cpty_recovery, double own_recovery);

struct WrongWayPoint {
    double correlation = 0.0;
    bool skipped = false;   // factor model rejected (non-PSD combination)
    std::string diagnostic;
    CVAResult result;
    std::vector<double> marginal_default_rate; // per entity, at horizon
};

// CVA as a function of market-credit correlation: credit scenarios are
// remapped onto new loadings (market untouched, draws reused) and
// re-aggregated per sweep point.
std::vector<WrongWayPoint> wrong_way_sweep(
    const ValueCube& net_cube, const MarketScenarioSet& market,
    const CreditModelInputs& inputs, const NettingSet& set,
    const std::vector<double>& correlations,
    const std::function<FactorModel(double)>& factors_for, double cpty_recovery,
    double own_recovery);

struct BoundaryStudyConfig {
    double notional = 100.0;
    double swap_end = 10.0;
    std::vector<double> exercise_dates; // defaulted to annual 1..swap_end-1
    int fixed_periods_per_year = 1;
    int float_periods_per_year = 1;
    double coupon_lo = 0.0;
    double coupon_hi = 0.20;
    int bisection_iterations = 40;
    double recovery = 0.4;
};

struct BoundaryPoint {
    double default_rate = 0.0;    // flat annual default probability
    double boundary_coupon = 0.0; // first-date exercise becomes optimal here
    double cva_blind = 0.0;       // exercise decided ignoring credit
    double cva_aware = 0.0;       // exercise decided with credit discounting
};

// Receiver Bermudan exercise boundary vs counterparty default rate: the
// boundary is the fixed coupon at which the first exercise date fires on
// half the paths (bisection on common draws). Also reports the CVA under
// credit-blind and credit-aware exercise indicators per rate.
std::vector<BoundaryPoint> exercise_boundary_study(
    const MarketScenarioSet& market,
    const std::vector<double>& flat_default_rates,
    const BoundaryStudyConfig& config = {});

} // namespace cvax

#endif
