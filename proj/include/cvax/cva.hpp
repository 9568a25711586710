#ifndef CVAX_CVA_HPP
#define CVAX_CVA_HPP

#include "cvax/credit_curve.hpp"
#include "cvax/credit_scenarios.hpp"
#include "cvax/cube.hpp"
#include "cvax/market.hpp"
#include "cvax/thresholds.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvax {

// CSA terms of one netting set. Collateral thresholds are per live rating
// of the defaulting party (monetary, +infinity = uncollateralized),
// non-increasing as rating worsens.
struct CSATerms {
    std::vector<double> rating_thresholds; // per live rating, best first
    std::optional<std::size_t> ate_rating; // trigger at/below this rating
    std::vector<double> mutual_put_dates;
    double execution_barrier = 0.0; // ATE/MP not exercised below this value

    static constexpr double kUncollateralized =
        std::numeric_limits<double>::infinity();

    // Uncapped CSA (no thresholds, no ATE, no puts).
    static CSATerms none(std::size_t n_live_ratings);

    double threshold_for(std::size_t rating) const;
    void validate() const;
};

struct NettingSet {
    std::string id;
    std::string counterparty; // credit entity names
    std::string self_entity;
    std::vector<std::string> deal_ids;
    CSATerms csa;

    void validate() const;
};

struct CVAResult {
    double cva = 0.0; // counterparty leg, >= 0
    double dva = 0.0; // own leg, >= 0
    double total = 0.0; // cva - dva
    double mc_standard_error = 0.0;
    std::vector<double> times;
    std::vector<double> ee_profile;  // discounted expected positive exposure
    std::vector<double> ene_profile; // discounted expected negative exposure
};

// Element-wise sum of the deal cubes in a netting set.
ValueCube net_values(const std::vector<ValueCube>& cubes);

// Defaulted exposure: max(0, min(H, net_value * default_flag)),
// default_flag +1 when the counterparty defaults, -1 for own default.
double exposure_at_default(double net_value, double threshold,
                           int default_flag);

// Forward framework: expected exposures times PD increments, credit
// independent of market. PD increments land on the right endpoint of each
// grid interval, where the exposure is observed.
CVAResult forward_cva(const ValueCube& net_cube, const MarketScenarioSet& market,
                      const PDTermStructure& cpty_pd,
                      const PDTermStructure& own_pd);

// Rating-mixture risky discounting for the backward framework: rating
// label -> that rating's PD curve (with recovery), used to build per-step
// risky factors.
using RatingSpreadCurves = std::map<std::string, PDTermStructure>;

// Backward framework: one risk-free and one risky backward induction per
// path; CVA is the difference. Positive values discount with the
// counterparty's rating mixture, negative with one's own. Thresholds split
// each value into a risky part min(V, Thr_k) and a risk-free remainder.
CVAResult backward_cva(const std::vector<ValueCube>& cubes,
                       const NettingSet& set, const MarketScenarioSet& market,
                       const std::vector<std::string>& live_ratings,
                       const RatingDistributionByTime& cpty_rating_dist,
                       const RatingDistributionByTime& own_rating_dist,
                       const RatingSpreadCurves& spreads,
                       double cpty_recovery, double own_recovery);

// Defaulted-exposure aggregation framework (market cube x credit
// scenarios). ATEs and mutual puts terminate paths first, subject to the
// execution barrier; at the first default of either party the netted value
// is read from the cube, capped by the threshold at the pre-default
// rating, discounted along the path and weighted by (1-R).
CVAResult aggregate_cva(const ValueCube& net_cube,
                        const MarketScenarioSet& market,
                        const CreditScenarioSet& credit, const NettingSet& set,
                        double cpty_recovery, double own_recovery);

} // namespace cvax

#endif
