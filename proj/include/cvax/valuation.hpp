#ifndef CVAX_VALUATION_HPP
#define CVAX_VALUATION_HPP

#include "cvax/credit_curve.hpp"
#include "cvax/cube.hpp"
#include "cvax/instruments.hpp"
#include "cvax/market.hpp"

#include <optional>

namespace cvax {

// Pathwise value of a linear instrument at every grid point: future flows
// (floating legs compounded from the path's realized short rate) discounted
// along the path. V(t) includes the flow paid at t itself.
ValueCube value_cashflow_instrument(const CashflowInstrument& instr,
                                    const MarketScenarioSet& market);

struct LongstaffSchwartzConfig {
    int degree = 2;
    bool asset_regressor = false;
    // When set, exercise decisions compare credit-discounted continuation
    // and exercise values (the exercise-boundary study); default off: the
    // decision ignores credit.
    std::optional<PDTermStructure> exercise_credit;
    // Asset state per (time, path), required when asset_regressor is on.
    const std::vector<double>* asset_state = nullptr;
};

struct LongstaffSchwartzDiagnostics {
    int degree_used = 0;
    bool degraded = false; // regression fell back to a lower degree
    double value_estimate = 0.0;
};

// Least-squares Monte Carlo backward induction. Post-exercise cube values
// are the remaining underlying swap flows (physical settlement);
// pre-exercise values are per-date regression estimates of the
// continuation value, floored at zero.
ValueCube value_bermudan_swaption(const BermudanSwaption& instr,
                                  const MarketScenarioSet& market,
                                  const LongstaffSchwartzConfig& config = {},
                                  LongstaffSchwartzDiagnostics* diag = nullptr);

} // namespace cvax

#endif
