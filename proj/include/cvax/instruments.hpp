#ifndef CVAX_INSTRUMENTS_HPP
#define CVAX_INSTRUMENTS_HPP

#include <string>
#include <vector>

namespace cvax {

struct FixedFlow {
    double pay_time;
    double amount; // signed, positive = received
};

// Floating coupon: notional * (compounded short rate over the accrual
// period + spread * accrual), paid at accrual_end. Signed via notional.
struct FloatingFlow {
    double accrual_start;
    double accrual_end;
    double notional;
    double spread = 0.0;
};

// Linear instrument: a bag of fixed and floating cashflows. Swaps,
// collapsed portfolios and exercised swaption underlyings all reduce
// to this.
struct CashflowInstrument {
    std::string id;
    std::vector<FixedFlow> fixed;
    std::vector<FloatingFlow> floating;

    bool empty() const { return fixed.empty() && floating.empty(); }
    double last_pay_time() const;
    // All cashflow-relevant dates (pay and accrual endpoints) for grid
    // construction.
    std::vector<double> event_dates() const;

    // Sort flows and merge same-date fixed amounts (1e-9 tolerance).
    void normalize();
};

// Vanilla fixed/float swap. pay_fixed: we pay the fixed leg and receive
// floating. Periods per year given per leg.
CashflowInstrument make_vanilla_swap(const std::string& id, double notional,
                                     double fixed_rate, double start,
                                     double end, int fixed_periods_per_year,
                                     int float_periods_per_year,
                                     bool pay_fixed);

// Collapse many linear deals into one cashflow instrument. Fixed flows on
// identical dates are summed; floating spreads are folded into equivalent
// fixed amounts and floating notionals netted per accrual period. Pathwise
// value equals the sum of the parts.
CashflowInstrument collapse_cashflows(
    const std::vector<CashflowInstrument>& deals);

struct BermudanSwaption {
    std::string id;
    std::vector<double> exercise_dates;
    CashflowInstrument underlying; // swap entered on exercise
    int basis_degree = 2;
    bool asset_regressor = false; // include structural asset state

    void validate() const;
};

} // namespace cvax

#endif
