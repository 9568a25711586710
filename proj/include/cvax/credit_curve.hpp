#ifndef CVAX_CREDIT_CURVE_HPP
#define CVAX_CREDIT_CURVE_HPP

#include <string>
#include <vector>

namespace cvax {

// Cumulative default probability term structure for a rating or a single
// name, with its recovery assumption.
struct PDTermStructure {
    std::string rating_or_name;
    std::vector<double> tenors;
    std::vector<double> cumulative_pd;
    double recovery = 0.4;

    void validate() const;

    // Piecewise-linear in cumulative PD, flat before the first tenor
    // scaled from zero, flat hazard extrapolation beyond the last.
    double pd(double t) const;
};

// Credit-triangle flat-hazard curve: PD(t) = 1 - exp(-spread t / (1 - R)).
PDTermStructure pd_from_flat_spread(const std::string& name, double spread,
                                    double recovery,
                                    const std::vector<double>& tenors);

// Discount spread sp with e^{-(r+sp)t} = e^{-rt} [1 - (1-R) P_d]:
// sp = -ln(1 - (1-R) pd) / t.
double spread_from_pd(double pd, double recovery, double t);

// Risky step factor over (t0, t1] for a party whose cumulative PD curve is
// `pd`: survival-value ratio [1-(1-R)PD(t1)] / [1-(1-R)PD(t0)]. Compounds
// to exactly 1-(1-R)PD(T) from 0 to T.
double risky_step_factor(const PDTermStructure& pd, double t0, double t1);

// Historical-to-risk-neutral probability with a CAPM risk premium:
// N(b + rho theta) for a standardized historical boundary b.
double mcnulty_levin_adjust(double historical_boundary, double risk_premium);

} // namespace cvax

#endif
