#include "cvax/credit_curve.hpp"
#include "cvax/distributions.hpp"
#include "cvax/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cvax {

void PDTermStructure::validate() const {
    require(tenors.size() == cumulative_pd.size(),
            "PD curve tenor/value mismatch");
    require(!tenors.empty(), "PD curve is empty");
    require(std::is_sorted(tenors.begin(), tenors.end()),
            "PD curve tenors must be ascending");
    require(recovery >= 0.0 && recovery < 1.0, "recovery must be in [0,1)");
    double prev = 0.0;
    for (double p : cumulative_pd) {
        require(p >= 0.0 && p < 1.0, "cumulative PD must be in [0,1)");
        require(p >= prev - 1e-15, "cumulative PD must be non-decreasing");
        prev = p;
    }
}

double PDTermStructure::pd(double t) const {
    if (t <= 0.0) return 0.0;
    if (t <= tenors.front())
        return cumulative_pd.front() * t / tenors.front();
    if (t >= tenors.back()) {
        // Flat-hazard extrapolation from the last pillar.
        const double s = cumulative_pd.back();
        if (s <= 0.0) return 0.0;
        const double h = -std::log(1.0 - s) / tenors.back();
        return 1.0 - std::exp(-h * t);
    }
    const auto it = std::upper_bound(tenors.begin(), tenors.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tenors.begin());
    const double w = (t - tenors[i - 1]) / (tenors[i] - tenors[i - 1]);
    return cumulative_pd[i - 1] + w * (cumulative_pd[i] - cumulative_pd[i - 1]);
}

PDTermStructure pd_from_flat_spread(const std::string& name, double spread,
                                    double recovery,
                                    const std::vector<double>& tenors) {
    require(recovery >= 0.0 && recovery < 1.0,
            "recovery must be in [0,1): hazard undefined at R=1");
    require(spread >= 0.0, "spread must be non-negative");
    PDTermStructure out;
    out.rating_or_name = name;
    out.tenors = tenors;
    out.recovery = recovery;
    const double hazard = spread / (1.0 - recovery);
    out.cumulative_pd.reserve(tenors.size());
    for (double t : tenors)
        out.cumulative_pd.push_back(-std::expm1(-hazard * t));
    out.validate();
    return out;
}

double spread_from_pd(double pd, double recovery, double t) {
    require(t > 0.0, "spread_from_pd needs t > 0");
    require(pd >= 0.0 && recovery >= 0.0 && recovery <= 1.0,
            "invalid pd/recovery");
    const double loss = (1.0 - recovery) * pd;
    require(loss < 1.0, "total expected loss: spread undefined");
    return -std::log1p(-loss) / t;
}

double risky_step_factor(const PDTermStructure& curve, double t0, double t1) {
    const double lgd = 1.0 - curve.recovery;
    const double v0 = 1.0 - lgd * curve.pd(t0);
    const double v1 = 1.0 - lgd * curve.pd(t1);
    require(v0 > 0.0 && v1 > 0.0, "total expected loss in risky discounting");
    return v1 / v0;
}

double mcnulty_levin_adjust(double historical_boundary, double risk_premium) {
    return normal_cdf(historical_boundary + risk_premium);
}

} // namespace cvax
