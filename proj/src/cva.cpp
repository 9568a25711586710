#include "cvax/cva.hpp"
#include "cvax/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cvax {

CSATerms CSATerms::none(std::size_t n_live_ratings) {
    CSATerms csa;
    csa.rating_thresholds.assign(n_live_ratings, kUncollateralized);
    return csa;
}

double CSATerms::threshold_for(std::size_t rating) const {
    if (rating_thresholds.empty()) return kUncollateralized;
    require(rating < rating_thresholds.size(),
            "no collateral threshold for rating index " +
                std::to_string(rating));
    return rating_thresholds[rating];
}

void CSATerms::validate() const {
    for (std::size_t k = 0; k < rating_thresholds.size(); ++k) {
        require(rating_thresholds[k] >= 0.0,
                "collateral thresholds must be non-negative");
        if (k > 0)
            require(rating_thresholds[k] <= rating_thresholds[k - 1],
                    "collateral thresholds must be non-increasing as the "
                    "rating worsens");
    }
    require(execution_barrier >= 0.0, "execution barrier must be non-negative");
}

void NettingSet::validate() const {
    require(!deal_ids.empty(), "netting set has no deals");
    csa.validate();
}

ValueCube net_values(const std::vector<ValueCube>& cubes) {
    require(!cubes.empty(), "nothing to net");
    ValueCube net = cubes.front();
    net.exercised.clear(); // netted values carry no exercise state
    for (std::size_t k = 1; k < cubes.size(); ++k) net += cubes[k];
    return net;
}

double exposure_at_default(double net_value, double threshold,
                           int default_flag) {
    require(threshold >= 0.0, "collateral threshold must be non-negative");
    return std::max(0.0, std::min(threshold, net_value * default_flag));
}

namespace {

void fill_profiles(CVAResult& result, const ValueCube& net,
                   const MarketScenarioSet& market) {
    const std::size_t n_times = net.grid.size();
    const std::size_t n_paths = net.n_paths;
    result.times = net.grid.times;
    result.ee_profile.assign(n_times, 0.0);
    result.ene_profile.assign(n_times, 0.0);
    for (std::size_t i = 0; i < n_times; ++i) {
        double ee = 0.0, ene = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double dv = market.discount(i, p) * net.value(i, p);
            ee += std::max(dv, 0.0);
            ene += std::max(-dv, 0.0);
        }
        result.ee_profile[i] = ee / static_cast<double>(n_paths);
        result.ene_profile[i] = ene / static_cast<double>(n_paths);
    }
}

double stderr_of(const std::vector<double>& per_path) {
    const double n = static_cast<double>(per_path.size());
    if (per_path.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : per_path) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : per_path) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    return std::sqrt(var / n);
}

} // namespace

CVAResult forward_cva(const ValueCube& net, const MarketScenarioSet& market,
                      const PDTermStructure& cpty_pd,
                      const PDTermStructure& own_pd) {
    require(net.grid.times == market.grid().times &&
                net.n_paths == market.n_paths(),
            "value cube and market scenario set mismatch");
    const std::size_t n_times = net.grid.size();
    const std::size_t n_paths = net.n_paths;
    const double lgd_c = 1.0 - cpty_pd.recovery;
    const double lgd_o = 1.0 - own_pd.recovery;

    std::vector<double> contrib(n_paths, 0.0);
    double cva = 0.0, dva = 0.0;
    for (std::size_t i = 1; i < n_times; ++i) {
        const double dpc = cpty_pd.pd(net.grid[i]) - cpty_pd.pd(net.grid[i - 1]);
        const double dpo = own_pd.pd(net.grid[i]) - own_pd.pd(net.grid[i - 1]);
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double dv = market.discount(i, p) * net.value(i, p);
            const double c = lgd_c * dpc * std::max(dv, 0.0);
            const double d = lgd_o * dpo * std::max(-dv, 0.0);
            contrib[p] += c - d;
            cva += c;
            dva += d;
        }
    }
    CVAResult out;
    out.cva = cva / static_cast<double>(n_paths);
    out.dva = dva / static_cast<double>(n_paths);
    out.total = out.cva - out.dva;
    out.mc_standard_error = stderr_of(contrib);
    fill_profiles(out, net, market);
    return out;
}

CVAResult backward_cva(const std::vector<ValueCube>& cubes,
                       const NettingSet& set, const MarketScenarioSet& market,
                       const std::vector<std::string>& live_ratings,
                       const RatingDistributionByTime& cpty_rating_dist,
                       const RatingDistributionByTime& own_rating_dist,
                       const RatingSpreadCurves& spreads, double cpty_recovery,
                       double own_recovery) {
    set.validate();
    const ValueCube net = net_values(cubes);
    require(net.grid.times == market.grid().times &&
                net.n_paths == market.n_paths(),
            "value cube and market scenario set mismatch");
    const std::size_t n_times = net.grid.size();
    const std::size_t n_paths = net.n_paths;
    const std::size_t n_live = live_ratings.size();
    require(cpty_rating_dist.size() == n_times &&
                own_rating_dist.size() == n_times,
            "rating distributions must cover every grid point");

    // Per-step risky survival factor per rating, from that rating's PD
    // curve and the given recovery.
    auto step_factors = [&](double recovery) {
        std::vector<std::vector<double>> rf(n_times,
                                            std::vector<double>(n_live, 1.0));
        for (std::size_t i = 1; i < n_times; ++i)
            for (std::size_t k = 0; k < n_live; ++k) {
                const auto it = spreads.find(live_ratings[k]);
                require(it != spreads.end(),
                        "missing spread curve for rating " + live_ratings[k]);
                PDTermStructure curve = it->second;
                curve.recovery = recovery;
                rf[i][k] = risky_step_factor(curve, net.grid[i - 1], net.grid[i]);
            }
        return rf;
    };
    const auto rf_cpty = step_factors(cpty_recovery);
    const auto rf_own = step_factors(own_recovery);

    // Live-rating mixture weights, conditional on survival.
    auto live_weights = [&](const RatingDistributionByTime& dist,
                            std::size_t i) {
        const Eigen::VectorXd& d = dist[i];
        require(static_cast<std::size_t>(d.size()) == n_live + 1,
                "rating distribution dimension mismatch");
        Eigen::VectorXd w = d.head(static_cast<Eigen::Index>(n_live));
        const double s = w.sum();
        require(s > 0.0, "no surviving rating mass");
        return Eigen::VectorXd(w / s);
    };

    // Recover the step net cashflows from the cube: V_i = CF_i + df V_{i+1}.
    // One backward risky induction per side; the risky part of the
    // continuation value is capped by the rating threshold, the excess
    // discounts risk-free.
    auto risky_pv = [&](bool cpty_risky, bool own_risky) {
        std::vector<double> vd(n_paths);
        for (std::size_t p = 0; p < n_paths; ++p)
            vd[p] = net.value(n_times - 1, p);
        for (std::size_t i = n_times - 1; i-- > 0;) {
            const Eigen::VectorXd wc = live_weights(cpty_rating_dist, i + 1);
            const Eigen::VectorXd wo = live_weights(own_rating_dist, i + 1);
            for (std::size_t p = 0; p < n_paths; ++p) {
                const double df =
                    market.discount(i + 1, p) / market.discount(i, p);
                const double cf = net.value(i, p) - df * net.value(i + 1, p);
                const double cont = vd[p];
                double adjusted = cont;
                const bool positive = cont >= 0.0;
                if ((positive && cpty_risky) || (!positive && own_risky)) {
                    const auto& rf = positive ? rf_cpty[i + 1] : rf_own[i + 1];
                    const Eigen::VectorXd& w = positive ? wc : wo;
                    const double mag = std::abs(cont);
                    double mix = 0.0;
                    for (std::size_t k = 0; k < n_live; ++k) {
                        const double capped =
                            std::min(mag, set.csa.threshold_for(k));
                        mix += w(static_cast<Eigen::Index>(k)) *
                               (capped * rf[k] + (mag - capped));
                    }
                    adjusted = positive ? mix : -mix;
                }
                vd[p] = cf + df * adjusted;
            }
        }
        return vd;
    };

    const auto vd_cpty = risky_pv(true, false);
    const auto vd_own = risky_pv(false, true);

    std::vector<double> contrib(n_paths);
    double cva = 0.0, dva = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const double vnd = net.value(0, p);
        const double c = vnd - vd_cpty[p];
        const double d = vd_own[p] - vnd;
        contrib[p] = c - d;
        cva += c;
        dva += d;
    }
    CVAResult out;
    out.cva = cva / static_cast<double>(n_paths);
    out.dva = dva / static_cast<double>(n_paths);
    out.total = out.cva - out.dva;
    out.mc_standard_error = stderr_of(contrib);
    fill_profiles(out, net, market);
    return out;
}

CVAResult aggregate_cva(const ValueCube& net, const MarketScenarioSet& market,
                        const CreditScenarioSet& credit, const NettingSet& set,
                        double cpty_recovery, double own_recovery) {
    set.validate();
    require(net.grid.times == market.grid().times &&
                net.n_paths == market.n_paths(),
            "value cube and market scenario set mismatch");
    require(credit.grid().times == net.grid.times,
            "credit scenario grid must cover all default observation times");
    require(credit.n_market_paths() == net.n_paths,
            "credit/market path count mismatch");

    auto entity_index = [&](const std::string& name) {
        for (std::size_t e = 0; e < credit.entities().size(); ++e)
            if (credit.entities()[e] == name) return e;
        throw InputError("credit scenario set does not cover entity " + name);
    };
    const std::size_t cpty = entity_index(set.counterparty);
    const std::size_t own = entity_index(set.self_entity);

    const std::size_t n_times = net.grid.size();
    const std::size_t n_credit = credit.n_credit_paths();
    const double lgd_c = 1.0 - cpty_recovery;
    const double lgd_o = 1.0 - own_recovery;

    std::vector<bool> is_put_date(n_times, false);
    for (double t : set.csa.mutual_put_dates)
        is_put_date[net.grid.index_of(t)] = true;

    std::vector<double> contrib(n_credit, 0.0);
    double cva = 0.0, dva = 0.0;
    for (std::size_t c = 0; c < n_credit; ++c) {
        const std::size_t m = credit.market_path_of(c);
        const std::int32_t dc = credit.default_step(cpty, c);
        const std::int32_t doo = credit.default_step(own, c);

        for (std::size_t i = 1; i < n_times; ++i) {
            // Termination events fire on the state entering the step, so a
            // trigger hit strictly before the default step ends the deal
            // without loss; execution only happens when it has value.
            const double v_in = net.value(i - 1, m);
            bool terminate = false;
            if (set.csa.ate_rating &&
                credit.rating(cpty, i - 1, c) >= *set.csa.ate_rating &&
                credit.rating(cpty, i - 1, c) !=
                    static_cast<std::uint8_t>(credit.default_state()))
                terminate = v_in > set.csa.execution_barrier;
            if (!terminate && is_put_date[i - 1])
                terminate = v_in > set.csa.execution_barrier;
            if (terminate) break;

            const bool cpty_defaults = dc == static_cast<std::int32_t>(i);
            const bool own_defaults = doo == static_cast<std::int32_t>(i);
            const double v = net.value(i, m);
            if (!cpty_defaults && !own_defaults) continue;

            // First default of either party; counterparty takes priority
            // on a same-step tie.
            const bool counterparty_first = cpty_defaults;
            const std::size_t party = counterparty_first ? cpty : own;
            const int flag = counterparty_first ? 1 : -1;
            const std::size_t pre_rating = rating_before_default(credit, party, c);
            const double threshold = set.csa.threshold_for(pre_rating);
            const double exposure = exposure_at_default(v, threshold, flag);
            const double amount = market.discount(i, m) * exposure *
                                  (counterparty_first ? lgd_c : lgd_o);
            if (counterparty_first) {
                cva += amount;
                contrib[c] += amount;
            } else {
                dva += amount;
                contrib[c] -= amount;
            }
            break;
        }
    }

    CVAResult out;
    out.cva = cva / static_cast<double>(n_credit);
    out.dva = dva / static_cast<double>(n_credit);
    out.total = out.cva - out.dva;
    out.mc_standard_error = stderr_of(contrib);
    fill_profiles(out, net, market);
    return out;
}

} // namespace cvax
