#include "cvax/analytics.hpp"
#include "cvax/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cvax {

std::vector<RatingThresholds> build_thresholds(const CreditModelInputs& inputs,
                                               const TimeGrid& grid) {
    std::vector<RatingThresholds> out;
    out.reserve(inputs.entities.size());
    for (const auto& entity : inputs.entities) {
        const RatingDistributionByTime dist = rating_distribution_on_grid(
            inputs.matrix, entity.current_rating, grid);
        out.push_back(
            calibrate_thresholds(entity, dist, inputs.live_ratings, grid));
    }
    return out;
}

CreditScenarioSet build_credit(const CreditModelInputs& inputs,
                               const MarketScenarioSet& market) {
    const auto thresholds = build_thresholds(inputs, market.grid());
    return generate_credit_scenarios(inputs.entities, thresholds,
                                     inputs.factors, market, inputs.oversample,
                                     inputs.seed);
}

namespace {

void check_provenance(const ValueCube& cube, const MarketScenarioSet& market) {
    require(cube.scenario_seed == market.seed() &&
                cube.grid.times == market.grid().times &&
                cube.n_paths == market.n_paths(),
            "cube " + cube.id + " was not built on this scenario set");
}

} // namespace

IncrementalResult incremental_cva(const std::vector<ValueCube>& base_cubes,
                                  const ValueCube& new_cube,
                                  const MarketScenarioSet& market,
                                  const CreditScenarioSet& credit,
                                  const NettingSet& set, double cpty_recovery,
                                  double own_recovery) {
    for (const auto& c : base_cubes) check_provenance(c, market);
    check_provenance(new_cube, market);

    IncrementalResult r;
    if (!base_cubes.empty())
        r.base_total = aggregate_cva(net_values(base_cubes), market, credit,
                                     set, cpty_recovery, own_recovery)
                           .total;
    std::vector<ValueCube> all = base_cubes;
    all.push_back(new_cube);
    r.new_total = aggregate_cva(net_values(all), market, credit, set,
                                cpty_recovery, own_recovery)
                      .total;
    r.incremental = r.new_total - r.base_total;
    return r;
}

PDTermStructure bump_pd_curve(const PDTermStructure& curve, double bump) {
    PDTermStructure out = curve;
    const double lgd = 1.0 - curve.recovery;
    require(lgd > 0.0, "recovery of 1 leaves no spread to bump");
    for (std::size_t i = 0; i < out.tenors.size(); ++i) {
        const double survival = (1.0 - out.cumulative_pd[i]) *
                                std::exp(-bump * out.tenors[i] / lgd);
        out.cumulative_pd[i] = std::clamp(1.0 - survival, 0.0, 1.0);
    }
    return out;
}

double cds_delta(const ValueCube& net_cube, const MarketScenarioSet& market,
                 const CreditModelInputs& inputs, const NettingSet& set,
                 const std::string& entity, double spread_bump,
                 double cpty_recovery, double own_recovery) {
    require(spread_bump != 0.0, "spread bump must be non-zero");
    CreditModelInputs bumped = inputs;
    bool found = false;
    for (auto& e : bumped.entities)
        if (e.name == entity) {
            e.pd_curve = bump_pd_curve(e.pd_curve, spread_bump);
            found = true;
        }
    require(found, "unknown entity " + entity);

    const double base = aggregate_cva(net_cube, market,
                                      build_credit(inputs, market), set,
                                      cpty_recovery, own_recovery)
                            .total;
    const double shifted = aggregate_cva(net_cube, market,
                                         build_credit(bumped, market), set,
                                         cpty_recovery, own_recovery)
                               .total;
    return (shifted - base) / spread_bump;
}

namespace {

double portfolio_cva(const PortfolioDeals& deals,
                     const HullWhiteParams& params, const TimeGrid& grid,
                     std::size_t n_paths, std::uint64_t market_seed,
                     const CreditModelInputs& inputs, const NettingSet& set,
                     double cpty_recovery, double own_recovery) {
    const MarketScenarioSet market = generate_market_scenarios(
        params, grid, n_paths, market_seed, inputs.factors);
    std::vector<ValueCube> cubes;
    for (const auto& d : deals.linear)
        cubes.push_back(value_cashflow_instrument(d, market));
    for (const auto& d : deals.bermudan)
        cubes.push_back(value_bermudan_swaption(d, market));
    const CreditScenarioSet credit = build_credit(inputs, market);
    return aggregate_cva(net_values(cubes), market, credit, set, cpty_recovery,
                         own_recovery)
        .total;
}

} // namespace

GreekResult market_greek(const PortfolioDeals& deals,
                         const HullWhiteParams& params, const TimeGrid& grid,
                         std::size_t n_paths, std::uint64_t market_seed,
                         const MarketBump& bump,
                         const CreditModelInputs& inputs, const NettingSet& set,
                         double cpty_recovery, double own_recovery) {
    GreekResult g;
    g.base = portfolio_cva(deals, params, grid, n_paths, market_seed, inputs,
                           set, cpty_recovery, own_recovery);
    g.bumped = bump.is_zero()
                   ? g.base
                   : portfolio_cva(deals, shift_market_params(params, bump),
                                   grid, n_paths, market_seed, inputs, set,
                                   cpty_recovery, own_recovery);
    g.diff = g.bumped - g.base;
    const double size =
        bump.curve_shift != 0.0 ? bump.curve_shift : bump.vol_shift;
    g.per_unit = size != 0.0 ? g.diff / size : 0.0;
    return g;
}

std::vector<WrongWayPoint> wrong_way_sweep(
    const ValueCube& net_cube, const MarketScenarioSet& market,
    const CreditModelInputs& inputs, const NettingSet& set,
    const std::vector<double>& correlations,
    const std::function<FactorModel(double)>& factors_for, double cpty_recovery,
    double own_recovery) {
    const auto thresholds = build_thresholds(inputs, market.grid());
    const CreditScenarioSet base = generate_credit_scenarios(
        inputs.entities, thresholds, inputs.factors, market, inputs.oversample,
        inputs.seed);

    std::vector<WrongWayPoint> out;
    for (double rho : correlations) {
        WrongWayPoint pt;
        pt.correlation = rho;
        try {
            const FactorModel factors = factors_for(rho);
            factors.validate();
            const CreditScenarioSet remapped = remap_correlation(
                base, inputs.entities, thresholds, factors, market);
            pt.result = aggregate_cva(net_cube, market, remapped, set,
                                      cpty_recovery, own_recovery);
            pt.marginal_default_rate.resize(inputs.entities.size(), 0.0);
            for (std::size_t e = 0; e < inputs.entities.size(); ++e) {
                std::size_t defaults = 0;
                for (std::size_t c = 0; c < remapped.n_credit_paths(); ++c)
                    if (remapped.default_step(e, c) !=
                        CreditScenarioSet::kNoDefault)
                        ++defaults;
                pt.marginal_default_rate[e] =
                    static_cast<double>(defaults) /
                    static_cast<double>(remapped.n_credit_paths());
            }
        } catch (const std::exception& e) {
            pt.skipped = true;
            pt.diagnostic = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

namespace {

PDTermStructure flat_default_curve(double annual_default_rate, double horizon,
                                   double recovery) {
    require(annual_default_rate >= 0.0 && annual_default_rate < 1.0,
            "annual default rate must lie in [0, 1)");
    const double hazard = -std::log1p(-annual_default_rate);
    PDTermStructure curve;
    curve.rating_or_name = "flat";
    curve.recovery = recovery;
    for (double t = 1.0; t < horizon + 1.0; t += 1.0) {
        curve.tenors.push_back(t);
        curve.cumulative_pd.push_back(-std::expm1(-hazard * t));
    }
    return curve;
}

} // namespace

std::vector<BoundaryPoint> exercise_boundary_study(
    const MarketScenarioSet& market,
    const std::vector<double>& flat_default_rates,
    const BoundaryStudyConfig& config) {
    BoundaryStudyConfig cfg = config;
    if (cfg.exercise_dates.empty())
        for (double t = 1.0; t < cfg.swap_end; t += 1.0)
            cfg.exercise_dates.push_back(t);
    require(!cfg.exercise_dates.empty(), "no exercise dates");
    const std::size_t first_idx = market.grid().index_of(cfg.exercise_dates[0]);
    const std::size_t n_paths = market.n_paths();

    auto make_swaption = [&](double coupon) {
        BermudanSwaption instr;
        instr.id = "study";
        instr.exercise_dates = cfg.exercise_dates;
        // Receiver: we receive the fixed coupon.
        instr.underlying = make_vanilla_swap(
            "study-swap", cfg.notional, coupon, 0.0, cfg.swap_end,
            cfg.fixed_periods_per_year, cfg.float_periods_per_year,
            /*pay_fixed=*/false);
        return instr;
    };

    auto first_date_fraction = [&](double coupon,
                                   const PDTermStructure* credit) {
        LongstaffSchwartzConfig ls;
        if (credit) ls.exercise_credit = *credit;
        const ValueCube cube =
            value_bermudan_swaption(make_swaption(coupon), market, ls);
        std::size_t fired = 0;
        for (std::size_t p = 0; p < n_paths; ++p)
            if (cube.is_exercised(first_idx, p)) ++fired;
        return static_cast<double>(fired) / static_cast<double>(n_paths);
    };

    // The boundary coupon: first-date exercise fires on half the paths.
    // The fraction is non-decreasing in the coupon (deeper in the money),
    // so plain bisection on common draws is deterministic.
    auto boundary = [&](const PDTermStructure* credit) {
        double lo = cfg.coupon_lo, hi = cfg.coupon_hi;
        if (first_date_fraction(lo, credit) >= 0.5) return lo;
        if (first_date_fraction(hi, credit) < 0.5) return hi;
        for (int it = 0; it < cfg.bisection_iterations; ++it) {
            const double mid = 0.5 * (lo + hi);
            (first_date_fraction(mid, credit) >= 0.5 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };

    PDTermStructure no_pd = flat_default_curve(0.0, cfg.swap_end, cfg.recovery);
    const double eval_coupon = boundary(nullptr); // credit-free boundary

    std::vector<BoundaryPoint> out;
    for (double rate : flat_default_rates) {
        const PDTermStructure curve =
            flat_default_curve(rate, cfg.swap_end, cfg.recovery);
        BoundaryPoint pt;
        pt.default_rate = rate;
        pt.boundary_coupon = boundary(&curve);

        // CVA at the credit-free boundary coupon, under both exercise
        // policies; the cube values are market values either way.
        LongstaffSchwartzConfig blind, aware;
        aware.exercise_credit = curve;
        const BermudanSwaption instr = make_swaption(eval_coupon);
        const ValueCube cube_blind =
            value_bermudan_swaption(instr, market, blind);
        const ValueCube cube_aware =
            value_bermudan_swaption(instr, market, aware);
        pt.cva_blind = forward_cva(cube_blind, market, curve, no_pd).cva;
        pt.cva_aware = forward_cva(cube_aware, market, curve, no_pd).cva;
        out.push_back(pt);
    }
    return out;
}

} // namespace cvax
