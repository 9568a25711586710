#include "doctest.h"

#include "cvax/credit_curve.hpp"
#include "cvax/credit_scenarios.hpp"
#include "cvax/distributions.hpp"
#include "cvax/errors.hpp"
#include "cvax/thresholds.hpp"
#include "cvax/transition_matrix.hpp"

#include <cmath>

using namespace cvax;

TEST_CASE("flat-spread PD curve") {
    const std::vector<double> tenors{1, 2, 5, 10};
    const PDTermStructure zero = pd_from_flat_spread("x", 0.0, 0.4, tenors);
    for (double t : tenors) CHECK(zero.pd(t) == 0.0);

    const PDTermStructure p = pd_from_flat_spread("x", 0.012, 0.4, tenors);
    CHECK(p.pd(5.0) == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-12));

    // doubling the spread doubles the hazard (R = 0)
    const PDTermStructure p1 = pd_from_flat_spread("x", 0.01, 0.0, tenors);
    const PDTermStructure p2 = pd_from_flat_spread("x", 0.02, 0.0, tenors);
    for (double t : tenors) {
        const double implied = 1.0 - (1.0 - p1.pd(t)) * (1.0 - p1.pd(t));
        CHECK(p2.pd(t) == doctest::Approx(implied).epsilon(1e-12));
    }

    CHECK_THROWS_AS(pd_from_flat_spread("x", 0.01, 1.0, tenors), InputError);
}

TEST_CASE("spread_from_pd basics") {
    CHECK(spread_from_pd(0.0, 0.4, 3.0) == 0.0);
    CHECK(spread_from_pd(0.3, 1.0, 3.0) == 0.0);
    CHECK(spread_from_pd(0.05, 0.4, 1.0) ==
          doctest::Approx(-std::log(0.97)).epsilon(1e-14));
    CHECK_THROWS_AS(spread_from_pd(1.0, 0.0, 1.0), InputError);
}

namespace {

TransitionMatrix table2() {
    TransitionMatrix m;
    m.ratings = {"A", "B", "C", "D"};
    m.q.resize(4, 4);
    m.q << 0.9600, 0.0250, 0.0119, 0.0031,
           0.0040, 0.8300, 0.1487, 0.0173,
           0.0041, 0.0100, 0.9230, 0.0629,
           0.0,    0.0,    0.0,    1.0;
    return m;
}

} // namespace

TEST_CASE("matrix propagation reproduces one- and two-step defaults") {
    const TransitionMatrix m = table2();
    m.validate(1e-12);
    const PropagationResult prop = propagate_matrix(m, 2);
    CHECK(prop.pd(0, 1) == doctest::Approx(0.0031).epsilon(1e-12));
    // independent two-step oracle: (Q^2) first row, default column
    const Eigen::MatrixXd q2 = m.q * m.q;
    CHECK(prop.pd(0, 2) == doctest::Approx(q2(0, 3)).epsilon(1e-12));
    CHECK(prop.pd(0, 2) == doctest::Approx(0.00726).epsilon(5e-3));
}

TEST_CASE("identity matrix never defaults") {
    const TransitionMatrix id = TransitionMatrix::identity({"A", "B", "D"});
    const PropagationResult prop = propagate_matrix(id, 10);
    for (std::size_t n = 0; n <= 10; ++n) {
        CHECK(prop.pd(0, n) == 0.0);
        CHECK(prop.pd(1, n) == 0.0);
    }
}

TEST_CASE("matrix csv round trip") {
    const TransitionMatrix m = table2();
    const TransitionMatrix back = TransitionMatrix::from_csv_text(m.to_csv_text());
    CHECK(back.ratings == m.ratings);
    CHECK((back.q - m.q).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("risk premium adjustment") {
    CHECK(mcnulty_levin_adjust(-1.0, 0.0) == doctest::Approx(normal_cdf(-1.0)));
    CHECK(mcnulty_levin_adjust(normal_quantile(0.01), 0.5) ==
          doctest::Approx(normal_cdf(-1.8263)).epsilon(1e-4));
    CHECK(mcnulty_levin_adjust(-1.0, 0.2) < mcnulty_levin_adjust(-1.0, 0.3));
}

TEST_CASE("fat tail conversion") {
    ReturnDistribution t3{3.0};
    CHECK(fat_tail_convert(0.0, t3) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fat_tail_convert(-1.95996, t3) == doctest::Approx(-3.1824).epsilon(1e-4));
    ReturnDistribution normal{};
    CHECK(fat_tail_convert(-1.3, normal) == doctest::Approx(-1.3).epsilon(1e-12));
}

namespace {

CreditEntity entity_with_pd(const std::vector<double>& tenors,
                            const std::vector<double>& pds) {
    CreditEntity e;
    e.name = "cpty";
    e.current_rating = 0;
    e.pd_curve.rating_or_name = "cpty";
    e.pd_curve.tenors = tenors;
    e.pd_curve.cumulative_pd = pds;
    return e;
}

RatingThresholds calibrated(const CreditEntity& e, const TimeGrid& grid) {
    const TransitionMatrix id = TransitionMatrix::identity({"A", "B", "D"});
    const auto dist = rating_distribution_on_grid(id, e.current_rating, grid);
    return calibrate_thresholds(e, dist, {"A", "B"}, grid);
}

} // namespace

TEST_CASE("default threshold is the PD quantile") {
    DensityRule annual{{{1e9, 1.0}}};
    const TimeGrid grid = build_time_grid(2.0, {}, annual);
    SUBCASE("50 percent maps to zero") {
        const auto th = calibrated(entity_with_pd({1, 2}, {0.5, 0.5}), grid);
        CHECK(std::abs(th.default_threshold(grid.index_of(1.0))) < 1e-12);
    }
    SUBCASE("2.5 percent maps to the normal quantile") {
        const auto th = calibrated(entity_with_pd({1, 2}, {0.025, 0.025}), grid);
        CHECK(th.default_threshold(grid.index_of(1.0)) ==
              doctest::Approx(-1.9599639845400545).epsilon(1e-12));
    }
    SUBCASE("student t entity inverts under the t distribution") {
        CreditEntity e = entity_with_pd({1, 2}, {0.025, 0.025});
        e.fat_tail_df = 3.0;
        const auto th = calibrated(e, grid);
        CHECK(th.default_threshold(grid.index_of(1.0)) ==
              doctest::Approx(-3.1824).epsilon(1e-4));
    }
    SUBCASE("PD of 1 is rejected") {
        CHECK_THROWS_AS(calibrated(entity_with_pd({1, 2}, {0.5, 1.0}), grid),
                        InputError);
    }
}

TEST_CASE("stochastic threshold diffusion") {
    DensityRule fine{{{1e9, 1.0 / 64}}};
    const TimeGrid grid = build_time_grid(4.0, {}, fine);

    StochasticThresholdParams frozen{0.7, 2.0, 0.0};
    const auto flat = evolve_stochastic_threshold(frozen, 0.7, grid, 2, 1);
    for (double h : flat) CHECK(h == doctest::Approx(0.7).epsilon(1e-12));

    StochasticThresholdParams decay{0.0, 1.0, 0.0};
    const auto path = evolve_stochastic_threshold(decay, 1.0, grid, 1, 1);
    const std::size_t last = grid.size() - 1;
    CHECK(path[last] == doctest::Approx(std::exp(-4.0)).epsilon(0.05));

    StochasticThresholdParams ou{0.3, 3.0, 0.4};
    const std::size_t n = 100000;
    const auto paths = evolve_stochastic_threshold(ou, 0.0, grid, n, 5);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double h = paths[last * n + p];
        sum += h;
        sumsq += h * h;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.3) < 3.0 * se);

    const auto again = evolve_stochastic_threshold(ou, 0.0, grid, n, 5);
    CHECK(paths == again);
}

namespace {

struct CreditFixture {
    TimeGrid grid;
    MarketScenarioSet market;
    std::vector<CreditEntity> entities;
    std::vector<RatingThresholds> thresholds;
    std::vector<std::string> live{"A", "B"};

    CreditFixture(double rho, std::size_t n_paths, double pd5 = 0.10,
                  std::size_t n_entities = 1)
        : grid(build_time_grid(5.0, {}, DensityRule{{{1e9, 0.25}}})) {
        HullWhiteParams params;
        market = generate_market_scenarios(
            params, grid, n_paths, 21,
            FactorModel::market_plus_entities(rho, n_entities));
        const TransitionMatrix id = TransitionMatrix::identity({"A", "B", "D"});
        for (std::size_t e = 0; e < n_entities; ++e) {
            CreditEntity ent;
            ent.name = "e" + std::to_string(e);
            ent.current_rating = 0;
            ent.pd_curve.rating_or_name = ent.name;
            ent.pd_curve.tenors = {1, 2, 5};
            const double h = -std::log(1.0 - pd5) / 5.0;
            ent.pd_curve.cumulative_pd = {-std::expm1(-h), -std::expm1(-2 * h),
                                          pd5};
            entities.push_back(ent);
            const auto dist = rating_distribution_on_grid(id, 0, grid);
            thresholds.push_back(calibrate_thresholds(entities[e], dist, live, grid));
        }
    }

    CreditScenarioSet generate(std::size_t oversample, std::uint64_t seed,
                               double rho) const {
        return generate_credit_scenarios(
            entities, thresholds,
            FactorModel::market_plus_entities(rho, entities.size()), market,
            oversample, seed);
    }
};

} // namespace

TEST_CASE("independent credit matches target PD and ignores rates") {
    const std::size_t n_paths = 20000;
    CreditFixture fx(0.0, n_paths);
    const CreditScenarioSet credit = fx.generate(1, 77, 0.0);

    // default frequency at every grid time within 3 binomial SE
    for (std::size_t i = 1; i < fx.grid.size(); ++i) {
        const double target = fx.entities[0].pd_curve.pd(fx.grid[i]);
        std::size_t defaults = 0;
        for (std::size_t c = 0; c < credit.n_credit_paths(); ++c) {
            const std::int32_t d = credit.default_step(0, c);
            if (d != CreditScenarioSet::kNoDefault &&
                d <= static_cast<std::int32_t>(i))
                ++defaults;
        }
        const double freq = static_cast<double>(defaults) / n_paths;
        const double se = std::sqrt(target * (1 - target) / n_paths);
        CHECK(std::abs(freq - target) < 3.0 * se + 1e-12);
    }

    // terminal short rate uncorrelated with the default indicator
    const std::size_t last = fx.grid.size() - 1;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t c = 0; c < credit.n_credit_paths(); ++c) {
        const double x = fx.market.short_rate(last, credit.market_path_of(c));
        const double y =
            credit.default_step(0, c) != CreditScenarioSet::kNoDefault ? 1.0 : 0.0;
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    const double n = static_cast<double>(credit.n_credit_paths());
    const double corr = (sxy - sx * sy / n) /
                        std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) < 3.0 / std::sqrt(n));
}

TEST_CASE("fully systematic twins default together") {
    CreditFixture fx(1.0, 4000, 0.10, 2);
    const CreditScenarioSet credit = fx.generate(1, 5, 1.0);
    for (std::size_t c = 0; c < credit.n_credit_paths(); ++c)
        CHECK(credit.default_step(0, c) == credit.default_step(1, c));
}

TEST_CASE("oversampling multiplies credit paths") {
    CreditFixture fx(0.0, 500);
    const CreditScenarioSet credit = fx.generate(10, 5, 0.0);
    CHECK(credit.n_credit_paths() == 5000);
    CHECK(credit.market_path_of(4999) == 499);
    CHECK(credit.market_path_of(9) == 0);
}

TEST_CASE("remap identities and marginals") {
    CreditFixture fx(0.5, 4000);
    const CreditScenarioSet base = fx.generate(2, 9, 0.5);

    const CreditScenarioSet same = remap_correlation(
        base, fx.entities, fx.thresholds,
        FactorModel::market_plus_entities(0.5, 1), fx.market);
    CHECK(same == base);

    const CreditScenarioSet indep = remap_correlation(
        base, fx.entities, fx.thresholds,
        FactorModel::market_plus_entities(0.0, 1), fx.market);
    const CreditScenarioSet fresh = fx.generate(2, 9, 0.0);
    CHECK(indep == fresh);

    auto default_rate = [](const CreditScenarioSet& s) {
        std::size_t d = 0;
        for (std::size_t c = 0; c < s.n_credit_paths(); ++c)
            if (s.default_step(0, c) != CreditScenarioSet::kNoDefault) ++d;
        return static_cast<double>(d) / static_cast<double>(s.n_credit_paths());
    };
    const double p = 0.10;
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(base.n_credit_paths()));
    CHECK(std::abs(default_rate(base) - default_rate(indep)) < 6.0 * se);
}

TEST_CASE("rating before default reads the prior step") {
    CreditFixture fx(0.0, 2000, 0.30);
    const CreditScenarioSet credit = fx.generate(1, 3, 0.0);
    bool saw_default = false;
    for (std::size_t c = 0; c < credit.n_credit_paths(); ++c) {
        const std::int32_t d = credit.default_step(0, c);
        if (d == CreditScenarioSet::kNoDefault) {
            CHECK_THROWS_AS(rating_before_default(credit, 0, c), InputError);
            continue;
        }
        saw_default = true;
        const std::size_t r = rating_before_default(credit, 0, c);
        CHECK(r < credit.default_state());
        CHECK(r == credit.rating(0, static_cast<std::size_t>(d) - 1, c));
        if (d == 1) CHECK(r == fx.entities[0].current_rating);
        // absorbing default after d
        for (std::size_t i = static_cast<std::size_t>(d); i < fx.grid.size(); ++i)
            CHECK(credit.rating(0, i, c) == credit.default_state());
    }
    CHECK(saw_default);
}

TEST_CASE("risky step factor compounds exactly") {
    const PDTermStructure pd = pd_from_flat_spread("x", 0.02, 0.4, {1, 2, 5, 10});
    double f = 1.0;
    const std::vector<double> knots{0.0, 0.5, 1.0, 2.5, 4.0, 7.0, 10.0};
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        f *= risky_step_factor(pd, knots[i], knots[i + 1]);
    CHECK(f == doctest::Approx(1.0 - 0.6 * pd.pd(10.0)).epsilon(1e-14));
}
