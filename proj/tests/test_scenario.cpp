#include "doctest.h"

#include "cvax/errors.hpp"
#include "cvax/factor_model.hpp"
#include "cvax/market.hpp"
#include "cvax/rng.hpp"
#include "cvax/timegrid.hpp"

#include <cmath>
#include <random>

using namespace cvax;

TEST_CASE("standard density rule: 10y grid point count") {
    const TimeGrid g = build_time_grid(10.0, {}, DensityRule::standard());
    // 12 monthly + 16 quarterly + 5 annual + the origin.
    CHECK(g.size() == 34);
    CHECK(g.times.front() == 0.0);
    CHECK(g.times.back() == doctest::Approx(10.0));
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g.times[i] < g.times[i + 1]);
    // spacing non-decreasing toward the back
    for (std::size_t i = 0; i + 2 < g.size(); ++i)
        CHECK(g.dt(i) <= g.dt(i + 1) + 1e-12);
}

TEST_CASE("grid unions events with endpoints") {
    DensityRule annual{{{1e9, 1.0}}};
    const TimeGrid g = build_time_grid(1.0, {0.5}, annual);
    REQUIRE(g.size() == 3);
    CHECK(g.times[0] == 0.0);
    CHECK(g.times[1] == doctest::Approx(0.5));
    CHECK(g.times[2] == doctest::Approx(1.0));
    CHECK(g.tags[1] == PointTag::Cashflow);
}

TEST_CASE("grid dedups near-coincident events") {
    DensityRule annual{{{1e9, 1.0}}};
    const TimeGrid g = build_time_grid(1.0, {0.25, 0.25 + 1e-12}, annual);
    std::size_t hits = 0;
    for (double t : g.times)
        if (std::abs(t - 0.25) < 1e-6) ++hits;
    CHECK(hits == 1);
}

TEST_CASE("events beyond horizon are rejected with the date") {
    DensityRule annual{{{1e9, 1.0}}};
    CHECK_THROWS_WITH_AS(build_time_grid(1.0, {2.5}, annual),
                         doctest::Contains("2.5"), InputError);
}

TEST_CASE("exercise tag wins over synthetic on dedup") {
    DensityRule annual{{{1e9, 1.0}}};
    const TimeGrid g = build_time_grid(2.0, {}, {1.0}, annual);
    CHECK(g.tags[g.index_of(1.0)] == PointTag::Exercise);
}

TEST_CASE("identity correlation: pure idiosyncratic loadings") {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
    const FactorModel f = loadings_from_correlation(c, 1);
    f.validate();
    CHECK(f.market_idio(0) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(f.credit_idio(static_cast<Eigen::Index>(j)) == doctest::Approx(1.0));
        CHECK(f.market_credit_correlation(0, j) == doctest::Approx(0.0));
    }
}

TEST_CASE("2x2 rho=0.5: loading product recovers the correlation") {
    Eigen::MatrixXd c(2, 2);
    c << 1.0, 0.5, 0.5, 1.0;
    const FactorModel f = loadings_from_correlation(c, 1);
    f.validate();
    CHECK(f.market_credit_correlation(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("random 5x5 PSD matrix round-trips through loadings") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd a(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) a(i, j) = n01(rng);
    Eigen::MatrixXd cov = a * a.transpose();
    Eigen::VectorXd d = cov.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr = cov.array() / (d * d.transpose()).array();

    const FactorModel f = loadings_from_correlation(corr, 2);
    f.validate();

    // reconstruct every pairwise correlation from the loadings
    const std::size_t n_market = 2, n_total = 5;
    auto row = [&](std::size_t i) -> Eigen::VectorXd {
        return i < n_market
                   ? Eigen::VectorXd(f.market_loadings.row(static_cast<Eigen::Index>(i)))
                   : Eigen::VectorXd(f.credit_loadings.row(static_cast<Eigen::Index>(i - n_market)));
    };
    for (std::size_t i = 0; i < n_total; ++i)
        for (std::size_t j = i + 1; j < n_total; ++j)
            CHECK(row(i).dot(row(j)) ==
                  doctest::Approx(corr(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j)))
                      .epsilon(1e-8));
}

TEST_CASE("non-PSD correlation is rejected naming the eigenvalue") {
    Eigen::MatrixXd c(3, 3);
    c << 1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0;
    CHECK_THROWS_AS(loadings_from_correlation(c, 1), NumericalError);
}

TEST_CASE("philox draws are deterministic and distinct across streams") {
    const double u1 = uniform_draw(42, DrawStream::Systematic, 1, 2);
    const double u2 = uniform_draw(42, DrawStream::Systematic, 1, 2);
    CHECK(u1 == u2);
    CHECK(u1 > 0.0);
    CHECK(u1 < 1.0);
    CHECK(uniform_draw(42, DrawStream::MarketIdiosyncratic, 1, 2) != u1);
    CHECK(uniform_draw(43, DrawStream::Systematic, 1, 2) != u1);
    CHECK(uniform_draw(42, DrawStream::Systematic, 2, 1) != u1);
}

namespace {

MarketScenarioSet make_market(double vol, double rate, std::size_t n_paths,
                              std::uint64_t seed, double horizon = 5.0) {
    HullWhiteParams params;
    params.volatility = vol;
    params.curve = ZeroCurve::flat(rate);
    const TimeGrid grid = build_time_grid(horizon, {}, DensityRule::standard());
    return generate_market_scenarios(params, grid, n_paths, seed,
                                     FactorModel::single_market_single_entity(0.0));
}

} // namespace

TEST_CASE("zero volatility reproduces the deterministic curve") {
    const MarketScenarioSet m = make_market(0.0, 0.02, 3, 1);
    for (std::size_t i = 0; i < m.grid().size(); ++i)
        for (std::size_t p = 0; p < 3; ++p) {
            CHECK(m.short_rate(i, p) == doctest::Approx(0.02).epsilon(1e-12));
            CHECK(m.discount(i, p) ==
                  doctest::Approx(std::exp(-0.02 * m.grid()[i])).epsilon(1e-12));
        }
}

TEST_CASE("discount factors are a martingale against the curve") {
    const std::size_t n = 10000;
    const MarketScenarioSet m = make_market(0.01, 0.03, n, 99);
    for (std::size_t i = 1; i < m.grid().size(); ++i) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            sum += m.discount(i, p);
            sumsq += m.discount(i, p) * m.discount(i, p);
        }
        const double mean = sum / n;
        const double se = std::sqrt((sumsq / n - mean * mean) / n);
        const double target = std::exp(-0.03 * m.grid()[i]);
        CHECK(std::abs(mean - target) < 3.0 * se + 1e-12);
    }
}

TEST_CASE("same seed gives bit-identical scenario sets") {
    const MarketScenarioSet a = make_market(0.01, 0.02, 64, 7);
    const MarketScenarioSet b = make_market(0.01, 0.02, 64, 7);
    CHECK(a.short_rates() == b.short_rates());
    CHECK(a.discounts() == b.discounts());
    CHECK(a.systematic_draws() == b.systematic_draws());
    const MarketScenarioSet c = make_market(0.01, 0.02, 64, 8);
    CHECK(a.short_rates() != c.short_rates());
}

TEST_CASE("systematic draw correlation matches the factor model") {
    // two systematic factors via a 3x3 correlation (market + 2 entities)
    Eigen::MatrixXd corr(3, 3);
    corr << 1.0, 0.6, 0.3, 0.6, 1.0, 0.18, 0.3, 0.18, 1.0;
    const FactorModel f = loadings_from_correlation(corr, 1);
    HullWhiteParams params;
    const TimeGrid grid = build_time_grid(1.0, {}, DensityRule::standard());
    const std::size_t n = 100000;
    const MarketScenarioSet m =
        generate_market_scenarios(params, grid, n, 11, f);
    REQUIRE(m.n_systematic() == f.n_systematic());
    // cross-factor empirical correlation of the standardized draws is 0
    for (std::size_t a = 0; a < m.n_systematic(); ++a)
        for (std::size_t b = a + 1; b < m.n_systematic(); ++b) {
            double s = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                s += m.systematic_draw(1, p, a) * m.systematic_draw(1, p, b);
            CHECK(std::abs(s / n) < 3.0 / std::sqrt(static_cast<double>(n)));
        }
}

TEST_CASE("market bump helpers") {
    HullWhiteParams p;
    p.curve = ZeroCurve::flat(0.02);
    const HullWhiteParams same = shift_market_params(p, {});
    CHECK(same.curve.zero_rate(3.0) == p.curve.zero_rate(3.0));
    CHECK(same.volatility == p.volatility);

    const HullWhiteParams up = shift_market_params(p, {0.0001, 0.0});
    CHECK(up.curve.zero_rate(3.0) == doctest::Approx(0.0201).epsilon(1e-12));
    const HullWhiteParams back = shift_market_params(up, {-0.0001, 0.0});
    CHECK(back.curve.zero_rate(3.0) == doctest::Approx(0.02).epsilon(1e-12));
}
