#include "doctest.h"

#include "cvax/errors.hpp"
#include "cvax/instruments.hpp"
#include "cvax/valuation.hpp"

#include <cmath>
#include <random>

using namespace cvax;

namespace {

MarketScenarioSet flat_market(double rate, double vol, std::size_t n_paths,
                              double horizon = 10.0, std::uint64_t seed = 31) {
    HullWhiteParams params;
    params.volatility = vol;
    params.curve = ZeroCurve::flat(rate);
    std::vector<double> cashflows;
    for (double t = 0.5; t <= horizon; t += 0.5) cashflows.push_back(t);
    const TimeGrid grid =
        build_time_grid(horizon, cashflows, DensityRule::standard());
    return generate_market_scenarios(params, grid, n_paths, seed,
                                     FactorModel::single_market_single_entity(0.0));
}

CashflowInstrument single_flow(double t, double amount) {
    CashflowInstrument d;
    d.id = "flow";
    d.fixed.push_back({t, amount});
    return d;
}

} // namespace

TEST_CASE("deterministic fixed flows discount along the curve") {
    const MarketScenarioSet zero = flat_market(0.0, 0.0, 3);
    const ValueCube v0 = value_cashflow_instrument(single_flow(1.0, 100.0), zero);
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(v0.value(0, p) == doctest::Approx(100.0).epsilon(1e-12));

    const MarketScenarioSet two = flat_market(0.02, 0.0, 3);
    const ValueCube v2 = value_cashflow_instrument(single_flow(1.0, 100.0), two);
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(v2.value(0, p) ==
              doctest::Approx(100.0 * std::exp(-0.02)).epsilon(1e-12));
    // value at the pay date equals the cashflow; zero afterwards
    const std::size_t i = two.grid().index_of(1.0);
    CHECK(v2.value(i, 0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(v2.value(two.grid().size() - 1, 0) == 0.0);
}

TEST_CASE("at-market swap prices to par") {
    const double r = 0.03;
    const MarketScenarioSet m = flat_market(r, 0.01, 8000);
    // fixed rate matching the flat continuous curve for annual coupons
    const double coupon = std::exp(r) - 1.0;
    const CashflowInstrument swap =
        make_vanilla_swap("s", 100.0, coupon, 0.0, 10.0, 1, 1, true);
    const ValueCube cube = value_cashflow_instrument(swap, m);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < m.n_paths(); ++p) {
        sum += cube.value(0, p);
        sumsq += cube.value(0, p) * cube.value(0, p);
    }
    const double mean = sum / static_cast<double>(m.n_paths());
    const double se = std::sqrt((sumsq / static_cast<double>(m.n_paths()) -
                                 mean * mean) / static_cast<double>(m.n_paths()));
    CHECK(std::abs(mean) < 3.0 * se + 1e-9);
}

TEST_CASE("floating legs are martingale-exact") {
    CashflowInstrument d;
    d.id = "float";
    d.floating.push_back({1.0, 2.0, 100.0, 0.0});
    const double target = 100.0 * (std::exp(-0.02) - std::exp(-0.04));

    // zero vol: the leg value is deterministic pathwise
    const MarketScenarioSet flat = flat_market(0.02, 0.0, 4);
    const ValueCube det = value_cashflow_instrument(d, flat);
    for (std::size_t p = 0; p < 4; ++p)
        CHECK(det.value(0, p) == doctest::Approx(target).epsilon(1e-12));

    // stochastic rates: pathwise values vary but the mean is N(P(0,1)-P(0,2))
    const MarketScenarioSet m = flat_market(0.02, 0.015, 20000);
    const ValueCube cube = value_cashflow_instrument(d, m);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < m.n_paths(); ++p) {
        sum += cube.value(0, p);
        sumsq += cube.value(0, p) * cube.value(0, p);
    }
    const double n = static_cast<double>(m.n_paths());
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - target) < 3.0 * se + 1e-9);
}

TEST_CASE("collapse equals sum of parts pathwise") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coupon(0.005, 0.06);
    std::uniform_int_distribution<int> years(2, 10);
    std::bernoulli_distribution side(0.5);

    std::vector<CashflowInstrument> deals;
    for (int k = 0; k < 10; ++k)
        deals.push_back(make_vanilla_swap("d" + std::to_string(k), 100.0,
                                          coupon(rng), 0.0, years(rng), 2, 2,
                                          side(rng)));
    const MarketScenarioSet m = flat_market(0.02, 0.01, 500);
    const CashflowInstrument merged = collapse_cashflows(deals);
    const ValueCube merged_cube = value_cashflow_instrument(merged, m);

    std::vector<ValueCube> parts;
    for (const auto& d : deals) parts.push_back(value_cashflow_instrument(d, m));
    for (std::size_t i = 0; i < m.grid().size(); ++i)
        for (std::size_t p = 0; p < m.n_paths(); p += 97) {
            double sum = 0.0;
            for (const auto& c : parts) sum += c.value(i, p);
            CHECK(merged_cube.value(i, p) ==
                  doctest::Approx(sum).epsilon(1e-10));
        }
}

TEST_CASE("equal and opposite swaps collapse to nothing") {
    const auto a = make_vanilla_swap("a", 50.0, 0.03, 0.0, 5.0, 1, 1, true);
    const auto b = make_vanilla_swap("b", 50.0, 0.03, 0.0, 5.0, 1, 1, false);
    const CashflowInstrument net = collapse_cashflows({a, b});
    for (const auto& f : net.fixed) CHECK(std::abs(f.amount) < 1e-12);
    for (const auto& f : net.floating) CHECK(std::abs(f.notional) < 1e-12);
}

TEST_CASE("1000 identical swaps collapse to one instrument with 1000x amounts") {
    const auto one = make_vanilla_swap("x", 1.0, 0.02, 0.0, 3.0, 1, 1, true);
    std::vector<CashflowInstrument> many(1000, one);
    const CashflowInstrument big = collapse_cashflows(many);
    CashflowInstrument scaled = one;
    scaled.normalize();
    REQUIRE(big.fixed.size() == scaled.fixed.size());
    for (std::size_t i = 0; i < big.fixed.size(); ++i)
        CHECK(big.fixed[i].amount ==
              doctest::Approx(1000.0 * scaled.fixed[i].amount).epsilon(1e-10));
}

namespace {

BermudanSwaption receiver_bermudan(double coupon, double end,
                                   std::vector<double> dates) {
    BermudanSwaption b;
    b.id = "berm";
    b.exercise_dates = std::move(dates);
    b.underlying =
        make_vanilla_swap("u", 100.0, coupon, 0.0, end, 1, 1, false);
    return b;
}

double mean_t0(const ValueCube& c) {
    double s = 0.0;
    for (std::size_t p = 0; p < c.n_paths; ++p) s += c.value(0, p);
    return s / static_cast<double>(c.n_paths);
}

} // namespace

TEST_CASE("single-date Bermudan equals the European estimate on shared paths") {
    const MarketScenarioSet m = flat_market(0.02, 0.012, 4000, 10.0);
    const double coupon = 0.022;
    const BermudanSwaption b = receiver_bermudan(coupon, 10.0, {3.0});
    LongstaffSchwartzDiagnostics diag;
    const ValueCube cube = value_bermudan_swaption(b, m, {}, &diag);
    CHECK(mean_t0(cube) >= 0.0);

    // European oracle on the same paths: discounted positive part of the
    // strictly-future swap flows at the single date. The flow paid at the
    // date itself (coupon received minus floating paid) is excluded.
    const ValueCube swap = value_cashflow_instrument(b.underlying, m);
    const std::size_t e = m.grid().index_of(3.0);
    const std::size_t prev = m.grid().index_of(2.0);
    double euro = 0.0;
    for (std::size_t p = 0; p < m.n_paths(); ++p) {
        const double flow_at_e = 100.0 * coupon -
                                 100.0 * (m.discount(prev, p) / m.discount(e, p) - 1.0);
        const double entered = swap.value(e, p) - flow_at_e;
        euro += std::max(0.0, entered) * m.discount(e, p);
    }
    euro /= static_cast<double>(m.n_paths());
    CHECK(diag.value_estimate == doctest::Approx(euro).epsilon(1e-10));
}

TEST_CASE("bermudan properties on shared paths") {
    const MarketScenarioSet m = flat_market(0.02, 0.012, 4000, 10.0);

    LongstaffSchwartzDiagnostics d1, d2;
    const ValueCube one =
        value_bermudan_swaption(receiver_bermudan(0.022, 10.0, {3.0}), m, {}, &d1);
    const ValueCube many = value_bermudan_swaption(
        receiver_bermudan(0.022, 10.0, {3.0, 4.0, 5.0, 6.0, 7.0}), m, {}, &d2);
    // richer exercise set never loses value in-sample
    CHECK(d2.value_estimate >= d1.value_estimate - 1e-12);

    // deep in-the-money receiver exercises at the first date on every path
    const ValueCube deep = value_bermudan_swaption(
        receiver_bermudan(0.30, 10.0, {1.0, 2.0, 3.0}), m);
    const std::size_t first = m.grid().index_of(1.0);
    for (std::size_t p = 0; p < m.n_paths(); ++p)
        CHECK(deep.is_exercised(first, p));

    // exercise consistency: once fired, cube equals remaining swap flows
    const ValueCube swap = value_cashflow_instrument(
        make_vanilla_swap("u", 100.0, 0.30, 0.0, 10.0, 1, 1, false), m);
    std::vector<double> paydates;
    for (double t = 1.0; t <= 10.0; t += 1.0) paydates.push_back(t);
    for (std::size_t p = 0; p < 50; ++p)
        for (std::size_t i = first + 1; i < m.grid().size(); ++i) {
            REQUIRE(deep.is_exercised(i, p));
            CHECK(deep.value(i, p) == doctest::Approx(swap.value(i, p)).epsilon(1e-10));
        }
}

TEST_CASE("pre-exercise values are conditional estimates, floored at zero") {
    const MarketScenarioSet m = flat_market(0.02, 0.012, 2000, 10.0);
    const ValueCube cube = value_bermudan_swaption(
        receiver_bermudan(0.02, 10.0, {4.0, 6.0}), m);
    for (std::size_t p = 0; p < m.n_paths(); ++p)
        for (std::size_t i = 0; i < m.grid().size(); ++i)
            if (!cube.is_exercised(i, p)) CHECK(cube.value(i, p) >= 0.0);
}

TEST_CASE("collapse rejects nothing linear and validates swaption input") {
    BermudanSwaption empty;
    empty.id = "bad";
    CHECK_THROWS_AS(empty.validate(), InputError);
}
