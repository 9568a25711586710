#include "cvax/valuation.hpp"
#include "cvax/errors.hpp"
#include "cvax/hashing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cvax {

namespace {

// Discounted-to-0 flow amounts bucketed at their pay-time grid index.
std::vector<double> flow_buckets(const CashflowInstrument& instr,
                                 const MarketScenarioSet& market) {
    const TimeGrid& grid = market.grid();
    const std::size_t n_paths = market.n_paths();
    std::vector<double> bucket(grid.size() * n_paths, 0.0);

    for (const auto& f : instr.fixed) {
        const std::size_t i = grid.index_of(f.pay_time);
        for (std::size_t p = 0; p < n_paths; ++p)
            bucket[i * n_paths + p] += f.amount * market.discount(i, p);
    }
    for (const auto& f : instr.floating) {
        const std::size_t is = grid.index_of(f.accrual_start);
        const std::size_t ie = grid.index_of(f.accrual_end);
        require(ie > is, "floating accrual period is empty");
        const double accrual = f.accrual_end - f.accrual_start;
        for (std::size_t p = 0; p < n_paths; ++p) {
            // Compounded short rate paid at accrual end:
            // N (D_s/D_e - 1 + spread * accrual), already discounted to 0.
            bucket[ie * n_paths + p] +=
                f.notional * (market.discount(is, p) - market.discount(ie, p) +
                              f.spread * accrual * market.discount(ie, p));
        }
    }
    return bucket;
}

ValueCube make_cube(const std::string& id, const MarketScenarioSet& market) {
    ValueCube cube;
    cube.id = id;
    cube.grid = market.grid();
    cube.n_paths = market.n_paths();
    cube.scenario_seed = market.seed();
    cube.grid_hash = grid_hash(market.grid());
    cube.values.assign(cube.grid.size() * cube.n_paths, 0.0);
    return cube;
}

// Monomial basis in 2 or 3 state variables up to total degree d.
Eigen::MatrixXd design_matrix(const std::vector<Eigen::Vector3d>& state,
                              const std::vector<std::size_t>& rows, int degree,
                              int n_vars) {
    std::vector<std::array<int, 3>> powers;
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; b + a <= degree; ++b)
            for (int c = 0; c + b + a <= degree; ++c) {
                if (n_vars < 3 && c > 0) continue;
                if (n_vars < 2 && b > 0) continue;
                powers.push_back({a, b, c});
            }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(powers.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Vector3d& s = state[rows[r]];
        for (std::size_t c = 0; c < powers.size(); ++c)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::pow(s(0), powers[c][0]) * std::pow(s(1), powers[c][1]) *
                std::pow(s(2), powers[c][2]);
    }
    return x;
}

// Least-squares fit, falling back to lower degree when rank-deficient.
// Returns in-sample predictions for `rows`.
Eigen::VectorXd regress(const std::vector<Eigen::Vector3d>& state,
                        const std::vector<std::size_t>& rows,
                        const Eigen::VectorXd& y, int degree, int n_vars,
                        bool* degraded) {
    for (int d = degree; d >= 0; --d) {
        const Eigen::MatrixXd x = design_matrix(state, rows, d, n_vars);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < x.cols() && d > 0) {
            if (degraded) *degraded = true;
            continue;
        }
        return x * qr.solve(y);
    }
    return Eigen::VectorXd::Constant(y.size(), y.mean());
}

} // namespace

ValueCube value_cashflow_instrument(const CashflowInstrument& instr,
                                    const MarketScenarioSet& market) {
    const TimeGrid& grid = market.grid();
    const std::size_t n_paths = market.n_paths();
    ValueCube cube = make_cube(instr.id, market);

    std::vector<double> bucket = flow_buckets(instr, market);
    // Suffix-sum backward: V(i) = sum of flows paid at or after t_i,
    // re-expressed in time-t_i money.
    std::vector<double> suffix(n_paths, 0.0);
    for (std::size_t i = grid.size(); i-- > 0;) {
        for (std::size_t p = 0; p < n_paths; ++p) {
            suffix[p] += bucket[i * n_paths + p];
            cube.value(i, p) = suffix[p] / market.discount(i, p);
        }
    }
    return cube;
}

ValueCube value_bermudan_swaption(const BermudanSwaption& instr,
                                  const MarketScenarioSet& market,
                                  const LongstaffSchwartzConfig& config,
                                  LongstaffSchwartzDiagnostics* diag) {
    instr.validate();
    const TimeGrid& grid = market.grid();
    const std::size_t n_times = grid.size();
    const std::size_t n_paths = market.n_paths();
    const int n_vars = config.asset_regressor ? 3 : 2;
    require(!config.asset_regressor || config.asset_state != nullptr,
            "asset regressor enabled but no asset state supplied");

    std::vector<std::size_t> ex_idx;
    for (double t : instr.exercise_dates) ex_idx.push_back(grid.index_of(t));

    const std::vector<double> bucket = flow_buckets(instr.underlying, market);

    // Risky weight per grid time for credit-aware exercise decisions:
    // survival value 1 - (1-R) PD(t); flat 1 when the decision is
    // credit-blind.
    std::vector<double> risky(n_times, 1.0);
    if (config.exercise_credit) {
        const auto& pd = *config.exercise_credit;
        for (std::size_t i = 0; i < n_times; ++i)
            risky[i] = 1.0 - (1.0 - pd.recovery) * pd.pd(grid[i]);
    }

    // strict(i,p): flows strictly after t_i, discounted to 0.
    // strict_r: same with the risky weight applied per pay date.
    std::vector<double> strict(n_times * n_paths, 0.0);
    std::vector<double> strict_r(n_times * n_paths, 0.0);
    for (std::size_t i = n_times - 1; i-- > 0;) {
        for (std::size_t p = 0; p < n_paths; ++p) {
            strict[i * n_paths + p] =
                strict[(i + 1) * n_paths + p] + bucket[(i + 1) * n_paths + p];
            strict_r[i * n_paths + p] =
                strict_r[(i + 1) * n_paths + p] +
                bucket[(i + 1) * n_paths + p] * risky[i + 1];
        }
    }

    // State variables per (time, path): short rate, remaining swap value,
    // optional structural asset value.
    std::vector<Eigen::Vector3d> state(n_paths);
    auto load_state = [&](std::size_t i) {
        for (std::size_t p = 0; p < n_paths; ++p) {
            state[p](0) = market.short_rate(i, p);
            state[p](1) = strict[i * n_paths + p] / market.discount(i, p);
            state[p](2) = config.asset_regressor
                              ? (*config.asset_state)[i * n_paths + p]
                              : 0.0;
        }
    };

    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> tau(n_paths, kNever);
    std::vector<double> cash_r(n_paths, 0.0); // discounted to 0, risky weight
    bool degraded = false;

    for (std::size_t k = ex_idx.size(); k-- > 0;) {
        const std::size_t e = ex_idx[k];
        load_state(e);

        std::vector<double> xr(n_paths);
        std::vector<std::size_t> itm;
        for (std::size_t p = 0; p < n_paths; ++p) {
            xr[p] = strict_r[e * n_paths + p] /
                    (market.discount(e, p) * risky[e]);
            if (xr[p] > 0.0) itm.push_back(p);
        }

        std::vector<double> cont(n_paths, 0.0);
        const bool last_date = (k + 1 == ex_idx.size());
        if (!last_date && !itm.empty()) {
            Eigen::VectorXd y(static_cast<Eigen::Index>(itm.size()));
            for (std::size_t r = 0; r < itm.size(); ++r)
                y(static_cast<Eigen::Index>(r)) =
                    cash_r[itm[r]] / (market.discount(e, itm[r]) * risky[e]);
            const Eigen::VectorXd fit = regress(state, itm, y, instr.basis_degree,
                                                n_vars, &degraded);
            for (std::size_t r = 0; r < itm.size(); ++r)
                cont[itm[r]] = fit(static_cast<Eigen::Index>(r));
        }

        for (std::size_t p : itm) {
            if (xr[p] >= cont[p]) {
                tau[p] = e;
                cash_r[p] = xr[p] * market.discount(e, p) * risky[e];
            }
        }
    }

    // Cube values are credit-free regardless of the exercise decision mode:
    // the decision chooses tau, the cube reports market value.
    ValueCube cube = make_cube(instr.id, market);
    cube.exercised.assign(n_times * n_paths, 0);

    std::vector<double> cash(n_paths, 0.0); // realized option value, risk-free
    for (std::size_t p = 0; p < n_paths; ++p)
        if (tau[p] != kNever)
            cash[p] = strict[tau[p] * n_paths + p];

    // Post-exercise: remaining swap flows; the exercise date itself takes
    // the entered (strictly future) swap value.
    std::vector<double> incl(n_paths, 0.0);
    for (std::size_t i = n_times; i-- > 0;) {
        for (std::size_t p = 0; p < n_paths; ++p) {
            incl[p] = strict[i * n_paths + p] + bucket[i * n_paths + p];
            if (tau[p] != kNever && i >= tau[p]) {
                cube.exercised[i * n_paths + p] = 1;
                const double disc = (i == tau[p]) ? strict[i * n_paths + p]
                                                  : incl[p];
                cube.value(i, p) = disc / market.discount(i, p);
            }
        }
    }

    // Pre-exercise: conditional continuation value by per-date regression
    // of the realized discounted payoff, floored at zero.
    for (std::size_t i = 0; i < n_times; ++i) {
        std::vector<std::size_t> alive;
        for (std::size_t p = 0; p < n_paths; ++p)
            if (tau[p] == kNever || i < tau[p]) alive.push_back(p);
        if (alive.empty()) continue;
        load_state(i);
        Eigen::VectorXd y(static_cast<Eigen::Index>(alive.size()));
        for (std::size_t r = 0; r < alive.size(); ++r)
            y(static_cast<Eigen::Index>(r)) =
                cash[alive[r]] / market.discount(i, alive[r]);
        const Eigen::VectorXd fit =
            regress(state, alive, y, instr.basis_degree, n_vars, &degraded);
        for (std::size_t r = 0; r < alive.size(); ++r)
            cube.value(i, alive[r]) =
                std::max(0.0, fit(static_cast<Eigen::Index>(r)));
    }

    if (diag) {
        diag->degree_used = instr.basis_degree;
        diag->degraded = degraded;
        double sum = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) sum += cash_r[p];
        diag->value_estimate = sum / static_cast<double>(n_paths);
    }
    return cube;
}

} // namespace cvax
