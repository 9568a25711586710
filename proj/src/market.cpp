#include "cvax/market.hpp"
#include "cvax/errors.hpp"
#include "cvax/rng.hpp"

#include <cmath>

namespace cvax {

namespace {

// g(x) = (1 - e^-x) / x, stable near 0.
double g_exp(double x) {
    if (std::abs(x) < 1e-4)
        return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return -std::expm1(-x) / x;
}

// (1 - 2 g(x) + g(2x)) / x^2, the cancellation-prone combination in the
// variance of the integrated Ornstein-Uhlenbeck state.
double c2_term(double x) {
    if (std::abs(x) < 1e-3)
        return 1.0 / 3.0 - x / 4.0 + 7.0 * x * x / 60.0 - x * x * x / 24.0;
    return (1.0 - 2.0 * g_exp(x) + g_exp(2.0 * x)) / (x * x);
}

} // namespace

void HullWhiteParams::validate() const {
    require(volatility >= 0.0, "short-rate volatility must be non-negative");
    require(mean_reversion >= 0.0, "mean reversion must be non-negative");
}

HullWhiteParams shift_market_params(const HullWhiteParams& params,
                                    const MarketBump& bump) {
    require(std::isfinite(bump.curve_shift) && std::isfinite(bump.vol_shift),
            "market bump must be finite");
    HullWhiteParams out = params;
    out.curve = params.curve.parallel_shift(bump.curve_shift);
    out.volatility = params.volatility + bump.vol_shift;
    out.validate();
    return out;
}

MarketScenarioSet generate_market_scenarios(const HullWhiteParams& params,
                                            const TimeGrid& grid,
                                            std::size_t n_paths,
                                            std::uint64_t seed,
                                            const FactorModel& factors) {
    params.validate();
    require(n_paths >= 1, "need at least one path");
    require(grid.size() >= 2, "grid needs at least two points");
    require(factors.n_market() >= 1, "factor model has no market row");

    const std::size_t n_times = grid.size();
    const std::size_t n_sys = factors.n_systematic();
    const Eigen::RowVectorXd mkt_load = factors.market_loadings.row(0);
    const double mkt_idio = factors.market_idio(0);

    MarketScenarioSet set;
    set.grid_ = grid;
    set.n_paths_ = n_paths;
    set.n_systematic_ = n_sys;
    set.seed_ = seed;
    set.params_ = params;
    set.short_rate_.resize(n_times * n_paths);
    set.discount_.resize(n_times * n_paths);
    set.systematic_.resize((n_times - 1) * n_paths * n_sys);

    const double a = params.mean_reversion;
    const double sigma = params.volatility;
    const ZeroCurve& curve = params.curve;

    // Deterministic drift adjustment: alpha(t) = f(0,t) + 0.5 s^2 t^2 g(at)^2,
    // and its running integral Phi(t) = 0.5 s^2 t^3 c2(at). These make
    // E[exp(-int r)] match the input discount curve exactly.
    auto alpha = [&](double t) {
        const double gt = g_exp(a * t);
        return curve.instantaneous_forward(t) +
               0.5 * sigma * sigma * t * t * gt * gt;
    };
    auto phi = [&](double t) {
        return 0.5 * sigma * sigma * t * t * t * c2_term(a * t);
    };

    // x = zero-mean OU component, I = running integral of x.
    std::vector<double> x(n_paths, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        set.short_rate_[p] = alpha(0.0);
        set.discount_[p] = 1.0;
    }

    for (std::size_t i = 1; i < n_times; ++i) {
        const double t0 = grid[i - 1];
        const double t1 = grid[i];
        const double dt = t1 - t0;
        const double xad = a * dt;
        const double decay = std::exp(-xad);
        const double gdt = g_exp(xad);
        const double var_x = sigma * sigma * dt * g_exp(2.0 * xad);
        const double var_y = sigma * sigma * dt * dt * dt * c2_term(xad);
        const double cov_xy = 0.5 * sigma * sigma * dt * dt * gdt * gdt;
        const double det_step = (curve.integrated_forward(t1) -
                                 curve.integrated_forward(t0)) +
                                (phi(t1) - phi(t0));
        const double sd_x = std::sqrt(var_x);
        const double beta = var_x > 0.0 ? cov_xy / var_x : 0.0;
        const double resid =
            std::sqrt(std::max(0.0, var_y - beta * cov_xy));
        const double r_det = alpha(t1);

        for (std::size_t p = 0; p < n_paths; ++p) {
            double z = 0.0;
            for (std::size_t s = 0; s < n_sys; ++s) {
                const double w = normal_draw(seed, DrawStream::Systematic,
                                             pack32(i, s), p);
                set.systematic_[((i - 1) * n_paths + p) * n_sys + s] = w;
                z += mkt_load(static_cast<Eigen::Index>(s)) * w;
            }
            if (mkt_idio != 0.0)
                z += mkt_idio *
                     normal_draw(seed, DrawStream::MarketIdiosyncratic, i, p);
            const double z2 =
                normal_draw(seed, DrawStream::MarketAux, i, p);

            const double eps_x = sd_x * z;
            const double eps_y = beta * eps_x + resid * z2;
            const double y_step = x[p] * dt * gdt + eps_y;

            x[p] = x[p] * decay + eps_x;
            set.short_rate_[i * n_paths + p] = r_det + x[p];
            set.discount_[i * n_paths + p] =
                set.discount_[(i - 1) * n_paths + p] *
                std::exp(-(det_step + y_step));
        }
    }
    return set;
}

} // namespace cvax
