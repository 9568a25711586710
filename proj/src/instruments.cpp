#include "cvax/instruments.hpp"
#include "cvax/errors.hpp"
#include "cvax/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cvax {

double CashflowInstrument::last_pay_time() const {
    double last = 0.0;
    for (const auto& f : fixed) last = std::max(last, f.pay_time);
    for (const auto& f : floating) last = std::max(last, f.accrual_end);
    return last;
}

std::vector<double> CashflowInstrument::event_dates() const {
    std::vector<double> out;
    for (const auto& f : fixed) out.push_back(f.pay_time);
    for (const auto& f : floating) {
        out.push_back(f.accrual_start);
        out.push_back(f.accrual_end);
    }
    return out;
}

namespace {
// Key times at fixed resolution so float noise cannot split a date.
long long time_key(double t) {
    return static_cast<long long>(std::llround(t / TimeGrid::kDedupTol));
}
} // namespace

void CashflowInstrument::normalize() {
    std::map<long long, double> fixed_by_date;
    for (const auto& f : fixed) fixed_by_date[time_key(f.pay_time)] += f.amount;
    fixed.clear();
    for (const auto& [k, amount] : fixed_by_date)
        fixed.push_back({static_cast<double>(k) * TimeGrid::kDedupTol, amount});

    std::map<std::pair<long long, long long>, double> float_by_period;
    std::vector<FloatingFlow> spreadless;
    for (const auto& f : floating) {
        // Fold the deterministic spread piece into a fixed amount.
        if (f.spread != 0.0) {
            const double accrual = f.accrual_end - f.accrual_start;
            fixed.push_back({f.accrual_end, f.notional * f.spread * accrual});
        }
        float_by_period[{time_key(f.accrual_start), time_key(f.accrual_end)}] +=
            f.notional;
    }
    floating.clear();
    for (const auto& [k, notional] : float_by_period)
        floating.push_back({static_cast<double>(k.first) * TimeGrid::kDedupTol,
                            static_cast<double>(k.second) * TimeGrid::kDedupTol,
                            notional, 0.0});

    std::sort(fixed.begin(), fixed.end(),
              [](const FixedFlow& a, const FixedFlow& b) {
                  return a.pay_time < b.pay_time;
              });
    // Spread folding may have added duplicate fixed dates; merge once more.
    std::vector<FixedFlow> merged;
    for (const auto& f : fixed) {
        if (!merged.empty() &&
            std::abs(merged.back().pay_time - f.pay_time) <= TimeGrid::kDedupTol)
            merged.back().amount += f.amount;
        else
            merged.push_back(f);
    }
    fixed = std::move(merged);
    std::sort(floating.begin(), floating.end(),
              [](const FloatingFlow& a, const FloatingFlow& b) {
                  return a.accrual_end < b.accrual_end;
              });
}

CashflowInstrument make_vanilla_swap(const std::string& id, double notional,
                                     double fixed_rate, double start,
                                     double end, int fixed_periods_per_year,
                                     int float_periods_per_year,
                                     bool pay_fixed) {
    require(end > start && start >= 0.0, "swap needs 0 <= start < end");
    require(fixed_periods_per_year > 0 && float_periods_per_year > 0,
            "swap frequencies must be positive");
    const double sign_fixed = pay_fixed ? -1.0 : 1.0;

    CashflowInstrument swap;
    swap.id = id;
    const double tenor = end - start;

    const int n_fixed =
        static_cast<int>(std::llround(tenor * fixed_periods_per_year));
    require(std::abs(n_fixed / static_cast<double>(fixed_periods_per_year) -
                     tenor) < 1e-9,
            "swap tenor must be a whole number of fixed periods");
    const double dt_fixed = 1.0 / fixed_periods_per_year;
    for (int k = 1; k <= n_fixed; ++k)
        swap.fixed.push_back(
            {start + k * dt_fixed, sign_fixed * notional * fixed_rate * dt_fixed});

    const int n_float =
        static_cast<int>(std::llround(tenor * float_periods_per_year));
    require(std::abs(n_float / static_cast<double>(float_periods_per_year) -
                     tenor) < 1e-9,
            "swap tenor must be a whole number of float periods");
    const double dt_float = 1.0 / float_periods_per_year;
    for (int k = 1; k <= n_float; ++k)
        swap.floating.push_back({start + (k - 1) * dt_float,
                                 start + k * dt_float, -sign_fixed * notional,
                                 0.0});
    return swap;
}

CashflowInstrument collapse_cashflows(
    const std::vector<CashflowInstrument>& deals) {
    CashflowInstrument out;
    out.id = "collapsed";
    for (const auto& d : deals) {
        out.fixed.insert(out.fixed.end(), d.fixed.begin(), d.fixed.end());
        out.floating.insert(out.floating.end(), d.floating.begin(),
                            d.floating.end());
    }
    out.normalize();
    return out;
}

void BermudanSwaption::validate() const {
    require(!exercise_dates.empty(), "Bermudan needs at least one exercise date");
    require(std::is_sorted(exercise_dates.begin(), exercise_dates.end()),
            "exercise dates must be ascending");
    require(!underlying.empty(), "Bermudan underlying swap is empty");
    require(basis_degree >= 0 && basis_degree <= 4,
            "regression basis degree out of range");
}

} // namespace cvax
