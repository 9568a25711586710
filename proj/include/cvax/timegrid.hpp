#ifndef CVAX_TIMEGRID_HPP
#define CVAX_TIMEGRID_HPP

#include <cstddef>
#include <vector>

namespace cvax {

enum class PointTag { Synthetic, Cashflow, Exercise };

// Valuation time grid, year-fractions from the valuation date.
// Always starts at 0, strictly increasing.
struct TimeGrid {
    static constexpr double kDedupTol = 1e-9;

    std::vector<double> times;
    std::vector<PointTag> tags;

    std::size_t size() const { return times.size(); }
    double operator[](std::size_t i) const { return times[i]; }
    double horizon() const { return times.back(); }
    double dt(std::size_t i) const { return times[i + 1] - times[i]; }

    // Index of the grid point at t (within kDedupTol); throws if absent.
    std::size_t index_of(double t) const;
    bool contains(double t) const;
};

// Synthetic point spacing: use `step` until `until` years, stages in order.
// Steps must be non-decreasing (denser near the front).
struct DensityRule {
    struct Stage {
        double until;
        double step;
    };
    std::vector<Stage> stages;

    // Monthly to 1y, quarterly to 5y, annual thereafter.
    static DensityRule standard();
};

TimeGrid build_time_grid(double horizon,
                         const std::vector<double>& cashflow_dates,
                         const std::vector<double>& exercise_dates,
                         const DensityRule& rule);

inline TimeGrid build_time_grid(double horizon,
                                const std::vector<double>& event_dates,
                                const DensityRule& rule) {
    return build_time_grid(horizon, event_dates, {}, rule);
}

} // namespace cvax

#endif
