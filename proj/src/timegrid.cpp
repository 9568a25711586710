#include "cvax/timegrid.hpp"
#include "cvax/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cvax {

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - kDedupTol);
    if (it == times.end() || std::abs(*it - t) > kDedupTol)
        throw InputError("time " + std::to_string(t) + " not on grid");
    return static_cast<std::size_t>(it - times.begin());
}

bool TimeGrid::contains(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - kDedupTol);
    return it != times.end() && std::abs(*it - t) <= kDedupTol;
}

DensityRule DensityRule::standard() {
    return DensityRule{{{1.0, 1.0 / 12.0}, {5.0, 0.25}, {1e308, 1.0}}};
}

TimeGrid build_time_grid(double horizon,
                         const std::vector<double>& cashflow_dates,
                         const std::vector<double>& exercise_dates,
                         const DensityRule& rule) {
    require(horizon > 0.0, "time grid horizon must be positive");
    for (std::size_t s = 1; s < rule.stages.size(); ++s)
        require(rule.stages[s].step >= rule.stages[s - 1].step,
                "density rule steps must be non-decreasing with horizon");

    struct Point {
        double t;
        PointTag tag;
    };
    std::vector<Point> pts;
    pts.push_back({0.0, PointTag::Synthetic});
    pts.push_back({horizon, PointTag::Synthetic});

    auto add_events = [&](const std::vector<double>& dates, PointTag tag) {
        for (double d : dates) {
            require(d >= -TimeGrid::kDedupTol && d <= horizon + TimeGrid::kDedupTol,
                    "event date " + std::to_string(d) + " beyond horizon " +
                        std::to_string(horizon));
            pts.push_back({std::clamp(d, 0.0, horizon), tag});
        }
    };
    add_events(cashflow_dates, PointTag::Cashflow);
    add_events(exercise_dates, PointTag::Exercise);

    // Synthetic points per density rule, walked stage by stage from 0.
    double t = 0.0;
    for (const auto& stage : rule.stages) {
        const double stop = std::min(stage.until, horizon);
        require(stage.step > 0.0, "density rule step must be positive");
        // Round the step count so accumulated float error cannot skip points.
        while (t + stage.step <= stop + TimeGrid::kDedupTol) {
            t += stage.step;
            pts.push_back({std::min(t, horizon), PointTag::Synthetic});
        }
        t = std::max(t, stop);
        if (t >= horizon - TimeGrid::kDedupTol) break;
    }

    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.t < b.t; });

    // Dedup within tolerance; event tags win over synthetic, exercise over cashflow.
    TimeGrid grid;
    for (const auto& p : pts) {
        if (!grid.times.empty() && p.t - grid.times.back() <= TimeGrid::kDedupTol) {
            if (static_cast<int>(p.tag) > static_cast<int>(grid.tags.back()))
                grid.tags.back() = p.tag;
            continue;
        }
        grid.times.push_back(p.t);
        grid.tags.push_back(p.tag);
    }
    return grid;
}

} // namespace cvax
