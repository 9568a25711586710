#include "cvax/zero_curve.hpp"
#include "cvax/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cvax {

ZeroCurve::ZeroCurve(std::vector<double> tenors, std::vector<double> zeros)
    : tenors_(std::move(tenors)), zeros_(std::move(zeros)) {
    require(!tenors_.empty(), "zero curve needs at least one pillar");
    require(tenors_.size() == zeros_.size(), "zero curve tenor/rate mismatch");
    require(std::is_sorted(tenors_.begin(), tenors_.end()),
            "zero curve tenors must be ascending");
    require(tenors_.front() > 0.0, "zero curve tenors must be positive");
}

ZeroCurve ZeroCurve::flat(double rate) { return ZeroCurve({1.0}, {rate}); }

ZeroCurve ZeroCurve::from_csv_text(const std::string& text) {
    std::vector<double> tenors, zeros;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
            throw InputError("zero curve line " + std::to_string(lineno) +
                             ": expected 'tenor,rate'");
        try {
            tenors.push_back(std::stod(a));
            zeros.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw InputError("zero curve line " + std::to_string(lineno) +
                             ": cannot parse numbers");
        }
    }
    return ZeroCurve(std::move(tenors), std::move(zeros));
}

ZeroCurve ZeroCurve::from_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open zero curve file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_csv_text(ss.str());
}

double ZeroCurve::zero_rate(double t) const {
    if (t <= tenors_.front()) return zeros_.front();
    if (t >= tenors_.back()) return zeros_.back();
    const auto it = std::upper_bound(tenors_.begin(), tenors_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tenors_.begin());
    const double w = (t - tenors_[i - 1]) / (tenors_[i] - tenors_[i - 1]);
    return zeros_[i - 1] + w * (zeros_[i] - zeros_[i - 1]);
}

double ZeroCurve::discount(double t) const {
    return std::exp(-zero_rate(t) * t);
}

double ZeroCurve::instantaneous_forward(double t) const {
    if (t <= tenors_.front() || tenors_.size() == 1) {
        // Flat short end: z constant, f = z.
        if (t <= tenors_.front()) return zeros_.front();
    }
    if (t >= tenors_.back()) return zeros_.back();
    const auto it = std::upper_bound(tenors_.begin(), tenors_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tenors_.begin());
    const double slope = (zeros_[i] - zeros_[i - 1]) / (tenors_[i] - tenors_[i - 1]);
    // f = d(t z)/dt = z(t) + t z'(t)
    return zero_rate(t) + t * slope;
}

ZeroCurve ZeroCurve::parallel_shift(double bump) const {
    std::vector<double> z = zeros_;
    for (double& v : z) v += bump;
    return ZeroCurve(tenors_, std::move(z));
}

} // namespace cvax
