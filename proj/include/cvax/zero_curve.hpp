#ifndef CVAX_ZERO_CURVE_HPP
#define CVAX_ZERO_CURVE_HPP

#include <string>
#include <vector>

namespace cvax {

// Continuously compounded zero curve, linear in the zero rate between
// pillars, flat extrapolation on both ends.
class ZeroCurve {
public:
    ZeroCurve() = default;
    ZeroCurve(std::vector<double> tenors, std::vector<double> zeros);

    static ZeroCurve flat(double rate);

    // Comma-separated (tenor, zero rate) pairs, one per line, '#' comments.
    static ZeroCurve from_file(const std::string& path);
    static ZeroCurve from_csv_text(const std::string& text);

    double zero_rate(double t) const;
    double discount(double t) const; // exp(-z(t) * t)
    // Instantaneous forward f(0,t) = d(t z(t))/dt, piecewise linear.
    double instantaneous_forward(double t) const;
    // Integral of f(0,s) over [0,t] = z(t) * t.
    double integrated_forward(double t) const { return zero_rate(t) * t; }

    ZeroCurve parallel_shift(double bump) const;

    const std::vector<double>& tenors() const { return tenors_; }
    const std::vector<double>& zeros() const { return zeros_; }

private:
    std::vector<double> tenors_;
    std::vector<double> zeros_;
};

} // namespace cvax

#endif
