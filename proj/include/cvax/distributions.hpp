#ifndef CVAX_DISTRIBUTIONS_HPP
#define CVAX_DISTRIBUTIONS_HPP

#include <functional>
#include <optional>

namespace cvax {

double normal_cdf(double x);
double normal_quantile(double p);

// Student-t with nu degrees of freedom, standardized location/scale 1.
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

// Return distribution of a credit entity's standardized asset value:
// standard normal, or Student-t when fat_tail_df is set.
struct ReturnDistribution {
    std::optional<double> fat_tail_df;

    double cdf(double x) const;
    double quantile(double p) const;
};

} // namespace cvax

#endif
