#include "cvax/distributions.hpp"
#include "cvax/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace cvax {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, "normal quantile requires p in (0,1)");
    return boost::math::quantile(kStdNormal, p);
}

double student_t_cdf(double x, double nu) {
    require(nu > 0.0, "student-t degrees of freedom must be positive");
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_quantile(double p, double nu) {
    require(p > 0.0 && p < 1.0, "student-t quantile requires p in (0,1)");
    require(nu > 0.0, "student-t degrees of freedom must be positive");
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu),
                                 p);
}

double ReturnDistribution::cdf(double x) const {
    return fat_tail_df ? student_t_cdf(x, *fat_tail_df) : normal_cdf(x);
}

double ReturnDistribution::quantile(double p) const {
    return fat_tail_df ? student_t_quantile(p, *fat_tail_df)
                       : normal_quantile(p);
}

} // namespace cvax
