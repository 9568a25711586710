#include "doctest.h"

#include "cvax/errors.hpp"
#include "cvax/matrix_calibration.hpp"

using namespace cvax;

namespace {

PDTable table1() {
    PDTable t;
    t.ratings = {"A", "B", "C"};
    t.tenors = {1, 2, 5, 10};
    t.pd.resize(4, 3);
    t.pd << 0.0031, 0.0172, 0.0628,
            0.0072, 0.0427, 0.1180,
            0.0260, 0.1300, 0.2560,
            0.0700, 0.3000, 0.4800;
    return t;
}

} // namespace

TEST_CASE("weighted rms and default weights") {
    const PDTable t = table1();
    const Eigen::MatrixXd w = default_pd_weights(t);
    REQUIRE(w.rows() == 4);
    REQUIRE(w.cols() == 3);
    // 1/tenor normalized over tenors, same for every rating column
    const double norm = 1.0 / 1 + 1.0 / 2 + 1.0 / 5 + 1.0 / 10;
    CHECK(w(0, 0) == doctest::Approx((1.0 / 1) / norm));
    CHECK(w(2, 1) == doctest::Approx((1.0 / 5) / norm));
    CHECK(w.col(0) == w.col(2));

    Eigen::MatrixXd e = Eigen::MatrixXd::Constant(4, 3, 0.5);
    CHECK(weighted_rms(e, w) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("small matrix calibration hits the targets") {
    const PDTable t = table1();
    const MatrixFitResult fit = risk_neutralize_matrix(t, default_pd_weights(t));
    fit.matrix.validate(1e-9);
    // Short tenors carry the weight; the fit must nail them. The 5y/10y
    // points carry non-Markovian structure no single annual matrix can
    // absorb (the best minimax fit over all valid matrices misses them
    // by ~1.4%), so the long end only has to stay within that regime.
    CHECK(fit.diagnostics.residuals.topRows(2).cwiseAbs().maxCoeff() < 0.0025);
    CHECK(fit.diagnostics.residuals.cwiseAbs().maxCoeff() < 0.018);
    CHECK(fit.diagnostics.weighted_rms < 0.005);

    // year-1 fitted PD is exactly the default column
    const PropagationResult prop = propagate_matrix(fit.matrix, 1);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(prop.pd(r, 1) ==
              doctest::Approx(fit.matrix.q(static_cast<Eigen::Index>(r), 3))
                  .epsilon(1e-12));
}

TEST_CASE("zero targets give a zero default column") {
    PDTable t = table1();
    t.pd.setZero();
    const MatrixFitResult fit = risk_neutralize_matrix(t, default_pd_weights(t));
    fit.matrix.validate(1e-9);
    for (Eigen::Index r = 0; r < 3; ++r)
        CHECK(fit.matrix.q(r, 3) < 1e-8);
    CHECK(fit.diagnostics.weighted_rms < 1e-8);
}

TEST_CASE("pd table csv round trip") {
    const PDTable t = table1();
    const PDTable back = PDTable::from_csv_text(t.to_csv_text());
    CHECK(back.ratings == t.ratings);
    CHECK(back.tenors == t.tenors);
    CHECK((back.pd - t.pd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("malformed pd table names the line") {
    CHECK_THROWS_WITH_AS(
        PDTable::from_csv_text("P(Default),A\n1,0.1\noops,\n"),
        doctest::Contains("line"), InputError);
}
