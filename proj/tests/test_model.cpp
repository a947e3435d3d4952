#include "doctest.h"

#include "cogarch/errors.hpp"
#include "cogarch/model.hpp"

#include <cmath>
#include <random>

using namespace cogarch;

namespace {

CogarchSpec cp_spec() {
    return build_spec(1, 1, {0.038}, {0.053}, 0.7547169811320755, CompoundPoissonNormal{1.0, 0.0, 1.0});
}

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("spec validation") {
    CHECK_NOTHROW((void)cp_spec());
    const auto flat = build_spec(1, 1, {0.0}, {1.0}, 1.0, CompoundPoissonNormal{});
    CHECK(flat.a(0) == 0.0);
    CHECK_THROWS_AS((void)build_spec(2, 1, {0.1, 0.1}, {1.0}, 1.0, CompoundPoissonNormal{}), OrderError);
    CHECK_THROWS_AS((void)build_spec(0, 1, {}, {1.0}, 1.0, CompoundPoissonNormal{}), OrderError);
    CHECK_THROWS_AS((void)build_spec(1, 1, {0.1}, {1.0}, 0.0, CompoundPoissonNormal{}), ValueError);
    CHECK_THROWS_AS((void)build_spec(1, 2, {0.1}, {1.0}, 1.0, CompoundPoissonNormal{}), ValueError);
}

TEST_CASE("a is padded to length q") {
    const auto s = build_spec(1, 3, {0.2}, {1.0, 2.0, 3.0}, 1.0, CompoundPoissonNormal{});
    REQUIRE(s.a.size() == 3);
    CHECK(s.a(1) == 0.0);
    CHECK(s.a(2) == 0.0);
}

TEST_CASE("companion matrices") {
    const auto c = companion(cp_spec(), 1.0);
    CHECK(c.A(0, 0) == doctest::Approx(-0.053));
    CHECK(c.Atilde(0, 0) == doctest::Approx(-0.015));
    const auto s2 = build_spec(1, 2, {0.1}, {1.5, 0.5}, 1.0, CompoundPoissonNormal{});
    const auto c2 = companion(s2, 0.0);
    CHECK(c2.A.isApprox(mat2(0, 1, -0.5, -1.5)));
    CHECK(c2.Atilde == c2.A);
    CHECK(c2.e(1) == 1.0);
}

TEST_CASE("eigen report") {
    const auto r1 = eigen_report(Matrix::Constant(1, 1, -0.053));
    CHECK(r1.eigenvalues(0).real() == doctest::Approx(-0.053));
    CHECK(r1.distinct);
    CHECK(r1.all_real);
    CHECK(r1.all_negative_real_part);

    const auto r2 = eigen_report(mat2(0, 1, -0.5, -1.5));
    CHECK(r2.eigenvalues(0).real() == doctest::Approx(-0.5));
    CHECK(r2.eigenvalues(1).real() == doctest::Approx(-1.0));
    CHECK(r2.distinct);
    CHECK(r2.all_real);
    // S is the Vandermonde matrix of the eigenvalues and diagonalises A.
    const ComplexMatrix d = r2.S_inv * mat2(0, 1, -0.5, -1.5).cast<std::complex<double>>() * r2.S;
    CHECK(std::abs(d(0, 1)) < 1e-12);
    CHECK(std::abs(d(1, 0)) < 1e-12);

    const auto r3 = eigen_report(mat2(0, 1, -1, -2));
    CHECK_FALSE(r3.distinct);
    CHECK(std::isinf(r3.condition_estimate));
}

TEST_CASE("stationarity of the reference CP spec") {
    const auto s = cp_spec();
    const auto res = check_stationarity(s, eigen_report(companion(s, 0.0).A));
    CHECK(res.status == TriState::holds);
    CHECK(res.lhs == doctest::Approx(0.0359).epsilon(0.01));
    CHECK(res.lhs_std_error > 0.0);
    CHECK(res.rhs == doctest::Approx(0.053));
}

TEST_CASE("stationarity fails with b1 = 0 and holds with a = 0") {
    const auto bad = build_spec(1, 1, {0.038}, {1e-300}, 1.0, CompoundPoissonNormal{});
    CHECK(check_stationarity(bad, eigen_report(companion(bad, 0.0).A)).status == TriState::fails);
    const auto flat = build_spec(1, 1, {0.0}, {1.0}, 1.0, CompoundPoissonNormal{});
    const auto res = check_stationarity(flat, eigen_report(companion(flat, 0.0).A));
    CHECK(res.status == TriState::holds);
    CHECK(res.lhs == 0.0);
}

TEST_CASE("stationarity under variance gamma is deterministic") {
    const auto s = build_spec(1, 1, {0.038}, {0.053}, 1.0, VarianceGamma{});
    const auto e = eigen_report(companion(s, 0.0).A);
    const auto x = check_stationarity(s, e, 2.0, 1000, 1);
    const auto y = check_stationarity(s, e, 2.0, 1000, 2);
    CHECK(x.lhs == y.lhs);
    CHECK(x.lhs_std_error == 0.0);
    CHECK(x.status == TriState::holds);
}

TEST_CASE("nonnegativity rules") {
    CHECK(check_nonnegativity(cp_spec(), eigen_report(companion(cp_spec(), 0.0).A)).status ==
          TriState::holds);

    const auto ok = build_spec(2, 2, {1.0, 1.0}, {1.5, 0.5}, 1.0, CompoundPoissonNormal{});
    const auto res_ok = check_nonnegativity(ok, eigen_report(companion(ok, 0.0).A));
    CHECK(res_ok.status == TriState::holds);
    CHECK(res_ok.rule == "rule1");

    const auto bad = build_spec(2, 2, {0.1, 1.0}, {1.5, 0.5}, 1.0, CompoundPoissonNormal{});
    const auto res_bad = check_nonnegativity(bad, eigen_report(companion(bad, 0.0).A));
    CHECK(res_bad.status == TriState::fails);
    CHECK(res_bad.rule == "rule1");
    CHECK(kernel_minimum(bad, eigen_report(companion(bad, 0.0).A)) < 0.0);
}

TEST_CASE("rule 1 agrees with the numeric kernel scan") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const auto s = build_spec(2, 2, {u(rng), u(rng)}, {1.5, 0.5}, 1.0, CompoundPoissonNormal{});
        const auto e = eigen_report(companion(s, 0.0).A);
        const auto res = check_nonnegativity(s, e);
        const bool numeric_ok = kernel_minimum(s, e) >= -1e-10;
        CHECK((res.status == TriState::holds) == numeric_ok);
    }
}

TEST_CASE("moment existence") {
    const auto s = cp_spec();
    const auto e = eigen_report(companion(s, 0.0).A);
    const auto k1 = check_moment_existence(s, e, 1);
    CHECK(k1.holds);
    CHECK(k1.lhs == doctest::Approx(0.038));
    const auto k2 = check_moment_existence(s, e, 2);
    CHECK(k2.holds);
    CHECK(k2.margin > 0.0);
    CHECK(k2.margin == doctest::Approx(0.02567).epsilon(1e-3));

    const auto flat = build_spec(1, 1, {0.0}, {1.0}, 1.0, CompoundPoissonNormal{});
    const auto ef = eigen_report(companion(flat, 0.0).A);
    for (int kappa : {1, 2, 3}) {
        const auto mc = check_moment_existence(flat, ef, kappa);
        CHECK(mc.holds);
        CHECK(mc.lhs == 0.0);
    }
}

TEST_CASE("stationary mean of the state") {
    const auto s = cp_spec();
    CHECK(stationary_mean_Y(s, 1.0)(0) == doctest::Approx(50.3145).epsilon(1e-5));
    CHECK(stationary_mean_Y(s, 0.0).isZero(0.0));
    const auto flat = build_spec(1, 1, {0.0}, {2.0}, 3.0, CompoundPoissonNormal{});
    CHECK(stationary_mean_Y(flat, 0.5)(0) == doctest::Approx(3.0 * 0.5 / 2.0));
}

TEST_CASE("stationary covariance of the state") {
    const auto s = cp_spec();
    const LevyMoments zero{1.0, 0.0};
    CHECK(stationary_cov_Y(s, zero).isZero(0.0));
    // Scalar case: Var Y = ρ·EV²/((1 − m)·2c) with c = b1 − μa1.
    const LevyMoments mom{1.0, 3.0};
    const double c = 0.053 - 0.038;
    const double m = 3.0 * 0.038 * 0.038 / (2.0 * c);
    const double ev = 0.7547169811320755 * 0.053 / c;
    CHECK(stationary_cov_Y(s, mom)(0, 0) == doctest::Approx(3.0 * ev * ev / ((1.0 - m) * 2.0 * c)));
}

TEST_CASE("diagnose collects every check") {
    const auto rep = diagnose(cp_spec(), {1, 2});
    CHECK(rep.stationary == TriState::holds);
    CHECK(rep.nonnegative_variance == TriState::holds);
    REQUIRE(rep.moments.size() == 2);
    CHECK(rep.moments[1].kappa == 2);
    CHECK(to_string(TriState::inconclusive) == "inconclusive");
}

}
