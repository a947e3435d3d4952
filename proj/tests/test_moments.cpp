#include "doctest.h"
#include "oracles.hpp"

#include "cogarch/errors.hpp"
#include "cogarch/moments.hpp"

#include <cmath>

using namespace cogarch;

namespace {

const LevyMoments kCp{1.0, 3.0};

CogarchSpec spec11(double a1, double b1, double a0 = 0.7547169811320755) {
    return build_spec(1, 1, {a1}, {b1}, a0, CompoundPoissonNormal{1.0, 0.0, 1.0});
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("m for the reference spec") {
    CHECK(m_scalar(spec11(0.038, 0.053), kCp) == doctest::Approx(3.0 * 0.038 * 0.038 / 0.03));
    CHECK(m_scalar(spec11(0.0, 0.053), kCp) == 0.0);
}

TEST_CASE("second moment is linear in r and a0") {
    const auto s = spec11(0.038, 0.053);
    const double base = theoretical_second_moment(s, kCp, 1);
    CHECK(base == doctest::Approx(2.6667).epsilon(1e-4));
    CHECK(theoretical_second_moment(s, kCp, 2) == doctest::Approx(2.0 * base).epsilon(1e-15));
    CHECK(theoretical_second_moment(spec11(0.038, 0.053, 2 * s.a0), kCp, 1) ==
          doctest::Approx(2.0 * base).epsilon(1e-15));
    CHECK(theoretical_second_moment(s, kCp, 3, 0.1) == doctest::Approx(0.3 * base).epsilon(1e-14));
    const auto flat = spec11(0.0, 1.0, 1.5);
    CHECK(theoretical_second_moment(flat, kCp, 4) == doctest::Approx(1.5 * 4.0));
}

TEST_CASE("matrix ACF matches the scalar closed form") {
    struct Set {
        double a1, b1, a0, mu, rho, dt;
        int r;
    };
    const Set sets[] = {
        {0.038, 0.053, 0.7547, 1.0, 3.0, 1.0, 1},
        {0.05, 0.08, 0.5, 1.0, 3.0, 1.0, 1},
        {0.03, 0.06, 1.2, 0.8, 2.0, 1.0 / 15.0, 2},
        {0.2, 1.0, 0.3, 1.0, 1.5, 0.5, 3},
    };
    for (const auto& st : sets) {
        AcfInputs in{spec11(st.a1, st.b1, st.a0), {st.mu, st.rho}, st.r, 20 + st.r, st.dt};
        const auto curve = acf_curve(in);
        const oracle::Acf11 o{st.a0, st.a1, st.b1, st.mu, st.rho};
        const double tau = st.r * st.dt;
        CHECK(curve.variance_sq == doctest::Approx(o.variance(tau)).epsilon(1e-10));
        CHECK(curve.second_moment == doctest::Approx(o.second_moment(tau)).epsilon(1e-12));
        for (std::size_t i = 0; i < curve.lags.size(); ++i) {
            const double ref = o.autocov(tau, curve.lags[i] * st.dt);
            CHECK(std::abs(curve.autocov[i] - ref) <= 1e-10 * std::abs(ref));
        }
    }
}

TEST_CASE("ACF decays geometrically for p = q = 1") {
    AcfInputs in{spec11(0.038, 0.053), kCp, 1, 80, 1.0};
    const auto curve = acf_curve(in);
    for (std::size_t i = 0; i + 1 < curve.autocorr.size(); ++i) {
        CHECK(curve.autocorr[i + 1] / curve.autocorr[i] == doctest::Approx(std::exp(-0.015)).epsilon(1e-12));
        CHECK(curve.autocorr[i] > 0.0);
        CHECK(curve.autocorr[i] <= 1.0);
    }
}

TEST_CASE("an order-two model with a cancelling factor equals its order-one reduction") {
    // b(z) = (z + c1)(z + c2) and a(z) = a2 (z + c2) give the kernel a2 e^{-c1 t}.
    const double c1 = 0.06, c2 = 0.9, a2 = 0.04, a0 = 0.8;
    const auto big = build_spec(2, 2, {a2 * c2, a2}, {c1 + c2, c1 * c2}, a0, CompoundPoissonNormal{});
    const auto small = spec11(a2, c1, a0);
    for (double dt : {1.0, 0.25}) {
        const auto x = acf_curve({big, kCp, 1, 40, dt});
        const auto y = acf_curve({small, kCp, 1, 40, dt});
        CHECK(x.m == doctest::Approx(y.m).epsilon(1e-10));
        CHECK(x.variance_sq == doctest::Approx(y.variance_sq).epsilon(1e-9));
        for (std::size_t i = 0; i < x.autocov.size(); ++i)
            CHECK(std::abs(x.autocov[i] - y.autocov[i]) <= 1e-8 * std::abs(y.autocov[i]));
    }
}

TEST_CASE("long lag propagation stays on the closed form") {
    const oracle::Acf11 o{0.7547, 0.038, 0.053, 1.0, 3.0};
    const auto curve = acf_curve({spec11(0.038, 0.053, 0.7547), kCp, 1, 200, 1.0});
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        const double ref = o.autocov(1.0, curve.lags[i]);
        CHECK(std::abs(curve.autocov[i] - ref) <= 1e-10 * std::abs(ref));
    }
}

TEST_CASE("order-two autocorrelations stay within [-1, 1]") {
    const auto s = build_spec(2, 2, {0.05, 0.02}, {1.2, 0.3}, 1.0, CompoundPoissonNormal{});
    const auto full = acf_curve({s, kCp, 1, 150, 1.0});
    for (double v : full.autocorr) {
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }
}

TEST_CASE("a = 0 gives a flat ACF") {
    const auto curve = acf_curve({spec11(0.0, 1.0, 1.0), kCp, 1, 10, 1.0});
    for (double g : curve.autocov) CHECK(g == 0.0);
    CHECK(curve.variance_sq > 0.0);
}

TEST_CASE("infeasible inputs") {
    CHECK_THROWS_AS((void)acf_curve({spec11(0.06, 0.053), kCp, 1, 5, 1.0}), FeasibilityError);
    // m ≥ 1: 3·0.1²/(2·0.01) = 1.5
    CHECK_THROWS_AS((void)acf_curve({spec11(0.1, 0.11), kCp, 1, 5, 1.0}), FeasibilityError);
    CHECK_THROWS_AS((void)acf_curve({spec11(0.038, 0.053), kCp, 3, 2, 1.0}), ValueError);
}

}
