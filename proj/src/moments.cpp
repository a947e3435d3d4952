#include "cogarch/moments.hpp"

#include "cogarch/errors.hpp"

namespace cogarch {

namespace {

double variance_gap(const CogarchSpec& spec, const LevyMoments& moments) {
    const double gap = spec.b(spec.q - 1) - moments.mu * spec.a(0);
    if (!(gap > 0.0)) throw FeasibilityError("finite stationary variance requires b_q > mu*a1");
    return gap;
}

}  // namespace

double m_scalar(const CogarchSpec& spec, const LevyMoments& moments) {
    const Matrix M = lyapunov_integral(companion(spec, moments.mu).Atilde);
    return moments.rho * spec.a.dot(M * spec.a);
}

double theoretical_second_moment(const CogarchSpec& spec, const LevyMoments& moments, int r,
                                 double dt) {
    if (r < 1) throw ValueError("lag width must be >= 1");
    if (!(dt > 0.0)) throw ValueError("dt must be positive");
    const double tau = r * dt;
    return spec.a0 * spec.b(spec.q - 1) * tau * moments.mu / variance_gap(spec, moments);
}

AcfCurve acf_curve(const AcfInputs& in) {
    const CogarchSpec& spec = in.spec;
    const double mu = in.moments.mu;
    const double rho = in.moments.rho;
    if (in.r < 1) throw ValueError("lag width must be >= 1");
    if (in.max_lag < in.r) throw ValueError("max lag must be >= lag width");
    if (!(in.dt > 0.0)) throw ValueError("dt must be positive");

    const double gap = variance_gap(spec, in.moments);
    const CompanionMatrices cm = companion(spec, mu);
    const Matrix& At = cm.Atilde;
    if (spectral_abscissa(At) >= 0.0) throw StabilityError("Atilde is not stable");

    const Eigen::Index q = spec.q;
    const Matrix I = Matrix::Identity(q, q);
    const Vector& e = cm.e;
    const Vector& a = spec.a;

    const Matrix M = lyapunov_integral(At);
    const double m = rho * a.dot(M * a);
    if (!(m < 1.0)) throw FeasibilityError("m must be below 1");
    const Matrix cov = rho * M;

    const double tau = in.r * in.dt;
    const Eigen::PartialPivLU<Matrix> lu(At);
    const Matrix Er = expm(At * tau);
    const Matrix AinvErI = lu.solve(Er - I);    // Ã⁻¹(e^{Ãτ} − I)
    const Matrix B = AinvErI - tau * I;
    const Matrix AinvB = lu.solve(B);

    const double bq = spec.b(q - 1);
    const double pref = spec.a0 * spec.a0 * bq * bq / ((1.0 - m) * gap * gap);

    AcfCurve out;
    out.m = m;
    out.second_moment = theoretical_second_moment(spec, in.moments, in.r, in.dt);

    const Matrix P0 = 2.0 * mu * mu * (3.0 * AinvB - tau * tau * I) * cov;
    const Vector Q0 = 6.0 * mu * ((tau * I - AinvErI) * cov - AinvB * cov * At.transpose()) * e;
    const double R = 2.0 * tau * tau * mu * mu + rho * tau;
    out.variance_sq = pref * (a.dot(P0 * a) + a.dot(Q0) + R);

    // γ(h) = pref · aᵀ e^{Ãh} c, with c collecting the h-independent factors.
    const Vector inner = mu * mu * AinvErI * cov * a +
                         mu * ((I - Er) * cov - AinvErI * cov * At.transpose()) * e;
    const Vector c = lu.solve((I - expm(-At * tau)) * inner);

    const Matrix step = expm(At * in.dt);
    Vector x = expm(At * (in.r * in.dt)) * c;
    for (int h = in.r; h <= in.max_lag; ++h) {
        if (h > in.r) {
            x = (h - in.r) % 32 == 0 ? Vector(expm(At * (h * in.dt)) * c) : Vector(step * x);
        }
        const double g = pref * a.dot(x);
        out.lags.push_back(h);
        out.autocov.push_back(g);
        out.autocorr.push_back(g / out.variance_sq);
    }
    return out;
}

}  // namespace cogarch
