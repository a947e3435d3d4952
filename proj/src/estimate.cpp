#include "cogarch/estimate.hpp"

#include "cogarch/errors.hpp"
#include "cogarch/kernels.hpp"
#include "cogarch/moments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cogarch {

std::vector<double> lag_increments(std::span<const double> G, int r) {
    if (r < 1) throw ValueError("lag width must be >= 1");
    if (G.size() <= static_cast<std::size_t>(r)) throw DataError("series shorter than the lag width");
    std::vector<double> out(G.size() - static_cast<std::size_t>(r));
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = G[n + static_cast<std::size_t>(r)] - G[n];
    return out;
}

std::vector<double> aggregate_increments(std::span<const double> lag_one, int r) {
    if (r < 1) throw ValueError("lag width must be >= 1");
    const auto w = static_cast<std::size_t>(r);
    if (lag_one.size() < w) throw DataError("series shorter than the lag width");
    std::vector<double> out(lag_one.size() - w + 1, 0.0);
    for (std::size_t n = 0; n < out.size(); ++n)
        for (std::size_t i = 0; i < w; ++i) out[n] += lag_one[n + i];
    return out;
}

int default_max_lag(std::size_t steps) {
    return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(steps)))));
}

EmpiricalAcf empirical_acf(std::span<const double> G, int r, int d) {
    if (r < 1 || d < 1) throw ValueError("lag width and max lag must be >= 1");
    if (G.empty()) throw DataError("empty series");
    const std::size_t N = G.size() - 1;
    if (N <= static_cast<std::size_t>(d + r)) throw DataError("series too short: need N > d + r");

    std::vector<double> y = lag_increments(G, r);
    for (double& v : y) v *= v;

    EmpiricalAcf acf;
    acf.r = r;
    acf.d = d;
    acf.terms = N - static_cast<std::size_t>(d + r) + 1;
    double sum = 0.0;
    for (std::size_t n = 0; n < acf.terms; ++n) sum += y[n];
    acf.mu_hat = sum / static_cast<double>(acf.terms);

    acf.centered.resize(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) acf.centered[n] = y[n] - acf.mu_hat;
    const auto products =
        kernels::lagged_products(acf.centered, acf.terms, static_cast<std::size_t>(d));
    acf.gamma_hat.resize(products.size());
    for (std::size_t h = 0; h < products.size(); ++h)
        acf.gamma_hat[h] = products[h] / static_cast<double>(acf.terms);
    if (!(acf.gamma_hat[0] > 1e-12 * acf.mu_hat * acf.mu_hat) || acf.gamma_hat[0] <= 0.0)
        throw DataError("squared increments have zero variance");
    acf.rho_hat.resize(static_cast<std::size_t>(d));
    for (int h = 1; h <= d; ++h)
        acf.rho_hat[static_cast<std::size_t>(h - 1)] = acf.gamma_hat[static_cast<std::size_t>(h)] / acf.gamma_hat[0];
    return acf;
}

MomentData prepare_moments(std::span<const double> G, double dt, int r, int d) {
    if (!(dt > 0.0)) throw ValueError("dt must be positive");
    if (d < r) throw ValueError("max lag must be >= lag width");
    MomentData out;
    out.acf = empirical_acf(G, r, d);
    out.dt = dt;
    for (int h = r; h <= d; ++h) out.lags.push_back(h);

    const auto k = static_cast<Eigen::Index>(out.lags.size());
    out.rho_hat.resize(k);
    for (Eigen::Index i = 0; i < k; ++i)
        out.rho_hat(i) = out.acf.rho_hat[static_cast<std::size_t>(out.lags[static_cast<std::size_t>(i)] - 1)];

    const auto gram =
        kernels::lagged_gram(out.acf.centered, out.acf.terms, static_cast<std::size_t>(d));
    const double g0 = out.acf.gamma_hat[0];
    const double scale = 1.0 / (static_cast<double>(out.acf.terms) * g0 * g0);
    out.omega.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto hi = static_cast<std::size_t>(out.lags[static_cast<std::size_t>(i)] - 1);
            const auto hj = static_cast<std::size_t>(out.lags[static_cast<std::size_t>(j)] - 1);
            out.omega(i, j) = gram[hi * static_cast<std::size_t>(d) + hj] * scale -
                              out.rho_hat(i) * out.rho_hat(j);
        }
    }
    return out;
}

std::string objective_name(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::l1: return "L1";
        case ObjectiveKind::l2: return "L2";
        case ObjectiveKind::l2cue: break;
    }
    return "L2CUE";
}

ObjectiveKind parse_objective(const std::string& name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "l1") return ObjectiveKind::l1;
    if (s == "l2") return ObjectiveKind::l2;
    if (s == "l2cue" || s == "cue") return ObjectiveKind::l2cue;
    throw ValueError("unknown objective: " + name);
}

CogarchSpec spec_from_theta(const CogarchSpec& tmpl, std::span<const double> theta, double a0) {
    if (theta.size() != static_cast<std::size_t>(tmpl.p + tmpl.q))
        throw ValueError("parameter vector must have length p + q");
    CogarchSpec s = tmpl;
    s.a0 = a0;
    s.a = Vector::Zero(tmpl.q);
    for (int i = 0; i < tmpl.q; ++i) s.b(i) = theta[static_cast<std::size_t>(i)];
    for (int i = 0; i < tmpl.p; ++i) s.a(i) = theta[static_cast<std::size_t>(tmpl.q + i)];
    return s;
}

std::vector<double> theta_of(const CogarchSpec& spec) {
    std::vector<double> t(spec.b.data(), spec.b.data() + spec.q);
    for (int i = 0; i < spec.p; ++i) t.push_back(spec.a(i));
    return t;
}

std::vector<std::string> theta_names(int p, int q) {
    std::vector<std::string> n;
    for (int i = 1; i <= q; ++i) n.push_back("b" + std::to_string(i));
    for (int i = 1; i <= p; ++i) n.push_back("a" + std::to_string(i));
    return n;
}

Vector moment_vector(const CogarchSpec& spec, const LevyMoments& moments, const MomentData& data) {
    AcfInputs in{spec, moments, data.acf.r, data.acf.d, data.dt};
    const AcfCurve curve = acf_curve(in);
    Vector g(static_cast<Eigen::Index>(data.lags.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = curve.autocorr[static_cast<std::size_t>(i)] - data.rho_hat(i);
    return g;
}

Matrix moment_covariance(const Vector& g, const MomentData& data) {
    return g * g.transpose() + data.omega;
}

Matrix cue_weight(const Matrix& S) {
    const Matrix reg = S + 1e-8 * S.trace() * Matrix::Identity(S.rows(), S.cols());
    const Eigen::LDLT<Matrix> ldlt(reg);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularError("moment covariance is not positive definite");
    return ldlt.solve(Matrix::Identity(S.rows(), S.cols()));
}

double objective_value(const Vector& g, ObjectiveKind kind, const Matrix* weight) {
    switch (kind) {
        case ObjectiveKind::l1: return g.cwiseAbs().sum();
        case ObjectiveKind::l2: return g.squaredNorm();
        case ObjectiveKind::l2cue: break;
    }
    if (weight == nullptr) throw ValueError("the CUE objective needs a weight matrix");
    return g.dot(*weight * g);
}

double gmm_objective(std::span<const double> theta, const CogarchSpec& tmpl, const LevyMoments& moments,
                     const MomentData& data, ObjectiveKind kind) {
    const CogarchSpec spec = spec_from_theta(tmpl, theta);
    const double gap = spec.b(spec.q - 1) - moments.mu * spec.a(0);
    if (!(gap > 0.0)) return kInfeasiblePenalty * (1.0 - gap);

    const CompanionMatrices cm = companion(spec, moments.mu);
    const double abscissa = spectral_abscissa(cm.Atilde);
    if (!(abscissa < 0.0)) return kInfeasiblePenalty * (1.0 + abscissa);

    const double m = moments.rho * spec.a.dot(lyapunov_integral(cm.Atilde) * spec.a);
    if (!(m < 1.0)) return kInfeasiblePenalty * m;

    if (spec.q > 1) {
        const EigenReport eig = eigen_report(cm.A);
        if (check_nonnegativity(spec, eig).status == TriState::fails) {
            double violation = 1.0;
            if (eig.all_negative_real_part) violation = std::max(violation, -kernel_minimum(spec, eig));
            return kInfeasiblePenalty * (1.0 + violation);
        }
    }

    try {
        const Vector g = moment_vector(spec, moments, data);
        double v;
        if (kind == ObjectiveKind::l2cue) {
            const Matrix W = cue_weight(moment_covariance(g, data));
            v = objective_value(g, kind, &W);
        } else {
            v = objective_value(g, kind);
        }
        return std::isfinite(v) ? v : 2.0 * kInfeasiblePenalty;
    } catch (const Error&) {
        return 2.0 * kInfeasiblePenalty;
    }
}

Matrix weighted_sandwich_vcov(const Matrix& D, const Matrix& W, const Matrix& S, double n) {
    const Matrix bread = D.transpose() * W * D;
    const Eigen::FullPivLU<Matrix> lu(bread);
    if (!lu.isInvertible()) throw SingularError("DᵀWD is singular");
    const Matrix inv = lu.inverse();
    return inv * D.transpose() * W * S * W * D * inv / n;
}

Matrix sandwich_vcov(const Matrix& D, const Matrix& S, double n) {
    return weighted_sandwich_vcov(D, Matrix::Identity(D.rows(), D.rows()), S, n);
}

Matrix efficient_vcov(const Matrix& D, const Matrix& S, double n) {
    const Eigen::FullPivLU<Matrix> slu(S);
    if (!slu.isInvertible()) throw SingularError("moment covariance is singular");
    const Matrix info = D.transpose() * slu.solve(D);
    const Eigen::FullPivLU<Matrix> lu(info);
    if (!lu.isInvertible()) throw SingularError("DᵀS⁻¹D is singular");
    return lu.inverse() / n;
}

Matrix moment_jacobian(std::span<const double> theta, const CogarchSpec& tmpl, const LevyMoments& moments,
                       const MomentData& data) {
    const auto k = static_cast<Eigen::Index>(theta.size());
    Matrix D(static_cast<Eigen::Index>(data.lags.size()), k);
    std::vector<double> x(theta.begin(), theta.end());
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        double h = 1e-5 * std::max(1.0, std::abs(theta[ju]));
        // Near the edge of the admissible region the probes may leave it; halve the step until both fit.
        for (int attempt = 0;; ++attempt) {
            try {
                x[ju] = theta[ju] + h;
                const Vector up = moment_vector(spec_from_theta(tmpl, x), moments, data);
                x[ju] = theta[ju] - h;
                const Vector down = moment_vector(spec_from_theta(tmpl, x), moments, data);
                D.col(j) = (up - down) / (2.0 * h);
                break;
            } catch (const Error&) {
                if (attempt >= 40) throw;
                h *= 0.5;
            }
        }
        x[ju] = theta[ju];
    }
    return D;
}

std::optional<Matrix> vcov_gmm(std::span<const double> theta, const CogarchSpec& tmpl,
                               const LevyMoments& moments, const MomentData& data, ObjectiveKind kind) {
    if (kind == ObjectiveKind::l1) return std::nullopt;
    const Matrix D = moment_jacobian(theta, tmpl, moments, data);
    const Vector g = moment_vector(spec_from_theta(tmpl, theta), moments, data);
    const Matrix S = moment_covariance(g, data);
    const auto n = static_cast<double>(data.acf.terms);
    return kind == ObjectiveKind::l2 ? sandwich_vcov(D, S, n) : efficient_vcov(D, S, n);
}

NoiseRecovery recover_noise(const CogarchSpec& spec, std::span<const double> G, double dt, double mu) {
    if (!(dt > 0.0)) throw ValueError("dt must be positive");
    if (G.size() < 2) throw DataError("need at least two observations");
    const Matrix E = expm(companion(spec, 0.0).A * dt);
    const Eigen::Index last = spec.q - 1;
    const std::size_t N = G.size() - 1;

    NoiseRecovery out;
    out.increments.resize(N);
    out.V.resize(N);
    out.Y.resize(static_cast<Eigen::Index>(N + 1), spec.q);
    Vector y = stationary_mean_Y(spec, mu);
    out.Y.row(0) = y.transpose();
    for (std::size_t n = 1; n <= N; ++n) {
        const double dg = G[n] - G[n - 1];
        const double v = spec.a0 + spec.a.dot(y);
        if (!(v > 0.0))
            throw NumericalError("non-positive variance at step " + std::to_string(n));
        out.V[n - 1] = v;
        out.increments[n - 1] = dg / std::sqrt(v);
        y(last) += dg * dg;
        y = E * y;
        out.Y.row(static_cast<Eigen::Index>(n)) = y.transpose();
    }
    return out;
}

Recover parse_recover(const std::string& name) {
    if (name == "none") return Recover::none;
    if (name == "incr" || name == "increments") return Recover::increments;
    if (name == "incr+levy" || name == "increments+levy") return Recover::increments_levy;
    throw ValueError("unknown recovery mode: " + name);
}

std::string recover_name(Recover r) {
    switch (r) {
        case Recover::none: return "none";
        case Recover::increments: return "incr";
        case Recover::increments_levy: break;
    }
    return "incr+levy";
}

GmmFit gmm(std::span<const double> G, double dt, const CogarchSpec& tmpl, std::span<const double> start,
           const GmmOptions& options) {
    if (!is_symmetric_centered(tmpl.levy))
        throw ValueError("estimation requires a symmetric centered driver");
    const std::size_t k = static_cast<std::size_t>(tmpl.p + tmpl.q);
    if (start.size() != k) throw ValueError("start must have length p + q");
    if (G.size() < 2) throw DataError("need at least two observations");

    const LevyMoments raw = levy_moments(tmpl.levy);
    if (!(raw.mu > 0.0)) throw ValueError("driver has a trivial Levy measure");
    const LevyMoments unit{1.0, raw.rho / (raw.mu * raw.mu)};

    const std::size_t N = G.size() - 1;
    const int d = options.d > 0 ? options.d : default_max_lag(N);

    GmmFit fit;
    fit.kind = options.kind;
    fit.names = theta_names(tmpl.p, tmpl.q);
    fit.data = prepare_moments(G, dt, options.r, d);

    std::vector<double> lower = options.lower.empty() ? std::vector<double>(k, 1e-8) : options.lower;
    std::vector<double> upper = options.upper.empty() ? std::vector<double>(k, 1e4) : options.upper;
    if (lower.size() != k || upper.size() != k) throw ValueError("bounds must have length p + q");
    for (std::size_t i = 0; i < k; ++i)
        if (!(start[i] >= lower[i] && start[i] <= upper[i])) throw ValueError("start lies outside the bounds");

    const Objective f = [&](std::span<const double> theta) {
        return gmm_objective(theta, tmpl, unit, fit.data, options.kind);
    };
    const OptimResult res = minimize_positive(f, start, lower, upper, options.optimizer);
    if (!(res.value < kInfeasiblePenalty)) throw FeasibilityError("no feasible parameter found");

    fit.theta = res.x;
    fit.objective = res.value;
    fit.log_objective = std::log(res.value);
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    fit.evaluations = res.evaluations;

    CogarchSpec est = spec_from_theta(tmpl, fit.theta);
    const double bq = est.b(est.q - 1);
    const double tau = options.r * dt;
    fit.a0 = fit.data.acf.mu_hat * (bq - unit.mu * est.a(0)) / (bq * tau * unit.mu);
    est.a0 = fit.a0;

    try {
        fit.vcov = vcov_gmm(fit.theta, tmpl, unit, fit.data, options.kind);
    } catch (const Error& err) {
        fit.notes.push_back(std::string("standard errors unavailable: ") + err.what());
    }

    if (options.recover != Recover::none) {
        fit.noise = recover_noise(est, G, dt, unit.mu);
        if (options.recover == Recover::increments_levy) {
            try {
                fit.levy_fit = fit_levy_mle(family_of(tmpl.levy), fit.noise->increments, dt, tmpl.levy,
                                            options.threads);
                est.levy = fit.levy_fit->params;
            } catch (const ConvergenceError& err) {
                fit.notes.push_back(std::string("driver fit did not converge: ") + err.what());
            }
        }
    }
    fit.spec = std::move(est);
    return fit;
}

}  // namespace cogarch
