#include "cogarch/levy.hpp"

#include "cogarch/errors.hpp"
#include "cogarch/optimize.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace cogarch {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_normal_pdf(double x, double mean, double var) {
    const double z = x - mean;
    return -kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * z * z / var;
}

// E[(eta + sigma Z)^k] for Z ~ N(0,1).
double normal_raw_moment(double eta, double sig2, int k) {
    const double sigma = std::sqrt(sig2);
    double total = 0.0;
    double dfact = 1.0;  // (i-1)!! for even i
    for (int i = 0; i <= k; i += 2) {
        if (i > 0) dfact *= static_cast<double>(i - 1);
        total += boost::math::binomial_coefficient<double>(static_cast<unsigned>(k),
                                                           static_cast<unsigned>(i)) *
                 std::pow(eta, k - i) * std::pow(sigma, i) * dfact;
    }
    return total;
}

// log K_nu(z), z > 0; large-argument asymptotic series beyond z = 50.
double log_bessel_k(double nu, double z) {
    nu = std::abs(nu);
    if (z > 50.0) {
        const double m = 4.0 * nu * nu;
        const double t = 8.0 * z;
        const double series = 1.0 + (m - 1.0) / t + (m - 1.0) * (m - 9.0) / (2.0 * t * t) +
                              (m - 1.0) * (m - 9.0) * (m - 25.0) / (6.0 * t * t * t);
        return 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z + std::log(series);
    }
    return std::log(boost::math::cyl_bessel_k(nu, z));
}

double cp_log_density(const CompoundPoissonNormal& cp, double x, double dt, double zero_tol) {
    const double lt = cp.lambda * dt;
    if (std::abs(x) <= zero_tol) return -lt;
    if (lt <= 0.0) return -std::numeric_limits<double>::infinity();
    const auto kmax = static_cast<int>(std::ceil(lt + 10.0 * std::sqrt(lt) + 20.0));
    // log-sum-exp over k ≥ 1 of Poisson(k; lt) · N(x; k·eta, k·sig2)
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(kmax));
    double top = -std::numeric_limits<double>::infinity();
    const double log_lt = std::log(lt);
    for (int k = 1; k <= kmax; ++k) {
        const double dk = static_cast<double>(k);
        const double t =
            -lt + dk * log_lt - std::lgamma(dk + 1.0) + log_normal_pdf(x, dk * cp.eta, dk * cp.sig2);
        terms.push_back(t);
        top = std::max(top, t);
    }
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    return top + std::log(acc);
}

double vg_log_density(const VarianceGamma& vg, double x, double dt, double zero_tol) {
    const double s = vg.lambda * dt;
    const double nu = s - 0.5;
    const double g2 = vg.alpha * vg.alpha - vg.beta * vg.beta;
    const double xc = x - vg.mu0 * dt;
    const double base = s * std::log(0.5 * g2) - std::lgamma(s) - kLogSqrt2Pi;
    double ax = std::abs(xc);
    if (ax <= zero_tol && nu > 0.0) {
        // (|x|/α)^ν K_ν(α|x|) → Γ(ν) 2^{ν−1} α^{−2ν}
        return base + std::log(2.0) + std::lgamma(nu) + (nu - 1.0) * std::log(2.0) -
               2.0 * nu * std::log(vg.alpha);
    }
    if (ax <= zero_tol) {
        // Unbounded density at zero: average it over [−δ, δ], δ = zero_tol, so values
        // below the data resolution do not dominate through log|x|.
        const double d = zero_tol;
        if (std::abs(nu) < 1e-9) {
            // K_0(z) ≈ −ln(z/2) − γ averaged over (0, αδ)
            return base + std::log(2.0) +
                   std::log(1.0 - std::numbers::egamma - std::log(0.5 * vg.alpha * d));
        }
        // (|x|/α)^ν K_ν(α|x|) ≈ Γ(−ν) 2^{−ν−1} |x|^{2ν}, whose mean over (0, δ) is that at δ over (2ν + 1)
        return base + std::log(2.0) + std::lgamma(-nu) + (-nu - 1.0) * std::log(2.0) + 2.0 * nu * std::log(d) -
               std::log(2.0 * nu + 1.0);
    }
    if (ax == 0.0) ax = std::numeric_limits<double>::min();
    return base + std::log(2.0) + vg.beta * xc + nu * (std::log(ax) - std::log(vg.alpha)) +
           log_bessel_k(nu, vg.alpha * ax);
}

}  // namespace

LevyFamily family_of(const LevySpec& levy) noexcept {
    return std::holds_alternative<CompoundPoissonNormal>(levy) ? LevyFamily::compound_poisson
                                                               : LevyFamily::variance_gamma;
}

std::string family_name(LevyFamily family) {
    return family == LevyFamily::compound_poisson ? "CompoundPoissonNormal" : "VarianceGamma";
}

void validate(const LevySpec& levy) {
    std::visit(Overloaded{
                   [](const CompoundPoissonNormal& cp) {
                       if (!(cp.lambda >= 0.0) || !std::isfinite(cp.lambda))
                           throw ValueError("compound Poisson: lambda must be >= 0");
                       if (!(cp.sig2 > 0.0) || !std::isfinite(cp.sig2))
                           throw ValueError("compound Poisson: sig2 must be > 0");
                       if (!std::isfinite(cp.eta)) throw ValueError("compound Poisson: eta");
                   },
                   [](const VarianceGamma& vg) {
                       if (!(vg.lambda > 0.0)) throw ValueError("variance gamma: lambda must be > 0");
                       if (!(vg.alpha > std::abs(vg.beta)))
                           throw ValueError("variance gamma: alpha must exceed |beta|");
                       if (!std::isfinite(vg.mu0)) throw ValueError("variance gamma: mu0");
                   },
               },
               levy);
}

bool is_symmetric_centered(const LevySpec& levy) noexcept {
    return std::visit(Overloaded{
                          [](const CompoundPoissonNormal& cp) { return cp.eta == 0.0; },
                          [](const VarianceGamma& vg) { return vg.beta == 0.0 && vg.mu0 == 0.0; },
                      },
                      levy);
}

double levy_measure_even_moment(const LevySpec& levy, int j) {
    if (j < 1) throw ValueError("levy_measure_even_moment: order must be >= 1");
    return std::visit(
        Overloaded{
            [j](const CompoundPoissonNormal& cp) {
                return cp.lambda * normal_raw_moment(cp.eta, cp.sig2, 2 * j);
            },
            // ν(dx) = λ e^{βx − α|x|} / |x|
            [j](const VarianceGamma& vg) {
                const double g = std::tgamma(2.0 * j);
                return vg.lambda * g *
                       (std::pow(vg.alpha - vg.beta, -2.0 * j) + std::pow(vg.alpha + vg.beta, -2.0 * j));
            },
        },
        levy);
}

LevyMoments levy_moments(const LevySpec& levy) {
    validate(levy);
    return {levy_measure_even_moment(levy, 1), levy_measure_even_moment(levy, 2)};
}

MeasureIntegral log_moment_integral(const LevySpec& levy, double k, std::size_t n_mc,
                                    std::uint64_t seed) {
    if (k == 0.0) return {};
    return std::visit(
        Overloaded{
            [&](const CompoundPoissonNormal& cp) -> MeasureIntegral {
                if (n_mc < 2) throw ValueError("log_moment_integral: need at least 2 draws");
                Rng rng(seed);
                std::normal_distribution<double> jump(cp.eta, std::sqrt(cp.sig2));
                double mean = 0.0;
                double m2 = 0.0;
                for (std::size_t i = 0; i < n_mc; ++i) {
                    const double l = jump(rng);
                    const double g = std::log1p(k * l * l);
                    const double delta = g - mean;
                    mean += delta / static_cast<double>(i + 1);
                    m2 += delta * (g - mean);
                }
                const double sd = std::sqrt(m2 / static_cast<double>(n_mc - 1));
                return {cp.lambda * mean, cp.lambda * sd / std::sqrt(static_cast<double>(n_mc))};
            },
            [&](const VarianceGamma& vg) -> MeasureIntegral {
                boost::math::quadrature::exp_sinh<double> integrator;
                const double am = vg.alpha - vg.beta;
                const double ap = vg.alpha + vg.beta;
                auto f = [&](double x) {
                    return std::log1p(k * x * x) / x * (std::exp(-am * x) + std::exp(-ap * x));
                };
                return {vg.lambda * integrator.integrate(f), 0.0};
            },
        },
        levy);
}

std::vector<double> sample_increments(const LevySpec& levy, std::size_t n, double dt, Rng& rng) {
    validate(levy);
    if (!(dt > 0.0)) throw ValueError("sample_increments: dt must be positive");
    std::vector<double> out(n);
    std::visit(Overloaded{
                   [&](const CompoundPoissonNormal& cp) {
                       if (cp.lambda * dt == 0.0) return;
                       std::poisson_distribution<long> count(cp.lambda * dt);
                       std::normal_distribution<double> z(0.0, 1.0);
                       for (auto& x : out) {
                           const long k = count(rng);
                           if (k == 0) continue;
                           const double dk = static_cast<double>(k);
                           x = dk * cp.eta + std::sqrt(dk * cp.sig2) * z(rng);
                       }
                   },
                   [&](const VarianceGamma& vg) {
                       const double rate = 0.5 * (vg.alpha * vg.alpha - vg.beta * vg.beta);
                       std::gamma_distribution<double> subordinator(vg.lambda * dt, 1.0 / rate);
                       std::normal_distribution<double> z(0.0, 1.0);
                       for (auto& x : out) {
                           const double g = subordinator(rng);
                           x = vg.mu0 * dt + vg.beta * g + std::sqrt(g) * z(rng);
                       }
                   },
               },
               levy);
    return out;
}

std::vector<double> sample_increments(const LevySpec& levy, const SamplingGrid& grid,
                                      std::uint64_t seed) {
    Rng rng(seed);
    return sample_increments(levy, grid.steps(), grid.dt(), rng);
}

JumpSchedule sample_cp_jump_times(const CompoundPoissonNormal& cp, double terminal, Rng& rng) {
    validate(cp);
    if (!(terminal > 0.0)) throw ValueError("sample_cp_jump_times: terminal must be positive");
    JumpSchedule out;
    if (cp.lambda == 0.0) return out;
    std::exponential_distribution<double> gap(cp.lambda);
    std::normal_distribution<double> size(cp.eta, std::sqrt(cp.sig2));
    double t = gap(rng);
    while (t <= terminal) {
        if (out.times.empty() || t > out.times.back()) {
            out.times.push_back(t);
            out.sizes.push_back(size(rng));
        }
        t += gap(rng);
    }
    return out;
}

JumpSchedule sample_cp_jump_times(const CompoundPoissonNormal& cp, double terminal,
                                  std::uint64_t seed) {
    Rng rng(seed);
    return sample_cp_jump_times(cp, terminal, rng);
}

double increment_log_density(const LevySpec& levy, double x, double dt, double zero_tol) {
    if (!std::isfinite(x)) throw ValueError("increment_log_density: non-finite increment");
    if (!(dt > 0.0)) throw ValueError("increment_log_density: dt must be positive");
    return std::visit(Overloaded{
                          [&](const CompoundPoissonNormal& cp) {
                              return cp_log_density(cp, x, dt, zero_tol);
                          },
                          [&](const VarianceGamma& vg) { return vg_log_density(vg, x, dt, zero_tol); },
                      },
                      levy);
}

double increment_loglik(const LevySpec& levy, std::span<const double> increments, double dt,
                        unsigned threads) {
    if (!(dt > 0.0)) throw ValueError("increment_loglik: dt must be positive");
    double max_abs = 0.0;
    for (double x : increments) {
        if (!std::isfinite(x)) throw ValueError("increment_loglik: non-finite increment");
        max_abs = std::max(max_abs, std::abs(x));
    }
    const double zero_tol = 1e-12 * max_abs;
    auto chunk_sum = [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += increment_log_density(levy, increments[i], dt, zero_tol);
        return acc;
    };
    const std::size_t n = increments.size();
    if (threads <= 1 || n < 4096) return chunk_sum(0, n);

    const std::size_t chunks = threads;
    const std::size_t width = (n + chunks - 1) / chunks;
    std::vector<std::future<double>> parts;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = std::min(n, c * width);
        const std::size_t hi = std::min(n, lo + width);
        parts.push_back(std::async(std::launch::async, chunk_sum, lo, hi));
    }
    double total = 0.0;
    for (auto& p : parts) total += p.get();
    return total;
}

std::vector<std::string> levy_param_names(LevyFamily family) {
    if (family == LevyFamily::compound_poisson) return {"lambda", "eta", "sig2"};
    return {"lambda", "alpha", "beta", "mu"};
}

std::vector<double> levy_param_values(const LevySpec& levy) {
    return std::visit(Overloaded{
                          [](const CompoundPoissonNormal& cp) {
                              return std::vector<double>{cp.lambda, cp.eta, cp.sig2};
                          },
                          [](const VarianceGamma& vg) {
                              return std::vector<double>{vg.lambda, vg.alpha, vg.beta, vg.mu0};
                          },
                      },
                      levy);
}

namespace {

LevySpec from_free(LevyFamily family, std::span<const double> x) {
    if (family == LevyFamily::compound_poisson) return CompoundPoissonNormal{x[0], 0.0, x[1]};
    return VarianceGamma{x[0], x[1], 0.0, 0.0};
}

// Central-difference Hessian of g at x (natural coordinates).
Matrix numeric_hessian(const std::function<double(std::span<const double>)>& g,
                       std::vector<double> x) {
    const std::size_t n = x.size();
    Matrix h(n, n);
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = 1e-4 * std::max(std::abs(x[i]), 1e-3);
    const double f0 = g(x);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            auto at = [&](double si, double sj) {
                auto y = x;
                y[i] += si * step[i];
                y[j] += sj * step[j];
                return g(y);
            };
            double v;
            if (i == j) {
                v = (at(1, 0) - 2.0 * f0 + at(-1, 0)) / (step[i] * step[i]);
            } else {
                v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step[i] * step[j]);
            }
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return h;
}

}  // namespace

LevyFit fit_levy_mle(LevyFamily family, std::span<const double> increments, double dt,
                     const LevySpec& start, unsigned threads) {
    if (increments.empty()) throw DataError("fit_levy_mle: no increments");
    if (family_of(start) != family) throw FamilyError("fit_levy_mle: start has the wrong family");
    validate(start);

    std::vector<double> x0;
    std::vector<double> lower;
    std::vector<double> upper;
    if (family == LevyFamily::compound_poisson) {
        const auto& cp = std::get<CompoundPoissonNormal>(start);
        x0 = {std::max(cp.lambda, 1e-6), cp.sig2};
        lower = {1e-8, 1e-10};
        upper = {1e4, 1e6};
    } else {
        const auto& vg = std::get<VarianceGamma>(start);
        x0 = {vg.lambda, vg.alpha};
        lower = {1e-6, 1e-6};
        upper = {1e4, 1e4};
    }

    const auto negloglik = [&](std::span<const double> x) {
        const double ll = increment_loglik(from_free(family, x), increments, dt, threads);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    NelderMeadOptions opts;
    opts.f_tol = 1e-12;
    opts.x_tol = 1e-8;
    opts.max_iterations = 2000;
    const OptimResult res = minimize_positive(negloglik, x0, lower, upper, opts);
    if (!std::isfinite(res.value))
        throw ConvergenceError("fit_levy_mle: no finite likelihood found", res.x, res.value);

    LevyFit fit;
    fit.params = from_free(family, res.x);
    fit.loglik = -res.value;
    fit.names = levy_param_names(family);
    fit.free = family == LevyFamily::compound_poisson ? std::vector<bool>{true, false, true}
                                                      : std::vector<bool>{true, true, false, false};
    fit.converged = res.converged;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        if (res.x[i] <= lower[i] * (1.0 + 1e-6) || res.x[i] >= upper[i] * (1.0 - 1e-6))
            fit.at_boundary = true;
    }
    if (!fit.at_boundary) {
        const Matrix h = numeric_hessian(negloglik, res.x);
        Eigen::LDLT<Matrix> ldlt(h);
        if (h.allFinite() && ldlt.info() == Eigen::Success && ldlt.isPositive() &&
            (ldlt.vectorD().array() > 0.0).all()) {
            Matrix v = ldlt.solve(Matrix::Identity(h.rows(), h.cols()));
            if (v.allFinite()) fit.vcov = v;
        }
    }
    if (!res.converged && !fit.at_boundary)
        throw ConvergenceError("fit_levy_mle: simplex did not converge", res.x, res.value);
    return fit;
}

}  // namespace cogarch
