// Acceptance suite. One PASS/FAIL line per criterion; exit status is the number of failures.
// Each criterion also has a wall-clock budget that counts toward its verdict.

#include "oracles.hpp"

#include "cogarch/estimate.hpp"
#include "cogarch/moments.hpp"
#include "cogarch/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace cogarch;

namespace {

constexpr std::uint64_t kSeed = 12345;
constexpr double kTerminal = 1600.0;
constexpr std::size_t kSteps = 24000;
constexpr double kDt = kTerminal / kSteps;

const CompoundPoissonNormal kCp{1.0, 0.0, 1.0};
const VarianceGamma kVg{1.0, std::numbers::sqrt2, 0.0, 0.0};

CogarchSpec design_61(LevySpec levy = kCp) {
    return build_spec(1, 1, {0.038}, {0.053}, 0.04 / 0.053, std::move(levy));
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double standard_error(const GmmFit& fit, std::size_t i) {
    if (!fit.vcov) return std::numeric_limits<double>::quiet_NaN();
    const double v = (*fit.vcov)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    return v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
}

// 1. Euler pathology and the mixed-scheme fix.
Outcome euler_pathology() {
    const auto spec = build_spec(1, 1, {0.038}, {301.0}, 0.01, kVg);
    const SamplingGrid grid(5.0, 750);
    const Vector y0 = Vector::Zero(1);
    const auto eu = simulate_euler(spec, grid, y0, kSeed);
    const auto mx = simulate_mixed(spec, grid, y0, kSeed);
    const double min_mixed = *std::min_element(mx.V.begin() + 1, mx.V.end());
    const double min_euler = *std::min_element(eu.V.begin() + 1, eu.V.end());
    const bool ok = eu.unstable && eu.negative_v_count >= 1 && min_mixed >= 0.01;
    return {ok, fmt("euler unstable=%d negative_V_steps=%zu min_V=%.4g; mixed min_V=%.6g (>= 0.01)",
                    eu.unstable, eu.negative_v_count, min_euler, min_mixed)};
}

// 2. Sample second moment of lag-one increments against a0·b1·μ·Δt/(b1 − μa1).
Outcome second_moment() {
    const auto spec = design_61();
    const auto tr = simulate_mixed(spec, SamplingGrid(kTerminal, kSteps), std::nullopt, kSeed);
    double sum = 0.0;
    for (std::size_t k = 1; k <= kSteps; ++k) sum += std::pow(tr.G[k] - tr.G[k - 1], 2);
    const double mean = sum / kSteps;

    const oracle::Acf11 o{spec.a0, 0.038, 0.053, 1.0, 3.0};
    const double target = o.second_moment(kDt);
    // Long-run variance from the model autocovariance of squared increments.
    double lrv = o.variance(kDt);
    for (std::size_t h = 1; h < kSteps; ++h)
        lrv += 2.0 * (1.0 - static_cast<double>(h) / kSteps) * o.autocov(kDt, static_cast<double>(h) * kDt);
    const double se = std::sqrt(lrv / kSteps);
    const double library = theoretical_second_moment(spec, levy_moments(spec.levy), 1, kDt);
    const bool ok = std::abs(mean - target) <= 3.0 * se && std::abs(library - target) <= 1e-12 * target;
    return {ok, fmt("mean=%.6f theory=%.6f (=%.4f per unit time) SE=%.6f z=%.2f", mean, target, target / kDt, se,
                    (mean - target) / se)};
}

// 3. Matrix ACF pipeline against the scalar closed form.
Outcome acf_oracle() {
    struct Set {
        double a1, b1, a0;
    };
    const Set sets[] = {{0.038, 0.053, 0.04 / 0.053}, {0.045, 0.07, 0.5}, {0.03, 0.045, 1.3}};
    double worst = 0.0;
    for (const auto& s : sets) {
        const auto spec = build_spec(1, 1, {s.a1}, {s.b1}, s.a0, kCp);
        const LevyMoments lm = levy_moments(kCp);
        const auto curve = acf_curve({spec, lm, 1, 20, 1.0});
        const oracle::Acf11 o{s.a0, s.a1, s.b1, lm.mu, lm.rho};
        for (std::size_t i = 0; i < curve.lags.size(); ++i) {
            const double h = curve.lags[i];
            const double g = o.autocov(1.0, h);
            worst = std::max(worst, std::abs(curve.autocov[i] - g) / std::abs(g));
            const double rho = g / o.variance(1.0);
            worst = std::max(worst, std::abs(curve.autocorr[i] - rho) / std::abs(rho));
        }
    }
    return {worst <= 1e-8, fmt("max relative error %.3g over h=1..20, 3 parameter sets (<= 1e-8)", worst)};
}

// 4. Lyapunov residual and expm against the Taylor series on random stable companions.
Outcome lyapunov_expm() {
    std::mt19937_64 rng(kSeed);
    double worst_res = 0.0;
    double worst_exp = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int q = 1 + trial % 4;
        const Matrix A = oracle::random_stable_companion(rng, q);
        const Matrix M = lyapunov_integral(A);
        const Vector e = last_unit(q);
        const Matrix res = A * M + M * A.transpose() + e * e.transpose();
        worst_res = std::max(worst_res, res.cwiseAbs().rowwise().sum().maxCoeff());
        const Matrix ref = oracle::expm_taylor(A);
        const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
        worst_exp = std::max(worst_exp, (expm(A) - ref).cwiseAbs().maxCoeff() / scale);
    }
    const bool ok = worst_res <= 1e-10 && worst_exp <= 1e-10;
    return {ok, fmt("max Lyapunov residual (inf-norm) %.3g, max expm deviation %.3g over 100 matrices", worst_res,
                    worst_exp)};
}

// 5. L2-GMM recovery over ten seeds.
Outcome estimation_recovery() {
    const auto spec = design_61();
    const std::vector<double> start{0.053, 0.038};
    int covered = 0;
    std::vector<double> se_b, se_a;
    std::ostringstream runs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto tr = simulate_mixed(spec, SamplingGrid(kTerminal, kSteps), std::nullopt, seed);
        GmmOptions opt;
        opt.kind = ObjectiveKind::l2;
        const auto fit = gmm(tr.G, kDt, spec, start, opt);
        const double sb = standard_error(fit, 0);
        const double sa = standard_error(fit, 1);
        const bool in_b = std::isfinite(sb) && std::abs(fit.theta[0] - 0.053) <= 3.0 * sb;
        const bool in_a = std::isfinite(sa) && std::abs(fit.theta[1] - 0.038) <= 3.0 * sa;
        covered += in_b && in_a;
        se_b.push_back(std::isfinite(sb) ? sb : std::numeric_limits<double>::infinity());
        se_a.push_back(std::isfinite(sa) ? sa : std::numeric_limits<double>::infinity());
        runs << fmt("\n      seed %2llu: b1=%.4g (SE %.3g) a1=%.4g (SE %.3g)%s", static_cast<unsigned long long>(seed),
                    fit.theta[0], sb, fit.theta[1], sa, in_b && in_a ? "" : "  outside 3SE");
    }
    const double mb = median(se_b);
    const double ma = median(se_a);
    const bool se_ok = ma >= 0.029 / 3.0 && ma <= 0.029 * 3.0 && mb >= 0.069 / 3.0 && mb <= 0.069 * 3.0;
    const bool ok = covered >= 8 && se_ok;
    return {ok, fmt("%d/10 runs within 3SE (need >= 8); median SE a1=%.3g (0.029 x [1/3,3]), b1=%.3g "
                    "(0.069 x [1/3,3])",
                    covered, ma, mb) +
                    runs.str()};
}

// 6 and 7 share the recovered compound Poisson increments.
std::vector<double> g_recovered_cp;

Outcome noise_roundtrip() {
    const auto spec = design_61();
    const auto tr = simulate_mixed(spec, SamplingGrid(kTerminal, kSteps), std::nullopt, kSeed);
    const auto rec = recover_noise(spec, tr.G, kDt, 1.0);
    g_recovered_cp = rec.increments;
    const double corr = oracle::correlation(rec.increments, tr.dL);
    const double sd = std::sqrt(oracle::variance(rec.increments));
    const double target = std::sqrt(kDt * levy_moments(spec.levy).mu);
    const bool ok = corr >= 0.99 && std::abs(sd - target) <= 0.05 * target;
    return {ok, fmt("correlation %.6f (>= 0.99); sd %.6f vs sqrt(dt*mu) %.6f (rel. dev. %.2f%%, <= 5%%)", corr, sd,
                    target, 100.0 * std::abs(sd - target) / target)};
}

Outcome levy_mle() {
    if (g_recovered_cp.empty()) return {false, "criterion 6 produced no increments"};
    const auto cp = fit_levy_mle(LevyFamily::compound_poisson, g_recovered_cp, kDt, kCp);
    const double lambda = std::get<CompoundPoissonNormal>(cp.params).lambda;

    const auto vg_spec = design_61(kVg);
    const auto tr = simulate_mixed(vg_spec, SamplingGrid(kTerminal, kSteps), std::nullopt, kSeed);
    const auto rec = recover_noise(vg_spec, tr.G, kDt, 1.0);
    const auto vg = fit_levy_mle(LevyFamily::variance_gamma, rec.increments, kDt, kVg);
    const double alpha = std::get<VarianceGamma>(vg.params).alpha;
    const bool ok = lambda >= 0.8 && lambda <= 1.25 && alpha >= 1.2 && alpha <= 1.7;
    return {ok, fmt("CP lambda=%.4f in [0.8, 1.25]; VG alpha=%.4f in [1.2, 1.7]", lambda, alpha)};
}

// 8. COGARCH with q = 2: stable simulation and the ordering of the estimates.
Outcome higher_order() {
    const auto spec = build_spec(1, 2, {0.1}, {1.5, 0.5}, 0.5, kCp);
    Vector y0(2);
    y0 << 2.5, 0.0;
    const auto tr = simulate_euler(spec, SamplingGrid(kTerminal, kSteps), y0, kSeed);
    const bool stable = !tr.unstable;
    const std::vector<double> start{1.5, 0.5, 0.1};
    GmmOptions opt;
    opt.kind = ObjectiveKind::l2;
    const auto fit = gmm(tr.G, kDt, spec, start, opt);
    const double b1 = fit.theta[0], b2 = fit.theta[1], a1 = fit.theta[2];
    const bool ok = stable && b1 >= 2.0 * b2 && a1 >= 1e-3 && a1 <= 1e-1;
    return {ok, fmt("euler path stable=%d; b1=%.4g b2=%.4g (b1 >= 2*b2), a1=%.4g in [1e-3, 1e-1]", stable, b1, b2,
                    a1)};
}

// 9. Raw increments are uncorrelated.
Outcome whiteness() {
    const auto tr = simulate_mixed(design_61(), SamplingGrid(kTerminal, kSteps), std::nullopt, kSeed);
    std::vector<double> x(kSteps);
    for (std::size_t k = 0; k < kSteps; ++k) x[k] = tr.G[k + 1] - tr.G[k];
    const double m = oracle::mean(x);
    double den = 0.0;
    for (double v : x) den += (v - m) * (v - m);
    double worst = 0.0;
    for (std::size_t h = 1; h <= 10; ++h) {
        double num = 0.0, var = 0.0;
        for (std::size_t k = 0; k + h < kSteps; ++k) {
            const double p = (x[k] - m) * (x[k + h] - m);
            num += p;
            var += p * p;
        }
        // Heteroskedasticity-robust SE: returns are uncorrelated but not independent.
        const double se = std::sqrt(var) / den;
        worst = std::max(worst, std::abs(num / den) / se);
    }
    return {worst <= 4.0, fmt("max |acf/SE| over lags 1..10 = %.2f (<= 4)", worst)};
}

// 10. Re-simulating from recovered increments reproduces the observed path.
Outcome end_to_end() {
    const auto spec = design_61();
    const auto tr = simulate_mixed(spec, SamplingGrid(kTerminal, kSteps), std::nullopt, kSeed);
    GmmOptions opt;
    opt.kind = ObjectiveKind::l2;
    opt.recover = Recover::increments;
    const std::vector<double> start{0.053, 0.038};
    const auto fit = gmm(tr.G, kDt, spec, start, opt);
    const Vector y0 = stationary_mean_Y(fit.spec, 1.0);
    const auto again = simulate_mixed(fit.spec, SamplingGrid(kTerminal, kSteps), y0, fit.noise->increments);
    double sup = 0.0;
    for (std::size_t k = 0; k <= kSteps; ++k) sup = std::max(sup, std::abs(again.G[k] - tr.G[k]));
    return {sup <= 1e-6, fmt("sup |G_resim - G| = %.3g at b1=%.4g a1=%.4g a0=%.4g (<= 1e-6)", sup, fit.theta[0],
                             fit.theta[1], fit.a0)};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "euler-pathology", 1.0, euler_pathology},
        {2, "second-moment", 5.0, second_moment},
        {3, "acf-oracle", 1.0, acf_oracle},
        {4, "lyapunov-expm", 5.0, lyapunov_expm},
        {5, "estimation-recovery", 300.0, estimation_recovery},
        {6, "noise-roundtrip", 10.0, noise_roundtrip},
        {7, "levy-mle", 60.0, levy_mle},
        {8, "higher-order", 300.0, higher_order},
        {9, "raw-whiteness", 60.0, whiteness},
        {10, "end-to-end", 60.0, end_to_end},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::printf("%s [%d] %s: %s (%.2fs, budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
