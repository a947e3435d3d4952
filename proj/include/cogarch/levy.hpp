#pragma once

// Pure-jump Lévy drivers: compound Poisson with Gaussian jumps and variance
// gamma. Sampling, Lévy-measure moments, increment densities and the
// maximum-likelihood fit of the driver parameters.

#include "cogarch/grid.hpp"
#include "cogarch/linalg.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cogarch {

/// Jumps arrive at rate `lambda`; sizes are N(eta, sig2). `sig2` is a variance.
struct CompoundPoissonNormal {
    double lambda = 1.0;
    double eta = 0.0;
    double sig2 = 1.0;
};

/// Normal variance-mean mixture X_t = mu0·t + beta·Γ_t + sqrt(Γ_t)·Z with
/// Γ_t ~ Gamma(shape lambda·t, rate (alpha² − beta²)/2).
struct VarianceGamma {
    double lambda = 1.0;
    double alpha = 1.4142135623730951;
    double beta = 0.0;
    double mu0 = 0.0;
};

using LevySpec = std::variant<CompoundPoissonNormal, VarianceGamma>;

enum class LevyFamily { compound_poisson, variance_gamma };

[[nodiscard]] LevyFamily family_of(const LevySpec& levy) noexcept;
[[nodiscard]] std::string family_name(LevyFamily family);

/// Throws ValueError when parameters are outside their domain.
void validate(const LevySpec& levy);

/// Symmetric and centered drivers are required by the estimation pipeline.
[[nodiscard]] bool is_symmetric_centered(const LevySpec& levy) noexcept;

/// Second and fourth moments of the Lévy measure.
struct LevyMoments {
    double mu = 0.0;
    double rho = 0.0;
};

[[nodiscard]] LevyMoments levy_moments(const LevySpec& levy);

/// ∫ l^{2j} dν(l), j ≥ 1, in closed form.
[[nodiscard]] double levy_measure_even_moment(const LevySpec& levy, int j);

/// ∫ g(l) dν(l) for g(l) = ln(1 + k·l²). Compound Poisson uses Monte Carlo over
/// jump sizes (std_error > 0); variance gamma uses deterministic quadrature.
struct MeasureIntegral {
    double value = 0.0;
    double std_error = 0.0;
};
[[nodiscard]] MeasureIntegral log_moment_integral(const LevySpec& levy, double k,
                                                  std::size_t n_mc, std::uint64_t seed);

using Rng = std::mt19937_64;

/// n independent increments of L over steps of length dt.
[[nodiscard]] std::vector<double> sample_increments(const LevySpec& levy, std::size_t n, double dt,
                                                    Rng& rng);
[[nodiscard]] std::vector<double> sample_increments(const LevySpec& levy, const SamplingGrid& grid,
                                                    std::uint64_t seed);

/// Jump times on (0, terminal] and their sizes.
struct JumpSchedule {
    std::vector<double> times;
    std::vector<double> sizes;
};

[[nodiscard]] JumpSchedule sample_cp_jump_times(const CompoundPoissonNormal& cp, double terminal,
                                                Rng& rng);
[[nodiscard]] JumpSchedule sample_cp_jump_times(const CompoundPoissonNormal& cp, double terminal,
                                                std::uint64_t seed);

/// Log density of L_dt at x. For compound Poisson the law has an atom at zero;
/// |x| ≤ zero_tol returns log P(no jump) and other points use the continuous
/// part, so the result is a density with respect to (δ₀ + Lebesgue). For variance
/// gamma with shape λ·dt < 1/2 the density is unbounded at zero and |x| ≤ zero_tol
/// returns the mean density over [−zero_tol, zero_tol].
[[nodiscard]] double increment_log_density(const LevySpec& levy, double x, double dt,
                                           double zero_tol = 0.0);

/// Σ log density over the increments. The zero tolerance is 1e-12·max|x|.
/// With threads > 1 the sum is computed in fixed chunks added in index order.
[[nodiscard]] double increment_loglik(const LevySpec& levy, std::span<const double> increments,
                                      double dt, unsigned threads = 1);

struct LevyFit {
    LevySpec params;
    double loglik = 0.0;
    std::vector<std::string> names;       // every parameter of the family
    std::vector<bool> free;               // estimated (true) or held fixed
    std::optional<Matrix> vcov;           // over the free parameters, when the Hessian is usable
    bool at_boundary = false;
    bool converged = true;
};

/// Maximises the increment log-likelihood over the symmetric parameters
/// (compound Poisson: lambda, sig2; variance gamma: lambda, alpha). eta, beta
/// and mu0 are held at zero. Throws ConvergenceError with the best point found.
[[nodiscard]] LevyFit fit_levy_mle(LevyFamily family, std::span<const double> increments,
                                   double dt, const LevySpec& start, unsigned threads = 1);

/// Parameter names/values in a fixed order for reports.
[[nodiscard]] std::vector<std::string> levy_param_names(LevyFamily family);
[[nodiscard]] std::vector<double> levy_param_values(const LevySpec& levy);

}  // namespace cogarch
