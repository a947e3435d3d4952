#pragma once

// Method-of-moments estimation from equally spaced observations of G:
// autocorrelations of squared lag-r increments matched to their theoretical
// values, followed by optional recovery of the driving increments and a
// likelihood fit of the driver.
//
// θ = (b_1..b_q, a_1..a_p). a0 cancels from the autocorrelations and is set
// afterwards by matching the second moment of the lag-r increments.

#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"
#include "cogarch/model.hpp"
#include "cogarch/optimize.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cogarch {

/// G_n − G_{n−r} for n = r..N (G holds N+1 observations).
[[nodiscard]] std::vector<double> lag_increments(std::span<const double> G, int r);

/// Sums of r consecutive lag-one increments; equals lag_increments(G, r).
[[nodiscard]] std::vector<double> aggregate_increments(std::span<const double> lag_one, int r);

struct EmpiricalAcf {
    int r = 1;
    int d = 1;
    std::size_t terms = 0;           // N − d − r + 1
    double mu_hat = 0.0;
    std::vector<double> gamma_hat;   // h = 0..d
    std::vector<double> rho_hat;     // h = 1..d
    std::vector<double> centered;    // squared increments minus mu_hat
};

/// Sums run over n = r..N−d with weight 1/(N−d−r+1). Throws DataError when
/// N ≤ d + r or the squared increments have zero variance.
[[nodiscard]] EmpiricalAcf empirical_acf(std::span<const double> G, int r, int d);

/// Default maximum lag, floor(√N).
[[nodiscard]] int default_max_lag(std::size_t steps);

/// Empirical side of the moment conditions, prepared once per data set.
/// Moment lags are h = r..d (the theoretical curve needs h ≥ r).
struct MomentData {
    EmpiricalAcf acf;
    double dt = 1.0;
    std::vector<int> lags;
    Vector rho_hat;   // at `lags`
    Matrix omega;     // mean of per-observation products minus rho_hat·rho_hatᵀ
};

[[nodiscard]] MomentData prepare_moments(std::span<const double> G, double dt, int r, int d);

enum class ObjectiveKind { l1, l2, l2cue };
[[nodiscard]] std::string objective_name(ObjectiveKind k);
[[nodiscard]] ObjectiveKind parse_objective(const std::string& name);

/// Builds a spec with θ = (b, a) and the given a0 on top of a template.
[[nodiscard]] CogarchSpec spec_from_theta(const CogarchSpec& tmpl, std::span<const double> theta,
                                          double a0 = 1.0);
[[nodiscard]] std::vector<double> theta_of(const CogarchSpec& spec);
[[nodiscard]] std::vector<std::string> theta_names(int p, int q);

/// ĝ_h = ρ_r(h; θ) − ρ̂_r(h). Throws FeasibilityError/StabilityError outside
/// the admissible region.
[[nodiscard]] Vector moment_vector(const CogarchSpec& spec, const LevyMoments& moments,
                                   const MomentData& data);

/// S(θ) = ĝĝᵀ + Ω, the mean of f·fᵀ over observations.
[[nodiscard]] Matrix moment_covariance(const Vector& g, const MomentData& data);

/// Ŵ = (S + 1e-8·tr(S)·I)⁻¹.
[[nodiscard]] Matrix cue_weight(const Matrix& S);

/// L1 = Σ|g|, L2 = Σg², L2CUE = gᵀWg (W required for the last).
[[nodiscard]] double objective_value(const Vector& g, ObjectiveKind kind, const Matrix* weight = nullptr);

/// Objective at θ with the infeasibility penalty 1e6·(1 + violation).
[[nodiscard]] double gmm_objective(std::span<const double> theta, const CogarchSpec& tmpl,
                                   const LevyMoments& moments, const MomentData& data,
                                   ObjectiveKind kind);

inline constexpr double kInfeasiblePenalty = 1e6;

/// V = (1/n)(DᵀWD)⁻¹DᵀWSWD(DᵀWD)⁻¹.
[[nodiscard]] Matrix weighted_sandwich_vcov(const Matrix& D, const Matrix& W, const Matrix& S, double n);
/// The identity-weight case used for L2: (1/n)(DᵀD)⁻¹DᵀSD(DᵀD)⁻¹.
[[nodiscard]] Matrix sandwich_vcov(const Matrix& D, const Matrix& S, double n);
/// V = (1/n)(DᵀS⁻¹D)⁻¹.
[[nodiscard]] Matrix efficient_vcov(const Matrix& D, const Matrix& S, double n);

/// Jacobian of ĝ at θ by central differences, step 1e-5·max(1, |θ_i|).
[[nodiscard]] Matrix moment_jacobian(std::span<const double> theta, const CogarchSpec& tmpl,
                                     const LevyMoments& moments, const MomentData& data);

/// Throws SingularError when the needed inverses do not exist; none for L1.
[[nodiscard]] std::optional<Matrix> vcov_gmm(std::span<const double> theta, const CogarchSpec& tmpl,
                                             const LevyMoments& moments, const MomentData& data,
                                             ObjectiveKind kind);

struct NoiseRecovery {
    std::vector<double> increments;  // ΔL_n, n = 1..N
    std::vector<double> V;           // V_n = a0 + aᵀY_{n−1}
    Matrix Y;                        // (N+1) × q, row 0 is the starting state
};

/// Inverts the mixed recursion: Y_n = e^{AΔt}(Y_{n−1} + e·ΔG_n²), ΔL_n = ΔG_n/√V_n.
/// Y_0 is the stationary mean under the given mu. Throws NumericalError at
/// the first V_n ≤ 0.
[[nodiscard]] NoiseRecovery recover_noise(const CogarchSpec& spec, std::span<const double> G,
                                          double dt, double mu = 1.0);

enum class Recover { none, increments, increments_levy };
[[nodiscard]] Recover parse_recover(const std::string& name);
[[nodiscard]] std::string recover_name(Recover r);

struct GmmOptions {
    ObjectiveKind kind = ObjectiveKind::l2;
    int r = 1;
    int d = 0;  // 0 selects floor(√N)
    std::vector<double> lower;  // default 1e-8 per coordinate
    std::vector<double> upper;  // default 1e4 per coordinate
    Recover recover = Recover::none;
    NelderMeadOptions optimizer{};
    unsigned threads = 1;
};

struct GmmFit {
    CogarchSpec spec;                // θ̂, â0 and the fitted driver when available
    std::vector<std::string> names;  // b1..bq, a1..ap
    std::vector<double> theta;
    double a0 = 0.0;
    ObjectiveKind kind = ObjectiveKind::l2;
    double objective = 0.0;
    double log_objective = 0.0;
    std::optional<Matrix> vcov;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    MomentData data;
    std::optional<NoiseRecovery> noise;
    std::optional<LevyFit> levy_fit;
    std::vector<std::string> notes;
};

/// Three-step fit. Stage 1 normalises the driver to μ = 1 (ρ scaled by 1/μ²).
/// Throws FeasibilityError when no feasible point is reached.
[[nodiscard]] GmmFit gmm(std::span<const double> G, double dt, const CogarchSpec& tmpl,
                         std::span<const double> start, const GmmOptions& options = {});

}  // namespace cogarch
