#pragma once

// COGARCH(p,q) specification, structural matrices and the diagnostics for
// stationarity, moment existence and variance nonnegativity.

#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cogarch {

/// Largest state dimension accepted by the eigen and Lyapunov routines.
inline constexpr int kMaxOrder = 16;

struct CogarchSpec {
    int p = 1;
    int q = 1;
    Vector a;  // length q; a_{p+1..q} are zero
    Vector b;  // length q: b_1..b_q
    double a0 = 1.0;
    LevySpec levy;
};

/// Validates orders, lengths and a0, and pads `a` to length q.
[[nodiscard]] CogarchSpec build_spec(int p, int q, const std::vector<double>& a,
                                     const std::vector<double>& b, double a0, LevySpec levy);

struct CompanionMatrices {
    Matrix A;
    Vector e;
    Matrix Atilde;  // A + mu·e·aᵀ
};

[[nodiscard]] CompanionMatrices companion(const CogarchSpec& spec, double mu);

struct EigenReport {
    ComplexVector eigenvalues;  // descending real part
    ComplexMatrix S;            // Vandermonde columns (1, λ, …, λ^{q−1}); empty unless distinct
    ComplexMatrix S_inv;
    bool distinct = false;
    bool all_real = false;
    bool all_negative_real_part = false;
    double condition_estimate = 1.0;
};

[[nodiscard]] EigenReport eigen_report(const Matrix& a);

enum class TriState { holds, fails, inconclusive };
[[nodiscard]] std::string to_string(TriState s);

/// Induced r-norm of the rank-one matrix S⁻¹ e aᵀ S, i.e. ‖S⁻¹e‖_r · ‖Sᵀa‖_{r*}
/// with 1/r + 1/r* = 1. For r = 2 this is also the Frobenius norm.
[[nodiscard]] double rank_one_norm(const CogarchSpec& spec, const EigenReport& eigen,
                                   double norm_order);

struct StationarityResult {
    TriState status = TriState::inconclusive;
    double lhs = 0.0;
    double lhs_std_error = 0.0;
    double rhs = 0.0;
};

[[nodiscard]] StationarityResult check_stationarity(const CogarchSpec& spec, const EigenReport& eigen,
                                                    double norm_order = 2.0,
                                                    std::size_t n_mc = 1'000'000,
                                                    std::uint64_t seed = 12345);

struct NonnegativityResult {
    TriState status = TriState::inconclusive;
    std::string rule;  // "rule1", "rule2", "rule3", "numeric", "unstable"
};

[[nodiscard]] NonnegativityResult check_nonnegativity(const CogarchSpec& spec,
                                                      const EigenReport& eigen);

/// min over the fallback grid of aᵀe^{At}e.
[[nodiscard]] double kernel_minimum(const CogarchSpec& spec, const EigenReport& eigen);

struct MomentCheck {
    int kappa = 1;
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs − lhs
};

[[nodiscard]] MomentCheck check_moment_existence(const CogarchSpec& spec, const EigenReport& eigen,
                                                 int kappa, double norm_order = 2.0);

[[nodiscard]] Vector stationary_mean_Y(const CogarchSpec& spec, double mu);
[[nodiscard]] Matrix stationary_cov_Y(const CogarchSpec& spec, const LevyMoments& moments);

struct DiagnosticsReport {
    TriState stationary = TriState::inconclusive;
    double stationarity_lhs = 0.0;
    double stationarity_std_error = 0.0;
    double stationarity_rhs = 0.0;
    TriState nonnegative_variance = TriState::inconclusive;
    std::string nonnegativity_rule;
    std::vector<MomentCheck> moments;
    EigenReport eigen;
    std::vector<std::string> notes;
};

[[nodiscard]] DiagnosticsReport diagnose(const CogarchSpec& spec, const std::vector<int>& kappas,
                                         double norm_order = 2.0, std::size_t n_mc = 1'000'000,
                                         std::uint64_t seed = 12345);

}  // namespace cogarch
