#pragma once

// Second-order structure of lag-r squared returns: the stationary second
// moment and the autocovariance/autocorrelation curve over lags h ≥ r.
//
// Lag widths and lags are given in grid units; dt converts them to time.

#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"
#include "cogarch/model.hpp"

#include <vector>

namespace cogarch {

/// m = ρ · aᵀ M a with M the Lyapunov integral of Ã.
[[nodiscard]] double m_scalar(const CogarchSpec& spec, const LevyMoments& moments);

/// E[(G^{(r)})²] = a0 · b_q · τ · μ / (b_q − μ a1), τ = r·dt.
[[nodiscard]] double theoretical_second_moment(const CogarchSpec& spec, const LevyMoments& moments,
                                               int r, double dt = 1.0);

struct AcfInputs {
    CogarchSpec spec;
    LevyMoments moments;
    int r = 1;
    int max_lag = 1;
    double dt = 1.0;
};

struct AcfCurve {
    double second_moment = 0.0;
    double variance_sq = 0.0;  // γ_r(0)
    double m = 0.0;
    std::vector<int> lags;     // r..max_lag
    std::vector<double> autocov;
    std::vector<double> autocorr;
};

/// Throws FeasibilityError when m ≥ 1 or b_q ≤ μ a1, StabilityError when Ã
/// is not stable.
[[nodiscard]] AcfCurve acf_curve(const AcfInputs& in);

}  // namespace cogarch
