#pragma once

// Sample paths of G, V and the state Y on an equally spaced grid.
//
// Grid convention: V[k] = a0 + aᵀY[k−1] for k ≥ 1 (the variance in force over
// step k) and V[0] = a0 + aᵀY[0]. The exact compound Poisson scheme reports
// V[k] = a0 + aᵀY(t_k−) instead, since its state is known between grid points.

#include "cogarch/grid.hpp"
#include "cogarch/levy.hpp"
#include "cogarch/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cogarch {

enum class Scheme { euler, mixed, exact_cp };

[[nodiscard]] std::string scheme_name(Scheme s);
[[nodiscard]] Scheme parse_scheme(const std::string& name);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> G;
    std::vector<double> V;
    Matrix Y;                   // (n+1) × q
    std::vector<double> dL;     // n driver increments
    bool unstable = false;
    std::size_t negative_v_count = 0;
    std::string reason;
};

/// Stationary mean of the state when Ã is stable, otherwise zero.
[[nodiscard]] Vector default_y0(const CogarchSpec& spec);

[[nodiscard]] Trajectory simulate_euler(const CogarchSpec& spec, const SamplingGrid& grid,
                                        std::optional<Vector> y0, std::uint64_t seed);
[[nodiscard]] Trajectory simulate_euler(const CogarchSpec& spec, const SamplingGrid& grid,
                                        const Vector& y0, std::span<const double> increments);

[[nodiscard]] Trajectory simulate_mixed(const CogarchSpec& spec, const SamplingGrid& grid,
                                        std::optional<Vector> y0, std::uint64_t seed);
[[nodiscard]] Trajectory simulate_mixed(const CogarchSpec& spec, const SamplingGrid& grid,
                                        const Vector& y0, std::span<const double> increments);

/// Throws FamilyError unless the driver is compound Poisson.
[[nodiscard]] Trajectory simulate_exact_cp(const CogarchSpec& spec, const SamplingGrid& grid,
                                           std::optional<Vector> y0, std::uint64_t seed);
[[nodiscard]] Trajectory simulate_exact_cp(const CogarchSpec& spec, const SamplingGrid& grid,
                                           const Vector& y0, const JumpSchedule& jumps);

[[nodiscard]] Trajectory simulate(const CogarchSpec& spec, const SamplingGrid& grid, Scheme scheme,
                                  std::optional<Vector> y0, std::uint64_t seed);

}  // namespace cogarch
