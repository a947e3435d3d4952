#include "cogarch/simulate.hpp"

#include "cogarch/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cogarch {

namespace {

Trajectory allocate(const CogarchSpec& spec, const SamplingGrid& grid, const Vector& y0) {
    if (y0.size() != spec.q) throw ValueError("initial state must have length q");
    const std::size_t n = grid.steps();
    Trajectory tr;
    tr.times.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) tr.times[k] = grid.time(k);
    tr.G.assign(n + 1, 0.0);
    tr.V.assign(n + 1, 0.0);
    tr.Y.resize(static_cast<Eigen::Index>(n + 1), spec.q);
    tr.Y.row(0) = y0.transpose();
    tr.V[0] = spec.a0 + spec.a.dot(y0);
    tr.dL.assign(n, 0.0);
    return tr;
}

void check_increments(const SamplingGrid& grid, std::span<const double> increments) {
    if (increments.size() != grid.steps())
        throw ValueError("increment count must equal the number of grid steps");
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::euler: return "euler";
        case Scheme::mixed: return "mixed";
        case Scheme::exact_cp: break;
    }
    return "exact-cp";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "euler") return Scheme::euler;
    if (name == "mixed") return Scheme::mixed;
    if (name == "exact-cp" || name == "exact_cp") return Scheme::exact_cp;
    throw ValueError("unknown scheme: " + name);
}

Vector default_y0(const CogarchSpec& spec) {
    const double mu = levy_moments(spec.levy).mu;
    if (spectral_abscissa(companion(spec, mu).Atilde) < 0.0) return stationary_mean_Y(spec, mu);
    return Vector::Zero(spec.q);
}

Trajectory simulate_euler(const CogarchSpec& spec, const SamplingGrid& grid, const Vector& y0,
                          std::span<const double> increments) {
    check_increments(grid, increments);
    Trajectory tr = allocate(spec, grid, y0);
    const Matrix A = companion(spec, 0.0).A;
    const Matrix step = Matrix::Identity(spec.q, spec.q) + A * grid.dt();
    const Eigen::Index last = spec.q - 1;

    const double radius = step.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 1.0) {
        tr.unstable = true;
        tr.reason = "spectral radius of I + A*dt exceeds 1";
    }

    Vector y = y0;
    for (std::size_t k = 1; k <= grid.steps(); ++k) {
        const double dl = increments[k - 1];
        const double v = spec.a0 + spec.a.dot(y);
        if (v < 0.0) ++tr.negative_v_count;
        Vector next = step * y;
        next(last) += v * dl * dl;
        y = std::move(next);
        tr.V[k] = v;
        tr.G[k] = tr.G[k - 1] + std::sqrt(std::max(v, 0.0)) * dl;
        tr.Y.row(static_cast<Eigen::Index>(k)) = y.transpose();
        tr.dL[k - 1] = dl;
    }
    if (tr.negative_v_count > 0) {
        tr.unstable = true;
        tr.reason = "negative variance encountered (" + std::to_string(tr.negative_v_count) +
                    " steps)" + (tr.reason.empty() ? "" : "; " + tr.reason);
    }
    return tr;
}

Trajectory simulate_euler(const CogarchSpec& spec, const SamplingGrid& grid, std::optional<Vector> y0,
                          std::uint64_t seed) {
    const auto dl = sample_increments(spec.levy, grid, seed);
    return simulate_euler(spec, grid, y0 ? *y0 : default_y0(spec), dl);
}

Trajectory simulate_mixed(const CogarchSpec& spec, const SamplingGrid& grid, const Vector& y0,
                          std::span<const double> increments) {
    check_increments(grid, increments);
    Trajectory tr = allocate(spec, grid, y0);
    const Matrix E = expm(companion(spec, 0.0).A * grid.dt());
    const Eigen::Index last = spec.q - 1;

    Vector y = y0;
    for (std::size_t k = 1; k <= grid.steps(); ++k) {
        const double dl = increments[k - 1];
        const double v = spec.a0 + spec.a.dot(y);
        if (v < 0.0) ++tr.negative_v_count;
        y(last) += v * dl * dl;
        y = E * y;
        tr.V[k] = v;
        tr.G[k] = tr.G[k - 1] + std::sqrt(std::max(v, 0.0)) * dl;
        tr.Y.row(static_cast<Eigen::Index>(k)) = y.transpose();
        tr.dL[k - 1] = dl;
    }
    if (tr.negative_v_count > 0) {
        tr.unstable = true;
        tr.reason = "negative variance encountered (" + std::to_string(tr.negative_v_count) + " steps)";
    }
    return tr;
}

Trajectory simulate_mixed(const CogarchSpec& spec, const SamplingGrid& grid, std::optional<Vector> y0,
                          std::uint64_t seed) {
    const auto dl = sample_increments(spec.levy, grid, seed);
    return simulate_mixed(spec, grid, y0 ? *y0 : default_y0(spec), dl);
}

Trajectory simulate_exact_cp(const CogarchSpec& spec, const SamplingGrid& grid, const Vector& y0,
                             const JumpSchedule& jumps) {
    if (jumps.times.size() != jumps.sizes.size()) throw ValueError("jump schedule size mismatch");
    Trajectory tr = allocate(spec, grid, y0);
    const Matrix A = companion(spec, 0.0).A;
    const Eigen::Index last = spec.q - 1;

    Vector y = y0;
    double t = 0.0;   // time at which y is current
    double g = 0.0;
    std::size_t j = 0;
    for (std::size_t k = 1; k <= grid.steps(); ++k) {
        const double tk = grid.time(k);
        double dl = 0.0;
        while (j < jumps.times.size() && jumps.times[j] <= tk) {
            y = expm(A * (jumps.times[j] - t)) * y;
            t = jumps.times[j];
            const double v = spec.a0 + spec.a.dot(y);
            if (v < 0.0) ++tr.negative_v_count;
            const double size = jumps.sizes[j];
            g += std::sqrt(std::max(v, 0.0)) * size;
            y(last) += v * size * size;
            dl += size;
            ++j;
        }
        y = expm(A * (tk - t)) * y;
        t = tk;
        tr.V[k] = spec.a0 + spec.a.dot(y);
        tr.G[k] = g;
        tr.Y.row(static_cast<Eigen::Index>(k)) = y.transpose();
        tr.dL[k - 1] = dl;
    }
    if (tr.negative_v_count > 0) {
        tr.unstable = true;
        tr.reason = "negative variance encountered (" + std::to_string(tr.negative_v_count) + " jumps)";
    }
    return tr;
}

Trajectory simulate_exact_cp(const CogarchSpec& spec, const SamplingGrid& grid, std::optional<Vector> y0,
                             std::uint64_t seed) {
    const auto* cp = std::get_if<CompoundPoissonNormal>(&spec.levy);
    if (cp == nullptr) throw FamilyError("the exact scheme requires a compound Poisson driver");
    const JumpSchedule jumps = sample_cp_jump_times(*cp, grid.terminal(), seed);
    return simulate_exact_cp(spec, grid, y0 ? *y0 : default_y0(spec), jumps);
}

Trajectory simulate(const CogarchSpec& spec, const SamplingGrid& grid, Scheme scheme,
                    std::optional<Vector> y0, std::uint64_t seed) {
    switch (scheme) {
        case Scheme::euler: return simulate_euler(spec, grid, std::move(y0), seed);
        case Scheme::mixed: return simulate_mixed(spec, grid, std::move(y0), seed);
        case Scheme::exact_cp: break;
    }
    return simulate_exact_cp(spec, grid, std::move(y0), seed);
}

}  // namespace cogarch
