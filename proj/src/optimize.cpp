#include "cogarch/optimize.hpp"

#include "cogarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cogarch {

namespace {

struct Simplex {
    std::vector<std::vector<double>> points;
    std::vector<double> values;
};

void project(std::vector<double>& x, std::span<const double> lower, std::span<const double> upper) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!lower.empty()) x[i] = std::max(x[i], lower[i]);
        if (!upper.empty()) x[i] = std::min(x[i], upper[i]);
    }
}

double safe_eval(const Objective& f, std::span<const double> x, int& evals) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

OptimResult run_once(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                     std::span<const double> upper, const NelderMeadOptions& opt, double step) {
    const std::size_t n = x0.size();
    const double dn = static_cast<double>(n);
    // Gao & Han adaptive coefficients.
    const double alpha = 1.0;
    const double beta = n > 1 ? 1.0 + 2.0 / dn : 2.0;
    const double gamma = n > 1 ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
    const double delta = n > 1 ? 1.0 - 1.0 / dn : 0.5;

    OptimResult res;
    project(x0, lower, upper);

    Simplex s;
    s.points.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto p = x0;
        const double h = step * std::max(1.0, std::abs(x0[i]));
        p[i] += h;
        project(p, lower, upper);
        if (p[i] == x0[i]) p[i] = x0[i] - h;  // pushed back by the bound: go the other way
        project(p, lower, upper);
        s.points.push_back(std::move(p));
    }
    for (const auto& p : s.points) s.values.push_back(safe_eval(f, p, res.evaluations));

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return s.values[i] < s.values[j]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                diameter = std::max(diameter, std::abs(s.points[order[k]][i] - s.points[best][i]));
        const double spread = s.values[worst] - s.values[best];
        if (std::isfinite(spread) &&
            spread <= opt.f_tol * (std::abs(s.values[best]) + opt.f_tol) &&
            diameter <= opt.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += s.points[order[k]][i] / dn;

        auto along = [&](double t, std::vector<double>& out) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = centroid[i] + t * (s.points[worst][i] - centroid[i]);
            project(out, lower, upper);
        };

        along(-alpha, trial);
        const double fr = safe_eval(f, trial, res.evaluations);
        if (fr < s.values[best]) {
            along(-alpha * beta, trial2);
            const double fe = safe_eval(f, trial2, res.evaluations);
            if (fe < fr) {
                s.points[worst] = trial2;
                s.values[worst] = fe;
            } else {
                s.points[worst] = trial;
                s.values[worst] = fr;
            }
            continue;
        }
        if (fr < s.values[second]) {
            s.points[worst] = trial;
            s.values[worst] = fr;
            continue;
        }
        // contraction: outside when the reflection improved on the worst point
        const bool outside = fr < s.values[worst];
        along(outside ? -alpha * gamma : gamma, trial2);
        const double fc = safe_eval(f, trial2, res.evaluations);
        if (fc < (outside ? fr : s.values[worst])) {
            s.points[worst] = trial2;
            s.values[worst] = fc;
            continue;
        }
        // shrink towards the best point
        for (std::size_t k = 1; k <= n; ++k) {
            auto& p = s.points[order[k]];
            for (std::size_t i = 0; i < n; ++i)
                p[i] = s.points[best][i] + delta * (p[i] - s.points[best][i]);
            project(p, lower, upper);
            s.values[order[k]] = safe_eval(f, p, res.evaluations);
        }
    }

    const auto it = std::min_element(s.values.begin(), s.values.end());
    const auto idx = static_cast<std::size_t>(it - s.values.begin());
    res.x = s.points[idx];
    res.value = *it;
    return res;
}

}  // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                        std::span<const double> upper, const NelderMeadOptions& options) {
    if (x0.empty()) throw ValueError("nelder_mead: empty start point");
    if ((!lower.empty() && lower.size() != x0.size()) ||
        (!upper.empty() && upper.size() != x0.size()))
        throw ValueError("nelder_mead: bound dimension mismatch");

    OptimResult best = run_once(f, std::move(x0), lower, upper, options, options.initial_step);
    for (int r = 0; r < options.restarts; ++r) {
        OptimResult next = run_once(f, best.x, lower, upper, options, options.initial_step * 0.5);
        next.iterations += best.iterations;
        next.evaluations += best.evaluations;
        if (next.value <= best.value) {
            best = std::move(next);
        } else {
            best.iterations = next.iterations;
            best.evaluations = next.evaluations;
            best.converged = best.converged || next.converged;
        }
    }
    return best;
}

OptimResult minimize_positive(const Objective& f, std::span<const double> x0,
                              std::span<const double> lower, std::span<const double> upper,
                              const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (lower.size() != n || upper.size() != n)
        throw ValueError("minimize_positive: bound dimension mismatch");
    std::vector<double> z0(n), zlo(n), zhi(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] > 0.0) || !(upper[i] >= lower[i]))
            throw ValueError("minimize_positive: bounds must satisfy 0 < lower <= upper");
        zlo[i] = std::log(lower[i]);
        zhi[i] = std::log(upper[i]);
        z0[i] = std::clamp(std::log(std::max(x0[i], lower[i])), zlo[i], zhi[i]);
    }
    std::vector<double> x(n);
    const Objective g = [&](std::span<const double> z) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(z[i]);
        return f(x);
    };
    OptimResult res = nelder_mead(g, z0, zlo, zhi, options);
    for (auto& v : res.x) v = std::exp(v);
    return res;
}

}  // namespace cogarch
