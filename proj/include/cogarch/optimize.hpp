#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cogarch {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    int max_iterations = 2000;
    double f_tol = 1e-8;        // relative spread of simplex values
    double x_tol = 1e-7;        // simplex diameter (in the optimizer's coordinates)
    double initial_step = 0.1;
    int restarts = 1;           // restarts from a perturbed best point
};

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimisation with adaptive coefficients.
/// Candidate points are projected onto [lower, upper] when bounds are given.
[[nodiscard]] OptimResult nelder_mead(const Objective& f, std::vector<double> x0,
                                      std::span<const double> lower = {},
                                      std::span<const double> upper = {},
                                      const NelderMeadOptions& options = {});

/// Minimises over strictly positive parameters by running the simplex on
/// log(x) with the box [log lower, log upper].
[[nodiscard]] OptimResult minimize_positive(const Objective& f, std::span<const double> x0,
                                            std::span<const double> lower,
                                            std::span<const double> upper,
                                            const NelderMeadOptions& options = {});

}  // namespace cogarch
