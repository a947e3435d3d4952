#pragma once

#include <Eigen/Dense>

namespace cogarch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (degree 3..13 chosen from the 1-norm).
/// Throws NumericalError if the input or the result is not finite.
[[nodiscard]] Matrix expm(const Matrix& m);

/// M = ∫₀^∞ e^{At} e eᵀ e^{Aᵀt} dt for e = last unit vector, i.e. the solution of
/// A M + M Aᵀ = −e eᵀ. Solved through the Kronecker-product linear system.
/// Throws StabilityError if A has an eigenvalue with non-negative real part.
[[nodiscard]] Matrix lyapunov_integral(const Matrix& a);

/// Largest real part over the eigenvalues of a square matrix.
[[nodiscard]] double spectral_abscissa(const Matrix& a);

/// Unit vector with a one in the last slot.
[[nodiscard]] Vector last_unit(Eigen::Index n);

}  // namespace cogarch
