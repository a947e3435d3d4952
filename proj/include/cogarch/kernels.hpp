#pragma once

// Data-parallel inner loops used by the moment estimators: plain and weighted
// dot products, and the lagged cross-product sums built from them.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled when the target supports them and
// selected at runtime; they agree with the scalar path up to summation order.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cogarch::kernels {

enum class Isa { scalar, avx2, neon };

[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

/// True when the variant is compiled in and the running CPU supports it.
[[nodiscard]] bool isa_available(Isa isa) noexcept;

/// Best available variant, unless overridden by COGARCH_ISA=scalar|avx2|neon.
[[nodiscard]] Isa active_isa() noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept;
}  // namespace scalar

#if defined(COGARCH_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(COGARCH_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept;
}  // namespace neon
#endif

/// Σ a_i b_i
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b,
                         Isa isa = active_isa());

/// Σ w_i a_i b_i
[[nodiscard]] double weighted_dot(std::span<const double> w, std::span<const double> a,
                                  std::span<const double> b, Isa isa = active_isa());

/// out[h] = Σ_{n < terms} y[n+h]·y[n] for h = 0..max_lag. Requires y.size() ≥ terms + max_lag.
[[nodiscard]] std::vector<double> lagged_products(std::span<const double> y, std::size_t terms,
                                                  std::size_t max_lag, Isa isa = active_isa());

/// Row-major (max_lag × max_lag) matrix with entry (h−1, k−1) =
/// Σ_{n < terms} y[n]² · y[n+h] · y[n+k], for h, k = 1..max_lag.
[[nodiscard]] std::vector<double> lagged_gram(std::span<const double> y, std::size_t terms,
                                              std::size_t max_lag, Isa isa = active_isa());

}  // namespace cogarch::kernels
