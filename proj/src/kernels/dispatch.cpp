#include "cogarch/kernels.hpp"

#include "cogarch/errors.hpp"

#include <cstdlib>
#include <string>

namespace cogarch::kernels {

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t) noexcept;
using WeightedDotFn = double (*)(const double*, const double*, const double*, std::size_t) noexcept;

struct Table {
    DotFn dot;
    WeightedDotFn weighted_dot;
};

Table table_for(Isa isa) {
    switch (isa) {
#if defined(COGARCH_HAVE_AVX2)
        case Isa::avx2:
            return {&avx2::dot, &avx2::weighted_dot};
#endif
#if defined(COGARCH_HAVE_NEON)
        case Isa::neon:
            return {&neon::dot, &neon::weighted_dot};
#endif
        default:
            return {&scalar::dot, &scalar::weighted_dot};
    }
}

Isa detect() noexcept {
    if (const char* env = std::getenv("COGARCH_ISA")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
        if (want == "neon" && isa_available(Isa::neon)) return Isa::neon;
    }
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

Table checked_table(Isa isa) {
    if (!isa_available(isa))
        throw ValueError(std::string("kernel variant not available: ") + std::string(isa_name(isa)));
    return table_for(isa);
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
        default: return "scalar";
    }
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(COGARCH_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(COGARCH_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept {
    static const Isa isa = detect();
    return isa;
}

double dot(std::span<const double> a, std::span<const double> b, Isa isa) {
    if (a.size() != b.size()) throw ValueError("dot: length mismatch");
    return checked_table(isa).dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b, Isa isa) {
    if (a.size() != b.size() || w.size() != a.size())
        throw ValueError("weighted_dot: length mismatch");
    return checked_table(isa).weighted_dot(w.data(), a.data(), b.data(), a.size());
}

std::vector<double> lagged_products(std::span<const double> y, std::size_t terms,
                                    std::size_t max_lag, Isa isa) {
    if (y.size() < terms + max_lag) throw ValueError("lagged_products: series too short");
    const Table t = checked_table(isa);
    std::vector<double> out(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h) out[h] = t.dot(y.data() + h, y.data(), terms);
    return out;
}

std::vector<double> lagged_gram(std::span<const double> y, std::size_t terms, std::size_t max_lag,
                                Isa isa) {
    if (y.size() < terms + max_lag) throw ValueError("lagged_gram: series too short");
    const Table t = checked_table(isa);
    std::vector<double> w(terms);
    for (std::size_t n = 0; n < terms; ++n) w[n] = y[n] * y[n];

    std::vector<double> out(max_lag * max_lag);
    for (std::size_t h = 1; h <= max_lag; ++h) {
        for (std::size_t k = h; k <= max_lag; ++k) {
            const double v = t.weighted_dot(w.data(), y.data() + h, y.data() + k, terms);
            out[(h - 1) * max_lag + (k - 1)] = v;
            out[(k - 1) * max_lag + (h - 1)] = v;
        }
    }
    return out;
}

}  // namespace cogarch::kernels
