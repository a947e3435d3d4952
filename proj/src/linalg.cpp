#include "cogarch/linalg.hpp"

#include "cogarch/errors.hpp"

#include <array>
#include <cmath>

namespace cogarch {

namespace {

// Higham (2005) degree thresholds for the 1-norm.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& c) {
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix u = c[1] * ident;
    Matrix v = c[0] * ident;
    Matrix power = ident;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        v += c[k] * power;
        if (k + 1 < N) u += c[k + 1] * power;
    }
    u = a * u;
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
    const auto& c = kPade13;
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    Matrix u = a * (a6 * (c[13] * a6 + c[11] * a4 + c[9] * a2) + c[7] * a6 + c[5] * a4 +
                     c[3] * a2 + c[1] * ident);
    Matrix v = a6 * (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 + c[4] * a4 +
               c[2] * a2 + c[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValueError("expm: matrix must be square");
    if (!m.allFinite()) throw NumericalError("expm: non-finite input");
    if (m.size() == 0) return m;

    const double nrm = norm1(m);
    Matrix result;
    if (nrm <= kTheta[0]) {
        result = pade_low(m, kPade3);
    } else if (nrm <= kTheta[1]) {
        result = pade_low(m, kPade5);
    } else if (nrm <= kTheta[2]) {
        result = pade_low(m, kPade7);
    } else if (nrm <= kTheta[3]) {
        result = pade_low(m, kPade9);
    } else {
        int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta[4]))));
        result = pade13(m / std::ldexp(1.0, s));
        for (int i = 0; i < s; ++i) result = result * result;
    }
    if (!result.allFinite()) throw NumericalError("expm: overflow");
    return result;
}

double spectral_abscissa(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return es.eigenvalues().real().maxCoeff();
}

Vector last_unit(Eigen::Index n) {
    Vector e = Vector::Zero(n);
    e(n - 1) = 1.0;
    return e;
}

Matrix lyapunov_integral(const Matrix& a) {
    const auto q = a.rows();
    if (q != a.cols() || q == 0) throw ValueError("lyapunov_integral: matrix must be square");
    if (spectral_abscissa(a) >= 0.0)
        throw StabilityError("lyapunov_integral: matrix has an eigenvalue with Re >= 0");

    // (I ⊗ A + A ⊗ I) vec(M) = -vec(e eᵀ), column-major vec.
    const auto n = q * q;
    Matrix k = Matrix::Zero(n, n);
    const Matrix ident = Matrix::Identity(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            k.block(i * q, j * q, q, q) += ident(i, j) * a;
            k.block(i * q, j * q, q, q) += a(i, j) * ident;
        }
    }
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = -1.0;
    Vector sol = k.fullPivLu().solve(rhs);
    Matrix out = Eigen::Map<Matrix>(sol.data(), q, q);
    return 0.5 * (out + out.transpose());
}

}  // namespace cogarch
