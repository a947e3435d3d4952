#include "cogarch/model.hpp"

#include "cogarch/errors.hpp"
#include "cogarch/moments.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace cogarch {

namespace {

using Complex = std::complex<double>;

double vector_norm(const ComplexVector& v, double r) {
    if (std::isinf(r)) return v.cwiseAbs().maxCoeff();
    if (r == 1.0) return v.cwiseAbs().sum();
    if (r == 2.0) return v.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), r);
    return std::pow(s, 1.0 / r);
}

double dual_exponent(double r) {
    if (r == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(r)) return 1.0;
    return r / (r - 1.0);
}

// Eigenvalues of the companion matrix of c_0 + c_1 z + ... + c_n z^n.
ComplexVector polynomial_roots(const std::vector<double>& c) {
    const auto n = static_cast<Eigen::Index>(c.size()) - 1;
    Matrix comp = Matrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Matrix> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("polynomial roots did not converge");
    return es.eigenvalues();
}

bool is_real(const Complex& z) { return std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z)); }

}  // namespace

CogarchSpec build_spec(int p, int q, const std::vector<double>& a, const std::vector<double>& b,
                       double a0, LevySpec levy) {
    if (p < 1 || q < p) throw OrderError("orders must satisfy q >= p >= 1");
    if (q > kMaxOrder) throw OrderError("q exceeds the supported maximum of 16");
    if (static_cast<int>(a.size()) != p) throw ValueError("a must have length p");
    if (static_cast<int>(b.size()) != q) throw ValueError("b must have length q");
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw ValueError("a0 must be positive");
    for (double v : a)
        if (!std::isfinite(v)) throw ValueError("a has non-finite entries");
    for (double v : b)
        if (!std::isfinite(v)) throw ValueError("b has non-finite entries");
    validate(levy);

    CogarchSpec spec;
    spec.p = p;
    spec.q = q;
    spec.a = Vector::Zero(q);
    for (int i = 0; i < p; ++i) spec.a(i) = a[static_cast<std::size_t>(i)];
    spec.b = Eigen::Map<const Vector>(b.data(), q);
    spec.a0 = a0;
    spec.levy = std::move(levy);
    return spec;
}

CompanionMatrices companion(const CogarchSpec& spec, double mu) {
    if (!(mu >= 0.0)) throw ValueError("companion: mu must be non-negative");
    const int q = spec.q;
    CompanionMatrices out;
    out.A = Matrix::Zero(q, q);
    for (int i = 0; i + 1 < q; ++i) out.A(i, i + 1) = 1.0;
    for (int j = 0; j < q; ++j) out.A(q - 1, j) = -spec.b(q - 1 - j);
    out.e = last_unit(q);
    out.Atilde = out.A + mu * out.e * spec.a.transpose();
    return out;
}

EigenReport eigen_report(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ValueError("eigen_report: square matrix required");
    if (a.rows() > kMaxOrder) throw ValueError("eigen_report: dimension exceeds 16");
    if (!a.allFinite()) throw NumericalError("eigen_report: non-finite matrix");

    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigen_report: eigensolver failed");
    const Eigen::Index q = a.rows();

    std::vector<Complex> lam(es.eigenvalues().data(), es.eigenvalues().data() + q);
    for (auto& z : lam)
        if (is_real(z)) z = Complex(z.real(), 0.0);
    std::sort(lam.begin(), lam.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });

    EigenReport rep;
    rep.eigenvalues = Eigen::Map<ComplexVector>(lam.data(), q);
    rep.all_real = std::all_of(lam.begin(), lam.end(), [](const Complex& z) { return z.imag() == 0.0; });
    rep.all_negative_real_part =
        std::all_of(lam.begin(), lam.end(), [](const Complex& z) { return z.real() < 0.0; });

    const double tol = 1e-8 * std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
    rep.distinct = true;
    for (std::size_t i = 0; i < lam.size(); ++i)
        for (std::size_t j = i + 1; j < lam.size(); ++j)
            if (std::abs(lam[i] - lam[j]) <= tol) rep.distinct = false;

    if (!rep.distinct) {
        rep.condition_estimate = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.S.resize(q, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        Complex pw(1.0, 0.0);
        for (Eigen::Index i = 0; i < q; ++i) {
            rep.S(i, j) = pw;
            pw *= lam[static_cast<std::size_t>(j)];
        }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(rep.S);
    const auto& sv = svd.singularValues();
    rep.condition_estimate = sv(0) / sv(q - 1);
    rep.S_inv = rep.S.fullPivLu().inverse();
    return rep;
}

std::string to_string(TriState s) {
    switch (s) {
        case TriState::holds: return "holds";
        case TriState::fails: return "fails";
        case TriState::inconclusive: break;
    }
    return "inconclusive";
}

double rank_one_norm(const CogarchSpec& spec, const EigenReport& eigen, double norm_order) {
    if (!(norm_order >= 1.0)) throw ValueError("norm order must be >= 1");
    if (!eigen.distinct) throw PrecondError("eigenvalues are not distinct");
    const ComplexVector e = last_unit(spec.q).cast<Complex>();
    const ComplexVector u = eigen.S_inv * e;
    const ComplexVector v = eigen.S.transpose() * spec.a.cast<Complex>();
    return vector_norm(u, norm_order) * vector_norm(v, dual_exponent(norm_order));
}

StationarityResult check_stationarity(const CogarchSpec& spec, const EigenReport& eigen,
                                      double norm_order, std::size_t n_mc, std::uint64_t seed) {
    if (!eigen.distinct) throw PrecondError("stationarity check requires distinct eigenvalues");
    const double k = rank_one_norm(spec, eigen, norm_order);
    const MeasureIntegral integral = log_moment_integral(spec.levy, k, n_mc, seed);

    StationarityResult res;
    res.lhs = integral.value;
    res.lhs_std_error = integral.std_error;
    res.rhs = -eigen.eigenvalues(0).real();
    if (res.lhs + 3.0 * res.lhs_std_error < res.rhs) {
        res.status = TriState::holds;
    } else if (spec.p == 1 && spec.q == 1 && res.lhs - 3.0 * res.lhs_std_error > res.rhs) {
        res.status = TriState::fails;  // necessary as well as sufficient for (1,1)
    }
    return res;
}

double kernel_minimum(const CogarchSpec& spec, const EigenReport& eigen) {
    const double slowest = std::abs(eigen.eigenvalues(0).real());
    if (!(slowest > 0.0)) throw PrecondError("kernel_minimum: slowest eigenvalue has zero real part");
    const Matrix A = companion(spec, 0.0).A;
    const Vector e = last_unit(spec.q);
    constexpr int points = 2000;
    const double horizon = 20.0 / slowest;
    const double h = horizon / (points - 1);
    const Matrix step = expm(A * h);

    double lowest = spec.a.dot(e);
    Vector x = e;
    for (int i = 1; i < points; ++i) {
        x = i % 32 == 0 ? Vector(expm(A * (h * i)) * e) : Vector(step * x);
        lowest = std::min(lowest, spec.a.dot(x));
    }
    return lowest;
}

NonnegativityResult check_nonnegativity(const CogarchSpec& spec, const EigenReport& eigen) {
    const auto& lam = eigen.eigenvalues;
    const bool real_negative = eigen.all_real && eigen.all_negative_real_part;

    if (spec.p == 1 && real_negative && spec.a(0) >= 0.0) return {TriState::holds, "rule3"};

    if (spec.p == 2 && spec.q == 2) {
        if (!eigen.all_real) return {TriState::fails, "rule1"};
        const double a1 = spec.a(0);
        const double a2 = spec.a(1);
        const bool ok = a2 >= 0.0 && a1 >= -a2 * lam(0).real();
        return {ok ? TriState::holds : TriState::fails, "rule1"};
    }

    if (spec.p >= 2 && real_negative && spec.a(spec.p - 1) > 0.0) {
        std::vector<double> coeffs(spec.a.data(), spec.a.data() + spec.p);
        const ComplexVector roots = polynomial_roots(coeffs);
        bool usable = true;
        std::vector<double> gam;
        for (Eigen::Index i = 0; i < roots.size(); ++i) {
            if (!is_real(roots(i)) || !(roots(i).real() < 0.0)) usable = false;
            gam.push_back(roots(i).real());
        }
        if (usable) {
            std::sort(gam.begin(), gam.end(), std::greater<>());
            double sg = 0.0;
            double sl = 0.0;
            bool ok = true;
            for (std::size_t k = 0; k < gam.size(); ++k) {
                sg += gam[k];
                sl += lam(static_cast<Eigen::Index>(k)).real();
                if (sg > sl) ok = false;
            }
            if (ok) return {TriState::holds, "rule2"};
        }
    }

    if (!eigen.all_negative_real_part) return {TriState::inconclusive, "unstable"};
    const double lowest = kernel_minimum(spec, eigen);
    return {lowest < -1e-10 ? TriState::fails : TriState::holds, "numeric"};
}

MomentCheck check_moment_existence(const CogarchSpec& spec, const EigenReport& eigen, int kappa,
                                   double norm_order) {
    if (kappa < 1) throw ValueError("moment order must be >= 1");
    const double k = rank_one_norm(spec, eigen, norm_order);
    // ∫[(1 + k l²)^κ − 1] dν expanded binomially; both families have all moments.
    double lhs = 0.0;
    for (int j = 1; j <= kappa; ++j) {
        lhs += boost::math::binomial_coefficient<double>(static_cast<unsigned>(kappa),
                                                         static_cast<unsigned>(j)) *
               std::pow(k, j) * levy_measure_even_moment(spec.levy, j);
    }
    MomentCheck out;
    out.kappa = kappa;
    out.lhs = lhs;
    out.rhs = -eigen.eigenvalues(0).real() * kappa;
    out.margin = out.rhs - out.lhs;
    out.holds = out.lhs < out.rhs;
    return out;
}

Vector stationary_mean_Y(const CogarchSpec& spec, double mu) {
    const CompanionMatrices cm = companion(spec, mu);
    if (mu == 0.0) return Vector::Zero(spec.q);
    Eigen::FullPivLU<Matrix> lu(cm.Atilde);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SingularError("stationary mean: Atilde is singular");
    return -spec.a0 * mu * lu.solve(cm.e);
}

Matrix stationary_cov_Y(const CogarchSpec& spec, const LevyMoments& moments) {
    const double bq = spec.b(spec.q - 1);
    const double gap = bq - moments.mu * spec.a(0);
    if (!(gap > 0.0)) throw FeasibilityError("stationary covariance requires b_q > mu*a1");
    const double m = m_scalar(spec, moments);
    if (!(m < 1.0)) throw FeasibilityError("stationary covariance requires m < 1");
    const Matrix M = lyapunov_integral(companion(spec, moments.mu).Atilde);
    const double scale = spec.a0 * spec.a0 * bq * bq * moments.rho / (gap * gap * (1.0 - m));
    return scale * M;
}

DiagnosticsReport diagnose(const CogarchSpec& spec, const std::vector<int>& kappas,
                           double norm_order, std::size_t n_mc, std::uint64_t seed) {
    DiagnosticsReport rep;
    rep.eigen = eigen_report(companion(spec, 0.0).A);
    rep.notes.push_back("stationarity bound used: lhs < -Re(lambda_1)");

    if (rep.eigen.distinct) {
        const auto st = check_stationarity(spec, rep.eigen, norm_order, n_mc, seed);
        rep.stationary = st.status;
        rep.stationarity_lhs = st.lhs;
        rep.stationarity_std_error = st.lhs_std_error;
        rep.stationarity_rhs = st.rhs;
        for (int k : kappas) rep.moments.push_back(check_moment_existence(spec, rep.eigen, k, norm_order));
    } else {
        rep.stationarity_rhs = -rep.eigen.eigenvalues(0).real();
        rep.notes.push_back("eigenvalues are not distinct; stationarity and moment checks skipped");
    }
    const auto nn = check_nonnegativity(spec, rep.eigen);
    rep.nonnegative_variance = nn.status;
    rep.nonnegativity_rule = nn.rule;
    if (!is_symmetric_centered(spec.levy))
        rep.notes.push_back("driver is not symmetric and centered; estimation assumptions do not hold");
    return rep;
}

}  // namespace cogarch
