#ifndef QUASISTEADY_COMPANION_HPP
#define QUASISTEADY_COMPANION_HPP

#include <cmath>
#include <complex>

#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "quasisteady/problem.hpp"

namespace qs {

// Per-mode symbol variables. lambda (and nu = lambda / mu^l) may carry an
// explicit infinity marker for the limit problems.
struct ModeParameters {
    RVector xi_prime;
    Complex lambda{0.0, 0.0};
    bool lambda_infinite = false;
    double eta = 1.0;
    double mu = 1.0;       // (eta + |xi'|^{2m})^{1/2m}
    RVector zeta;          // xi' / mu
    double a = 1.0;        // eta / mu^{2m}
    double a_tilde = 1.0;  // a^{1/2m}
    double b = 0.0;        // |xi'| / mu
    Complex nu{0.0, 0.0};  // lambda / mu^l
    bool nu_infinite = false;
};

inline ModeParameters mode_parameters(double eta, const RVector& xi_prime, Complex lambda, int m,
                                      int l, bool lambda_infinite = false) {
    if (!(eta > 0.0)) throw Error("mode_parameters requires eta > 0");
    ModeParameters mp;
    mp.xi_prime = xi_prime;
    mp.lambda = lambda;
    mp.lambda_infinite = lambda_infinite;
    mp.eta = eta;
    const double r = xi_prime.norm();
    mp.mu = std::pow(eta + std::pow(r, 2 * m), 1.0 / (2 * m));
    mp.zeta = xi_prime / mp.mu;
    mp.a = eta / std::pow(mp.mu, 2 * m);
    mp.a_tilde = std::pow(mp.a, 1.0 / (2 * m));
    mp.b = r / mp.mu;
    mp.nu_infinite = lambda_infinite;
    mp.nu = lambda_infinite ? Complex(0, 0) : lambda / std::pow(mp.mu, l);
    return mp;
}

// Builds the mode at a prescribed scaled point: given zeta with |zeta| < 1
// and eta > 0, the constraint |zeta|^{2m} + a = 1 fixes a, and mu, xi', lambda
// follow from mu = eta^{1/2m} / a_tilde and lambda = nu mu^l.
inline ModeParameters mode_parameters_from_zeta(double eta, const RVector& zeta, Complex nu, int m,
                                                int l, bool nu_infinite = false) {
    const double zn = std::pow(zeta.norm(), 2 * m);
    if (!(zn < 1.0)) throw Error("mode_parameters_from_zeta requires |zeta| < 1");
    ModeParameters mp;
    mp.eta = eta;
    mp.a = 1.0 - zn;
    mp.a_tilde = std::pow(mp.a, 1.0 / (2 * m));
    mp.mu = std::pow(eta, 1.0 / (2 * m)) / mp.a_tilde;
    mp.zeta = zeta;
    mp.xi_prime = zeta * mp.mu;
    mp.b = zeta.norm();
    mp.nu = nu;
    mp.nu_infinite = nu_infinite;
    mp.lambda_infinite = nu_infinite;
    mp.lambda = nu_infinite ? Complex(0, 0) : nu * std::pow(mp.mu, l);
    return mp;
}

// Block companion matrix A_0(zeta, a) of the interior ODE D_y w = mu A_0 w:
// identity superdiagonal blocks and last block row (c_{2m}, ..., c_1) with
// c_j = -a_0^{-1} a_j(zeta) and c_{2m} = -a_0^{-1}(a_{2m}(zeta) + a I).
inline CMatrix build_companion(const ProblemSpec& spec, const RVector& zeta, double a) {
    const int d = spec.dimE;
    const int N = 2 * spec.m;
    auto ak = normal_coefficients(spec, zeta);
    const CMatrix a0inv = ak[0].fullPivLu().inverse();

    CMatrix A = CMatrix::Zero(N * d, N * d);
    for (int r = 0; r + 1 < N; ++r)
        A.block(r * d, (r + 1) * d, d, d) = CMatrix::Identity(d, d);
    for (int col = 0; col < N; ++col) {
        const int j = N - col;  // coefficient index c_j sits at block column col
        CMatrix num = ak[j];
        if (j == N) num += a * CMatrix::Identity(d, d);
        A.block((N - 1) * d, col * d, d, d) = -a0inv * num;
    }
    return A;
}

struct SpectralSplittingError : Error {
    explicit SpectralSplittingError(const std::string& what) : Error(what) {}
};

// Spectral data of i A_0: the projection P_+ onto the unstable invariant
// subspace, an orthonormal basis of the stable one, and the restriction of
// i A_0 to it (upper triangular, from the sorted Schur form).
struct CompanionSystem {
    CMatrix A0;
    CMatrix P_plus;
    CMatrix stable_basis;      // 2m dimE x m dimE, orthonormal columns
    CMatrix stable_generator;  // m dimE x m dimE, eigenvalues with Re < 0
    CMatrix coupling;          // Sylvester block R: stable coords of P_minus

    int stable_dim() const { return static_cast<int>(stable_generator.rows()); }
    CVector stable_eigenvalues() const { return stable_generator.diagonal(); }
    double spectral_gap() const { return -stable_generator.diagonal().real().maxCoeff(); }

    // Stable coordinates of (I - P_+) w0 in the orthonormal basis.
    CVector stable_coordinates(const CVector& w0) const {
        return stable_basis.adjoint() * (w0 - P_plus * w0);
    }
};

namespace detail {

inline lapack_logical select_negative_re(const lapack_complex_double* z) {
    return reinterpret_cast<const std::complex<double>*>(z)->real() < 0.0 ? 1 : 0;
}

// Solves T11 R - R T22 = T12 for triangular T11, T22 (Schur blocks).
inline CMatrix triangular_sylvester(const CMatrix& T11, const CMatrix& T22, const CMatrix& T12) {
    CMatrix R = T12;
    double scale = 1.0;
    const lapack_int m = static_cast<lapack_int>(T11.rows());
    const lapack_int n = static_cast<lapack_int>(T22.rows());
    lapack_int info = LAPACKE_ztrsyl(
        LAPACK_COL_MAJOR, 'N', 'N', -1, m, n,
        reinterpret_cast<const lapack_complex_double*>(T11.data()), std::max<lapack_int>(1, m),
        reinterpret_cast<const lapack_complex_double*>(T22.data()), std::max<lapack_int>(1, n),
        reinterpret_cast<lapack_complex_double*>(R.data()), std::max<lapack_int>(1, m), &scale);
    if (info < 0) throw Error("ztrsyl failed with info " + std::to_string(info));
    return R / scale;
}

}  // namespace detail

// Splits the spectrum of i A_0 by the sign of the real part via a sorted
// Schur decomposition (stable block leading). Fails loudly when an
// eigenvalue sits within tol_rel * ||A_0|| of the imaginary axis.
inline CompanionSystem stable_projection(const CMatrix& A0, double tol_rel = 1e-10) {
    const int N = static_cast<int>(A0.rows());
    CompanionSystem sys;
    sys.A0 = A0;

    CMatrix T = Complex(0, 1) * A0;
    CMatrix Q(N, N);
    CVector w(N);
    lapack_int sdim = 0;
    lapack_int info = LAPACKE_zgees(
        LAPACK_COL_MAJOR, 'V', 'S', detail::select_negative_re, N,
        reinterpret_cast<lapack_complex_double*>(T.data()), N, &sdim,
        reinterpret_cast<lapack_complex_double*>(w.data()),
        reinterpret_cast<lapack_complex_double*>(Q.data()), N);
    if (info != 0) throw Error("zgees failed with info " + std::to_string(info));

    const double scale = std::max(A0.norm(), 1e-300);
    double min_abs_re = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) min_abs_re = std::min(min_abs_re, std::abs(w(i).real()));
    if (min_abs_re < tol_rel * scale)
        throw SpectralSplittingError(
            "eigenvalue of iA0 within " + std::to_string(tol_rel) +
            " * ||A0|| of the imaginary axis (|Re| = " + std::to_string(min_abs_re) + ")");
    if (sdim == 0 || sdim == N)
        throw SpectralSplittingError("spectrum of iA0 does not split (stable dimension " +
                                     std::to_string(sdim) + " of " + std::to_string(N) + ")");

    const int s = sdim;
    const CMatrix T11 = T.topLeftCorner(s, s);
    const CMatrix T22 = T.bottomRightCorner(N - s, N - s);
    const CMatrix T12 = T.topRightCorner(s, N - s);
    const CMatrix R = detail::triangular_sylvester(T11, T22, T12);

    // Spectral projection onto the stable subspace along the unstable one:
    // P_- = Q [I R; 0 0] Q^*; P_+ = I - P_-.
    CMatrix Pm = CMatrix::Zero(N, N);
    Pm.topLeftCorner(s, s) = CMatrix::Identity(s, s);
    Pm.topRightCorner(s, N - s) = R;
    sys.P_plus = CMatrix::Identity(N, N) - Q * Pm * Q.adjoint();
    sys.stable_basis = Q.leftCols(s);
    sys.stable_generator = T11;
    sys.coupling = R;
    return sys;
}

inline CompanionSystem stable_projection(const ProblemSpec& spec, const RVector& zeta, double a,
                                         double tol_rel = 1e-10) {
    CompanionSystem sys = stable_projection(build_companion(spec, zeta, a), tol_rel);
    if (sys.stable_dim() != spec.m * spec.dimE)
        throw SpectralSplittingError("stable rank " + std::to_string(sys.stable_dim()) +
                                     " differs from m*dimE = " + std::to_string(spec.m * spec.dimE));
    return sys;
}

// Value at height y >= 0 of the decaying half-line solution of
// D_y w = mu A_0 w with boundary value (I - P_+) w0. Only the stable block
// is ever exponentiated.
inline CVector evaluate_decaying_solution(const CompanionSystem& sys, double mu, const CVector& w0,
                                          double y) {
    if (y < 0.0) throw Error("evaluate_decaying_solution requires y >= 0");
    const CVector s = sys.stable_coordinates(w0);
    const CMatrix E = (mu * y * sys.stable_generator).exp();
    return sys.stable_basis * (E * s);
}

}  // namespace qs

#endif
