#ifndef QUASISTEADY_BOUNDARY_HPP
#define QUASISTEADY_BOUNDARY_HPP

#include <algorithm>
#include <vector>

#include "quasisteady/companion.hpp"

namespace qs {

// Scaled boundary solvability matrix acting on (stable coordinates of w^0,
// sigma^0), assembled at the compactified parameters (zeta, a_tilde, nu).
// Row block j carries B_j(zeta) restricted to the stable basis plus the
// sigma^0 column (nu + C_0(zeta) mu^{l_0-l}) / (nu + 1) for j = 0 and
// C_j(zeta) mu^{l_j-l} / (nu + 1) for j >= 1, where mu^{l_j-l} =
// eta^{(l_j-l)/2m} a_tilde^{l-l_j}.
struct BoundaryMatrix {
    CMatrix M;
    RVector rhs_scaling;  // diagonal mu^{-m_j}, mapping raw (h_j) to scaled h
    ModeParameters params;
};

namespace detail {

// mu^{l_j - l} for finite mu; at the a_tilde -> 0 faces the factor becomes
// the Kronecker delta delta_{l, l_j}, which the limit assemblies use instead.
inline double sigma_power(const ModeParameters& mp, int lj, int l) {
    return std::pow(mp.mu, static_cast<double>(lj - l));
}

}  // namespace detail

inline BoundaryMatrix assemble_boundary_matrix(const ProblemSpec& spec, const CompanionSystem& sys,
                                               const ModeParameters& params) {
    if (params.nu_infinite)
        throw Error("assemble_boundary_matrix requires finite nu; use the case (i) limit matrix");
    const int mE = spec.m * spec.dimE;
    const int dF = spec.dimF;
    if (sys.stable_dim() != mE) throw Error("stable basis has wrong rank for this spec");
    const int l = spec.l();
    const Complex denom = params.nu + 1.0;

    BoundaryMatrix bm;
    bm.params = params;
    bm.M = CMatrix::Zero(dF + mE, mE + dF);
    bm.rhs_scaling = RVector::Zero(dF + mE);

    // Row block 0 (the dynamic row, mapping into F).
    bm.M.block(0, 0, dF, mE) = boundary_block_row(spec, 0, params.zeta) * sys.stable_basis;
    CMatrix sigma0 = params.nu / denom * CMatrix::Identity(dF, dF);
    if (auto l0 = spec.l_j(0))
        sigma0 += tangential_symbol(spec, 0, params.zeta) * (detail::sigma_power(params, *l0, l) / denom);
    bm.M.block(0, mE, dF, dF) = sigma0;
    bm.rhs_scaling.head(dF).setConstant(std::pow(params.mu, -spec.boundary[0].order));

    for (int j = 1; j <= spec.m; ++j) {
        const int r0 = dF + (j - 1) * spec.dimE;
        bm.M.block(r0, 0, spec.dimE, mE) =
            boundary_block_row(spec, j, params.zeta) * sys.stable_basis;
        if (auto lj = spec.l_j(j))
            bm.M.block(r0, mE, spec.dimE, dF) =
                tangential_symbol(spec, j, params.zeta) * (detail::sigma_power(params, *lj, l) / denom);
        bm.rhs_scaling.segment(r0, spec.dimE)
            .setConstant(std::pow(params.mu, -spec.boundary[j].order));
    }
    return bm;
}

// Solves the full mode problem for raw data {h_j}: returns the boundary trace
// w^0 in E^{2m} (with P_+ w^0 = 0) and the surface unknown sigma, undoing the
// sigma = mu^{m_0} (lambda + mu^l)^{-1} sigma^0 substitution.
inline std::pair<CVector, CVector> solve_boundary_system(const ProblemSpec& spec,
                                                         const CompanionSystem& sys,
                                                         const ModeParameters& params,
                                                         const CVector& h) {
    const BoundaryMatrix bm = assemble_boundary_matrix(spec, sys, params);
    const int mE = spec.m * spec.dimE;
    const CVector x = bm.M.fullPivLu().solve((bm.rhs_scaling.array() * h.array()).matrix());
    const CVector w0 = sys.stable_basis * x.head(mE);
    const Complex unscale =
        std::pow(params.mu, spec.boundary[0].order) / (params.lambda + std::pow(params.mu, spec.l()));
    const CVector sigma = unscale * x.tail(spec.dimF);
    return {w0, sigma};
}

// The three limit families of the compactified scan (Prop.-4.2-style cases):
//   i_finite_mu  : |nu| -> infinity at a in (0, 1]; sigma^0 column is the
//                  unit block in row 0.
//   i_infinite_mu: |nu| -> infinity and a = 0 (principal-part companion).
//   ii           : nu -> c finite, a = 0; sigma^0 coefficients
//                  (c + delta_{l,l_0} C_0)/(c+1) and delta_{l,l_j} C_j/(c+1).
//   iii          : the pure elliptic system, rows j = 1..m at a = 0, no
//                  sigma column.
struct LimitCase {
    enum class Kind { i_finite_mu, i_infinite_mu, ii, iii } kind = Kind::iii;
    Complex c{0.0, 0.0};  // Kind::ii only
    double a = 1.0;       // Kind::i_finite_mu only

    static LimitCase i_finite_mu(double a) { return {Kind::i_finite_mu, Complex(0, 0), a}; }
    static LimitCase i_infinite_mu() { return {Kind::i_infinite_mu, Complex(0, 0), 0.0}; }
    static LimitCase ii(Complex c) { return {Kind::ii, c, 0.0}; }
    static LimitCase iii() { return {Kind::iii, Complex(0, 0), 0.0}; }
};

inline BoundaryMatrix assemble_limit_matrix(const ProblemSpec& spec, const CompanionSystem& sys,
                                            const RVector& zeta, const LimitCase& lc) {
    const int mE = spec.m * spec.dimE;
    const int dF = spec.dimF;
    const int l = spec.l();
    if (sys.stable_dim() != mE)
        throw Error("limit matrix is ill-posed: stable rank " + std::to_string(sys.stable_dim()) +
                    " does not match m*dimE");

    BoundaryMatrix bm;
    bm.params.zeta = zeta;
    bm.params.xi_prime = zeta;
    bm.params.a = (lc.kind == LimitCase::Kind::i_finite_mu) ? lc.a : 0.0;
    bm.params.a_tilde = std::pow(bm.params.a, 1.0 / (2 * spec.m));
    bm.params.nu = lc.c;
    bm.params.nu_infinite =
        lc.kind == LimitCase::Kind::i_finite_mu || lc.kind == LimitCase::Kind::i_infinite_mu;

    if (lc.kind == LimitCase::Kind::iii) {
        bm.M = CMatrix::Zero(mE, mE);
        bm.rhs_scaling = RVector::Ones(mE);
        for (int j = 1; j <= spec.m; ++j)
            bm.M.block((j - 1) * spec.dimE, 0, spec.dimE, mE) =
                boundary_block_row(spec, j, zeta) * sys.stable_basis;
        return bm;
    }

    bm.M = CMatrix::Zero(dF + mE, mE + dF);
    bm.rhs_scaling = RVector::Ones(dF + mE);
    bm.M.block(0, 0, dF, mE) = boundary_block_row(spec, 0, zeta) * sys.stable_basis;
    for (int j = 1; j <= spec.m; ++j)
        bm.M.block(dF + (j - 1) * spec.dimE, 0, spec.dimE, mE) =
            boundary_block_row(spec, j, zeta) * sys.stable_basis;

    switch (lc.kind) {
        case LimitCase::Kind::i_finite_mu:
        case LimitCase::Kind::i_infinite_mu:
            bm.M.block(0, mE, dF, dF) = CMatrix::Identity(dF, dF);
            break;
        case LimitCase::Kind::ii: {
            const Complex denom = lc.c + 1.0;
            CMatrix sigma0 = lc.c / denom * CMatrix::Identity(dF, dF);
            if (auto l0 = spec.l_j(0); l0 && *l0 == l)
                sigma0 += tangential_symbol(spec, 0, zeta) / denom;
            bm.M.block(0, mE, dF, dF) = sigma0;
            for (int j = 1; j <= spec.m; ++j)
                if (auto lj = spec.l_j(j); lj && *lj == l)
                    bm.M.block(dF + (j - 1) * spec.dimE, mE, spec.dimE, dF) =
                        tangential_symbol(spec, j, zeta) / denom;
            break;
        }
        default: break;
    }
    return bm;
}

inline BoundaryMatrix assemble_limit_matrix(const ProblemSpec& spec, const RVector& zeta,
                                            const LimitCase& lc) {
    const double a = (lc.kind == LimitCase::Kind::i_finite_mu) ? lc.a : 0.0;
    if (a == 0.0 && zeta.norm() < 1e-9)
        throw Error("a = 0 limit matrices need zeta away from 0");
    return assemble_limit_matrix(spec, stable_projection(spec, zeta, a), zeta, lc);
}

// ---------------------------------------------------------------------------
// Root-basis ("exponential basis") assembly, the unscaled route used by the
// determinant oracles. Scalar problems only (dimE = dimF = 1): the decaying
// solution space of (shift + A_#(xi', D_y)) v = 0 is spanned by
// y^d e^{-z_r y} over the roots z_r with Re z_r > 0, which is exactly the
// parametrization the worked examples print.
// ---------------------------------------------------------------------------

struct StableRootBasis {
    std::vector<Complex> roots;      // distinct stable roots
    std::vector<int> multiplicity;   // same length; multiplicities sum to m
    int total = 0;

    // index of basis function (root r, power d) in column ordering
    std::vector<std::pair<int, int>> layout() const {
        std::vector<std::pair<int, int>> cols;
        for (int r = 0; r < static_cast<int>(roots.size()); ++r)
            for (int d = 0; d < multiplicity[r]; ++d) cols.emplace_back(r, d);
        return cols;
    }
};

namespace detail {

// Coefficients (ascending in z) of p(z) = shift + sum_k a_k(xi') (i z)^{2m-k}.
inline std::vector<Complex> normal_polynomial(const ProblemSpec& spec, const RVector& xi_prime,
                                              double shift) {
    const auto ak = normal_coefficients(spec, xi_prime);
    const int N = 2 * spec.m;
    std::vector<Complex> c(N + 1, Complex(0, 0));
    for (int k = 0; k <= N; ++k) c[N - k] += ak[k](0, 0) * std::pow(Complex(0, 1), N - k);
    c[0] += shift;
    return c;
}

// Coefficients of B_j^{poly}(z) = B_{j#}(xi', D_y) e^{-z y}|_{y=0}
//                               = sum_k b_{jk}(xi') (i z)^{m_j - k}.
inline std::vector<Complex> boundary_polynomial(const ProblemSpec& spec, int j,
                                                const RVector& xi_prime) {
    const auto bk = boundary_normal_coefficients(spec, j, xi_prime);
    const int mj = spec.boundary[j].order;
    std::vector<Complex> c(mj + 1, Complex(0, 0));
    for (int k = 0; k <= mj; ++k) c[mj - k] += bk[k](0, 0) * std::pow(Complex(0, 1), mj - k);
    return c;
}

inline Complex poly_eval(const std::vector<Complex>& c, Complex z) {
    Complex acc(0, 0);
    for (int r = static_cast<int>(c.size()) - 1; r >= 0; --r) acc = acc * z + c[r];
    return acc;
}

inline std::vector<Complex> poly_derivative(const std::vector<Complex>& c) {
    if (c.size() <= 1) return {Complex(0, 0)};
    std::vector<Complex> d(c.size() - 1);
    for (size_t r = 1; r < c.size(); ++r) d[r - 1] = static_cast<double>(r) * c[r];
    return d;
}

inline std::vector<Complex> polynomial_roots(std::vector<Complex> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) throw Error("cannot take roots of a constant polynomial");
    CMatrix comp = CMatrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::ComplexEigenSolver<CMatrix> eig(comp, false);
    std::vector<Complex> roots(eig.eigenvalues().data(), eig.eigenvalues().data() + deg);
    return roots;
}

}  // namespace detail

// Stable roots (Re z > 0) of shift + A_#(xi', i z) for scalar interior
// symbols, clustered into multiplicities. cluster_tol merges numerically
// coincident roots (exact multiple roots land ~sqrt(eps) apart).
inline StableRootBasis stable_root_basis(const ProblemSpec& spec, const RVector& xi_prime,
                                         double shift, double cluster_tol = 1e-6) {
    if (spec.dimE != 1)
        throw Error("root-basis assembly requires dimE = 1 (scalar interior operator)");
    auto roots = detail::polynomial_roots(detail::normal_polynomial(spec, xi_prime, shift));
    double scale = 0.0;
    for (const Complex& z : roots) scale = std::max(scale, std::abs(z));
    scale = std::max(scale, 1e-12);

    std::vector<Complex> stable;
    for (const Complex& z : roots)
        if (z.real() > 0.0) stable.push_back(z);
    if (static_cast<int>(stable.size()) != spec.m)
        throw Error("expected m = " + std::to_string(spec.m) + " stable roots, found " +
                    std::to_string(stable.size()));
    std::sort(stable.begin(), stable.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    StableRootBasis basis;
    for (const Complex& z : stable) {
        if (!basis.roots.empty() && std::abs(z - basis.roots.back()) < cluster_tol * scale) {
            // extend the cluster, keeping the running mean as representative
            const int mcount = basis.multiplicity.back();
            basis.roots.back() = (basis.roots.back() * static_cast<double>(mcount) + z) /
                                 static_cast<double>(mcount + 1);
            ++basis.multiplicity.back();
        } else {
            basis.roots.push_back(z);
            basis.multiplicity.push_back(1);
        }
        ++basis.total;
    }
    return basis;
}

// B_{j#}(xi', D_y) [y^d e^{-z y}] |_{y=0} = (-d/dz)^d B_j^{poly}(z).
inline Complex boundary_entry(const std::vector<Complex>& bpoly, Complex z, int d) {
    std::vector<Complex> p = bpoly;
    for (int r = 0; r < d; ++r) p = detail::poly_derivative(p);
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    return sign * detail::poly_eval(p, z);
}

// Families of the unscaled assemblies used by the oracles.
struct RawSystem {
    enum class Family {
        ls,        // rows j = 0..m with sigma column (lambda + C_0, C_j); eta shift
        als_one,   // rows j = 1..m, eta shift, no sigma
        als_two,   // rows j = 0..m, principal shiftless symbol, sigma column
                   //   (lambda + delta_{l,l_0} C_0, delta_{l,l_j} C_j)
        als_three  // rows j = 1..m, shiftless, no sigma
    } family = Family::ls;
    Complex lambda{0, 0};
};

struct RawBoundaryMatrix {
    CMatrix M;
    StableRootBasis basis;
};

// Assembles the unscaled boundary system in the exponential basis: the matrix
// the worked examples display, with columns ordered by root.
inline RawBoundaryMatrix assemble_raw_system(const ProblemSpec& spec, const RVector& xi_prime,
                                             double eta, const RawSystem& sys) {
    if (spec.dimE != 1 || spec.dimF != 1)
        throw Error("raw assembly requires dimE = dimF = 1");
    const bool shifted =
        sys.family == RawSystem::Family::ls || sys.family == RawSystem::Family::als_one;
    const bool with_sigma =
        sys.family == RawSystem::Family::ls || sys.family == RawSystem::Family::als_two;
    const bool deltas = sys.family == RawSystem::Family::als_two;
    const int l = spec.l();

    RawBoundaryMatrix out;
    out.basis = stable_root_basis(spec, xi_prime, shifted ? eta : 0.0);
    const auto cols = out.basis.layout();
    const int rows0 = with_sigma ? 0 : 1;  // first boundary row included
    const int nrows = (spec.m + 1 - rows0);
    const int ncols = out.basis.total + (with_sigma ? 1 : 0);
    if (nrows != ncols) throw Error("raw system is not square for this spec");

    out.M = CMatrix::Zero(nrows, ncols);
    for (int j = rows0; j <= spec.m; ++j) {
        const auto bpoly = detail::boundary_polynomial(spec, j, xi_prime);
        const int row = j - rows0;
        for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
            auto [r, d] = cols[cidx];
            out.M(row, cidx) = boundary_entry(bpoly, out.basis.roots[r], d);
        }
        if (with_sigma) {
            Complex sig(0, 0);
            const auto lj = spec.l_j(j);
            const bool keep = !deltas || (lj && *lj == l);
            if (keep && lj) sig += tangential_symbol(spec, j, xi_prime)(0, 0);
            if (j == 0) sig += sys.lambda;
            out.M(row, out.basis.total) = sig;
        }
    }
    return out;
}

// Scaled w-jet (w_k = (D_y/mu)^{k-1} v(0)) of the basis function y^d e^{-zy}:
// D_y^s [y^d e^{-zy}]|_0 = (-1)^d i^s s!/(s-d)! z^{s-d} for s >= d, else 0.
inline CVector basis_function_jet(Complex z, int d, int two_m, double mu) {
    CVector jet = CVector::Zero(two_m);
    const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
    for (int s = d; s < two_m; ++s) {
        double perm = 1.0;  // s (s-1) ... (s-d+1)
        for (int r = 0; r < d; ++r) perm *= static_cast<double>(s - r);
        jet(s) = sgn * perm * std::pow(Complex(0, 1), s) * std::pow(z, s - d) / std::pow(mu, s);
    }
    return jet;
}

// Raw-route mode solve used to cross-check the scaled path: solves the
// unscaled LS system and reports (w^0, sigma) in companion coordinates.
inline std::pair<CVector, Complex> solve_raw_system(const ProblemSpec& spec,
                                                    const RVector& xi_prime, double eta,
                                                    Complex lambda, const CVector& h, double mu) {
    RawSystem rs;
    rs.family = RawSystem::Family::ls;
    rs.lambda = lambda;
    const RawBoundaryMatrix raw = assemble_raw_system(spec, xi_prime, eta, rs);
    const CVector x = raw.M.fullPivLu().solve(h);
    const auto cols = raw.basis.layout();
    CVector w0 = CVector::Zero(2 * spec.m);
    for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
        auto [r, d] = cols[cidx];
        w0 += x(cidx) * basis_function_jet(raw.basis.roots[r], d, 2 * spec.m, mu);
    }
    return {w0, x(raw.basis.total)};
}

}  // namespace qs

#endif
