#ifndef QUASISTEADY_CHECKS_HPP
#define QUASISTEADY_CHECKS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "quasisteady/boundary.hpp"
#include "quasisteady/ellipticity.hpp"
#include "quasisteady/report.hpp"

namespace qs {

// Scan resolution for the solvability checks. The (zeta, a) pairs live on the
// constrained manifold |zeta|^{2m} + a = 1 that the mode map produces; the
// a -> 0 and |nu| -> infinity faces are handled by the limit matrices.
struct GridSpec {
    int zeta_count = 33;
    int nu_radial = 33;
    int nu_angular = 17;
    int eta_count = 9;
    double theta = 0.75 * std::numbers::pi;  // sector half-angle, > pi/2
    double nu_r_min = 1e-3;
    double nu_r_max = 1e3;
    double eta_min = 1e-2;
    double eta_max = 1e4;
    double threshold_rel = 1e-6;   // pass iff min sv >= threshold_rel * max ||M||
    double splitting_tol = 1e-10;

    GridSpec refined(int factor = 2) const {
        GridSpec g = *this;
        g.zeta_count = factor * (zeta_count - 1) + 1;
        g.nu_radial = factor * (nu_radial - 1) + 1;
        g.nu_angular = factor * (nu_angular - 1) + 1;
        g.eta_count = factor * (eta_count - 1) + 1;
        return g;
    }

    nlohmann::json to_json() const {
        return {{"zeta_count", zeta_count},
                {"nu_radial", nu_radial},
                {"nu_angular", nu_angular},
                {"eta_count", eta_count},
                {"theta", theta},
                {"nu_r", {nu_r_min, nu_r_max}},
                {"eta", {eta_min, eta_max}},
                {"parametrization", "|zeta|^{2m} + a = 1 with delegated a=0 and nu=inf faces"}};
    }
};

namespace detail {

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
    std::vector<double> g;
    if (count == 1) return {lo};
    for (int i = 0; i < count; ++i)
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return g;
}

// Grid on the closed unit ball of R^{n-1}: a symmetric line for one
// tangential dimension, a polar grid (with the full boundary circle) for two.
inline std::vector<RVector> ball_grid(int dim, int count) {
    std::vector<RVector> pts;
    if (dim == 1) {
        for (int i = 0; i < count; ++i) {
            RVector p(1);
            p << -1.0 + 2.0 * i / (count - 1);
            pts.push_back(p);
        }
    } else if (dim == 2) {
        for (int ir = 0; ir < count; ++ir) {
            const double r = static_cast<double>(ir) / (count - 1);
            const int na = (ir == 0) ? 1 : std::max(4, static_cast<int>(std::lround(count * r)));
            for (int ia = 0; ia < na; ++ia) {
                const double th = 2.0 * std::numbers::pi * ia / na;
                RVector p(2);
                p << r * std::cos(th), r * std::sin(th);
                pts.push_back(p);
            }
        }
    } else {
        throw Error("zeta grids support n-1 in {1, 2}");
    }
    return pts;
}

inline std::vector<RVector> sphere_grid(int dim, int count) {
    std::vector<RVector> pts;
    if (dim == 1) {
        RVector a(1), b(1);
        a << -1.0;
        b << 1.0;
        pts = {a, b};
    } else if (dim == 2) {
        for (int ia = 0; ia < std::max(4, count); ++ia) {
            const double th = 2.0 * std::numbers::pi * ia / std::max(4, count);
            RVector p(2);
            p << std::cos(th), std::sin(th);
            pts.push_back(p);
        }
    } else {
        throw Error("sphere grids support n-1 in {1, 2}");
    }
    return pts;
}

// Compactified sector points: nu = r e^{i phi} on a geometric radial grid,
// plus nu = 0. The r = infinity face is the caller's case (i).
inline std::vector<Complex> sector_grid(const GridSpec& g) {
    std::vector<Complex> nus;
    nus.emplace_back(0.0, 0.0);
    for (double r : geometric_grid(g.nu_r_min, g.nu_r_max, g.nu_radial))
        for (int ia = 0; ia < g.nu_angular; ++ia) {
            const double phi = -g.theta + 2.0 * g.theta * ia / (g.nu_angular - 1);
            nus.push_back(std::polar(r, phi));
        }
    return nus;
}

inline double min_singular_value(const CMatrix& M, double* norm_out = nullptr) {
    Eigen::JacobiSVD<CMatrix> svd(M);
    if (norm_out) *norm_out = svd.singularValues().maxCoeff();
    return svd.singularValues().minCoeff();
}

struct ScanAccumulator {
    VerificationReport rep;
    double max_norm = 0.0;

    explicit ScanAccumulator(Condition c) { rep.condition = c; }

    void record(const CMatrix& M, const Witness& w) {
        double norm = 0.0;
        const double sv = min_singular_value(M, &norm);
        max_norm = std::max(max_norm, norm);
        if (sv < rep.min_singular_value) {
            rep.min_singular_value = sv;
            rep.argmin_witness = w;
        }
    }

    VerificationReport finish(const GridSpec& g) {
        rep.threshold = g.threshold_rel * max_norm;
        rep.grid_description = g.to_json();
        rep.extra["max_matrix_norm"] = max_norm;
        return rep;
    }
};

inline Witness make_witness(const RVector& zeta, double a_tilde, Complex nu, bool nu_inf,
                            double eta) {
    Witness w;
    w.zeta = zeta;
    w.a_tilde = a_tilde;
    w.nu = nu;
    w.nu_infinite = nu_inf;
    w.nu_used = true;
    w.eta = eta;
    return w;
}

}  // namespace detail

// Lopatinskii-Shapiro scan: minimum smallest singular value of the scaled
// boundary matrices over (zeta, eta, nu) plus the limit faces. The corner
// nu = 0, zeta = 0 (a = 1) is scanned as well: eta > 0 keeps mu positive
// there, so it is not the excluded point (lambda, xi') = (0, 0).
inline VerificationReport check_LS(const ProblemSpec& spec, const GridSpec& grid) {
    const int l = spec.l();
    const auto nus = detail::sector_grid(grid);
    const auto etas = detail::geometric_grid(grid.eta_min, grid.eta_max, grid.eta_count);
    detail::ScanAccumulator acc(Condition::LS);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (const RVector& zeta : detail::ball_grid(spec.n - 1, grid.zeta_count)) {
        const double zpow = std::pow(zeta.norm(), 2 * spec.m);
        if (zpow > 1.0 - 1e-12) {
            // a = 0 face: the case (ii) limit family at c = nu, and case (i)
            // at nu = infinity.
            CompanionSystem sys = stable_projection(spec, zeta.normalized(), 0.0, grid.splitting_tol);
            const RVector zs = zeta.normalized();
            for (const Complex& c : nus)
                acc.record(assemble_limit_matrix(spec, sys, zs, LimitCase::ii(c)).M,
                           detail::make_witness(zs, 0.0, c, false, nan));
            acc.record(assemble_limit_matrix(spec, sys, zs, LimitCase::i_infinite_mu()).M,
                       detail::make_witness(zs, 0.0, Complex(0, 0), true, nan));
            continue;
        }
        const double a = 1.0 - zpow;
        CompanionSystem sys = stable_projection(spec, zeta, a, grid.splitting_tol);
        for (double eta : etas)
            for (const Complex& nu : nus) {
                ModeParameters mp = mode_parameters_from_zeta(eta, zeta, nu, spec.m, l);
                acc.record(assemble_boundary_matrix(spec, sys, mp).M,
                           detail::make_witness(zeta, mp.a_tilde, nu, false, eta));
            }
        acc.record(assemble_limit_matrix(spec, sys, zeta, LimitCase::i_finite_mu(a)).M,
                   detail::make_witness(zeta, std::pow(a, 1.0 / (2 * spec.m)), Complex(0, 0), true,
                                        nan));
    }
    return acc.finish(grid);
}

// The three asymptotic families: (i) rows j = 1..m on the constrained
// manifold (no sigma), (ii) the c-limit systems on |zeta| = 1, (iii) the pure
// elliptic system on |zeta| = 1.
inline std::array<VerificationReport, 3> check_ALS(const ProblemSpec& spec, const GridSpec& grid) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    detail::ScanAccumulator one(Condition::ALS_i), two(Condition::ALS_ii), three(Condition::ALS_iii);

    for (const RVector& zeta : detail::ball_grid(spec.n - 1, grid.zeta_count)) {
        const double zpow = std::pow(zeta.norm(), 2 * spec.m);
        if (zpow > 1.0 - 1e-12) continue;
        const double a = 1.0 - zpow;
        CompanionSystem sys = stable_projection(spec, zeta, a, grid.splitting_tol);
        Witness w = detail::make_witness(zeta, std::pow(a, 1.0 / (2 * spec.m)), Complex(0, 0),
                                         false, nan);
        w.nu_used = false;
        one.record(assemble_limit_matrix(spec, sys, zeta, LimitCase::iii()).M, w);
    }

    const auto nus = detail::sector_grid(grid);
    for (const RVector& zeta : detail::sphere_grid(spec.n - 1, grid.zeta_count)) {
        CompanionSystem sys = stable_projection(spec, zeta, 0.0, grid.splitting_tol);
        for (const Complex& c : nus)
            two.record(assemble_limit_matrix(spec, sys, zeta, LimitCase::ii(c)).M,
                       detail::make_witness(zeta, 0.0, c, false, nan));
        Witness w = detail::make_witness(zeta, 0.0, Complex(0, 0), false, nan);
        w.nu_used = false;
        three.record(assemble_limit_matrix(spec, sys, zeta, LimitCase::iii()).M, w);
    }
    return {one.finish(grid), two.finish(grid), three.finish(grid)};
}

// Numerical surrogate for the uniform multiplier bound: the sup over the
// compactified grid of the solution-operator blocks (M_w^0, M_sigma^0) of the
// inverse boundary matrix, together with the Lizorkin-type quantities
// xi'^alpha d^alpha M^0 for alpha in {0,1}^{n-1} estimated by central
// differences in xi'.
struct MultiplierBoundReport {
    double sup_Mw = 0.0;
    double sup_Msigma = 0.0;
    double sup_lizorkin = 0.0;
    double refinement_ratio = 1.0;
    bool bounded = false;
    nlohmann::json witness;
    nlohmann::json grid_description;

    nlohmann::json to_json() const {
        return {{"condition", "multiplier_bound"},
                {"sup_Mw", sup_Mw},
                {"sup_Msigma", sup_Msigma},
                {"sup_lizorkin", sup_lizorkin},
                {"refinement_ratio", refinement_ratio},
                {"verdict", bounded ? "bounded" : "no numerical evidence of uniform bound"},
                {"witness", witness},
                {"grid", grid_description}};
    }
};

namespace detail {

struct MultiplierSup {
    double sup_Mw = 0.0, sup_Msigma = 0.0, sup_lizorkin = 0.0;
    nlohmann::json witness;

    double total() const { return std::max({sup_Mw, sup_Msigma, sup_lizorkin}); }
};

inline double block_norm(const CMatrix& M) {
    if (!M.allFinite()) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues().maxCoeff();
}

// Solution-operator symbol (M_w^0, M_sigma^0) at (eta, xi', nu), expressed on
// the physical unknowns: rows 0..2m dimE give w^0 in E^{2m} (stable basis
// applied, so the value is independent of the Schur basis phase), the last
// dimF rows give sigma^0. The companion system is prebuilt by the caller
// (it does not depend on nu).
inline CMatrix scaled_inverse(const ProblemSpec& spec, const CompanionSystem& sys, double eta,
                              const RVector& xi_prime, Complex nu) {
    ModeParameters mp = mode_parameters(eta, xi_prime, Complex(0, 0), spec.m, spec.l());
    mp.nu = nu;
    mp.lambda = nu * std::pow(mp.mu, spec.l());
    const CMatrix M = assemble_boundary_matrix(spec, sys, mp).M;
    // SVD-based inverse: a (near-)singular matrix must surface as a huge
    // norm, not as the bounded pseudo-inverse a rank-revealing LU would give.
    Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    CVector sinv(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) sinv(i) = 1.0 / std::max(s(i), 1e-290);
    const CMatrix Minv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().adjoint();
    const int mE = spec.m * spec.dimE;
    CMatrix out(2 * mE + spec.dimF, Minv.cols());
    out.topRows(2 * mE) = sys.stable_basis * Minv.topRows(mE);
    out.bottomRows(spec.dimF) = Minv.bottomRows(spec.dimF);
    return out;
}

inline MultiplierSup multiplier_sup(const ProblemSpec& spec, const GridSpec& grid) {
    MultiplierSup out;
    const int mE = spec.m * spec.dimE;
    const int dF = spec.dimF;
    const int td = spec.n - 1;
    const auto nus = sector_grid(grid);
    const auto etas = geometric_grid(grid.eta_min, grid.eta_max, grid.eta_count);
    const auto radii = geometric_grid(1e-2, 1e2, grid.zeta_count);
    const auto dirs = sphere_grid(td, std::max(4, grid.zeta_count / 4));
    const double fd_rel = 1e-4;

    auto update = [&](double value, const char* what, double eta, const RVector& xi, Complex nu) {
        if (value > out.total()) {
            out.witness = {{"quantity", what},
                           {"eta", eta},
                           {"xi_prime", std::vector<double>(xi.data(), xi.data() + xi.size())},
                           {"nu", {{"re", nu.real()}, {"im", nu.imag()}}}};
        }
    };
    auto system_at = [&](double eta, const RVector& xi) {
        ModeParameters mp = mode_parameters(eta, xi, Complex(0, 0), spec.m, spec.l());
        return stable_projection(spec, mp.zeta, mp.a, grid.splitting_tol);
    };

    for (double eta : etas)
        for (const RVector& dir : dirs)
            for (double r : radii) {
                const RVector xi = r * dir;
                // companion systems at xi and at the finite-difference stencil
                const CompanionSystem sys = system_at(eta, xi);
                std::vector<double> h(td);
                std::vector<CompanionSystem> sys_p(td), sys_m(td);
                std::vector<RVector> xi_p(td), xi_m(td);
                for (int axis = 0; axis < td; ++axis) {
                    h[axis] = fd_rel * std::max(std::abs(xi(axis)), xi.norm());
                    xi_p[axis] = xi;
                    xi_p[axis](axis) += h[axis];
                    xi_m[axis] = xi;
                    xi_m[axis](axis) -= h[axis];
                    sys_p[axis] = system_at(eta, xi_p[axis]);
                    sys_m[axis] = system_at(eta, xi_m[axis]);
                }
                // corner stencil for the mixed difference (two tangential dims)
                std::vector<RVector> xi_c;
                std::vector<CompanionSystem> sys_c;
                if (td == 2) {
                    for (double s0 : {+1.0, -1.0})
                        for (double s1 : {+1.0, -1.0}) {
                            RVector x = xi;
                            x(0) += s0 * h[0];
                            x(1) += s1 * h[1];
                            xi_c.push_back(x);
                            sys_c.push_back(system_at(eta, x));
                        }
                }

                for (const Complex& nu : nus) {
                    const CMatrix M0 = scaled_inverse(spec, sys, eta, xi, nu);
                    const double nw = block_norm(M0.topRows(2 * mE));
                    const double ns = block_norm(M0.bottomRows(dF));
                    update(nw, "Mw", eta, xi, nu);
                    out.sup_Mw = std::max(out.sup_Mw, nw);
                    update(ns, "Msigma", eta, xi, nu);
                    out.sup_Msigma = std::max(out.sup_Msigma, ns);

                    for (int axis = 0; axis < td; ++axis) {
                        const CMatrix D = xi(axis) *
                                          (scaled_inverse(spec, sys_p[axis], eta, xi_p[axis], nu) -
                                           scaled_inverse(spec, sys_m[axis], eta, xi_m[axis], nu)) /
                                          (2.0 * h[axis]);
                        const double nd = block_norm(D);
                        update(nd, "lizorkin_first", eta, xi, nu);
                        out.sup_lizorkin = std::max(out.sup_lizorkin, nd);
                    }
                    if (td == 2) {
                        const CMatrix D2 = xi(0) * xi(1) *
                                           (scaled_inverse(spec, sys_c[0], eta, xi_c[0], nu) -
                                            scaled_inverse(spec, sys_c[1], eta, xi_c[1], nu) -
                                            scaled_inverse(spec, sys_c[2], eta, xi_c[2], nu) +
                                            scaled_inverse(spec, sys_c[3], eta, xi_c[3], nu)) /
                                           (4.0 * h[0] * h[1]);
                        const double nd2 = block_norm(D2);
                        update(nd2, "lizorkin_mixed", eta, xi, nu);
                        out.sup_lizorkin = std::max(out.sup_lizorkin, nd2);
                    }
                }
            }
    return out;
}

}  // namespace detail

// Two-resolution sup scan. The base level is the given grid coarsened by two;
// the refined level is the grid itself. "bounded" requires the sup to move by
// at most a factor two between levels and to stay below the saturation cap.
inline MultiplierBoundReport multiplier_bound_scan(const ProblemSpec& spec, const GridSpec& grid,
                                                   double saturation_cap = 1e12) {
    GridSpec coarse = grid;
    coarse.zeta_count = grid.zeta_count / 2 + 1;
    coarse.nu_radial = grid.nu_radial / 2 + 1;
    coarse.nu_angular = grid.nu_angular / 2 + 1;
    coarse.eta_count = grid.eta_count / 2 + 1;

    detail::MultiplierSup base = detail::multiplier_sup(spec, coarse);
    detail::MultiplierSup fine = detail::multiplier_sup(spec, grid);

    MultiplierBoundReport rep;
    rep.sup_Mw = fine.sup_Mw;
    rep.sup_Msigma = fine.sup_Msigma;
    rep.sup_lizorkin = fine.sup_lizorkin;
    rep.refinement_ratio = fine.total() / std::max(base.total(), 1e-300);
    rep.bounded = rep.refinement_ratio <= 2.0 && fine.total() < saturation_cap;
    rep.witness = fine.witness;
    rep.grid_description = grid.to_json();
    return rep;
}

}  // namespace qs

#endif
