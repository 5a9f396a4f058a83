#ifndef QUASISTEADY_ELLIPTICITY_HPP
#define QUASISTEADY_ELLIPTICITY_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "quasisteady/problem.hpp"
#include "quasisteady/report.hpp"

namespace qs {

// Deterministic low-discrepancy points on the unit sphere S^{n-1}:
// a uniform angle grid for n = 2, a Fibonacci lattice for n = 3, and a
// fixed-seed Gaussian fallback for higher n.
inline std::vector<RVector> unit_sphere_points(int n, int count) {
    std::vector<RVector> pts;
    pts.reserve(count);
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double th = 2.0 * std::numbers::pi * k / count;
            RVector p(2);
            p << std::cos(th), std::sin(th);
            pts.push_back(p);
        }
    } else if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = golden * k;
            RVector p(3);
            p << r * std::cos(th), r * std::sin(th), z;
            pts.push_back(p);
        }
    } else {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss;
        for (int k = 0; k < count; ++k) {
            RVector p(n);
            do {
                for (int i = 0; i < n; ++i) p(i) = gauss(rng);
            } while (p.norm() < 1e-6);
            pts.push_back(p.normalized());
        }
    }
    return pts;
}

// Normal ellipticity (E): every eigenvalue z of A_#(xi), |xi| = 1, satisfies
// Re z > 0 and |arg z| < pi/2 - margin.
inline VerificationReport check_ellipticity(const ProblemSpec& spec, int sphere_samples,
                                            double margin = 1e-8) {
    if (sphere_samples < 1) throw Error("sphere_samples must be >= 1");
    VerificationReport rep;
    rep.condition = Condition::E;
    rep.grid_description = {{"sphere_samples", sphere_samples}, {"margin", margin}, {"n", spec.n}};

    double min_re = std::numeric_limits<double>::infinity();
    double max_arg = 0.0;
    RVector witness_xi;
    Complex witness_eig{0, 0};
    bool failed = false;

    for (const RVector& xi : unit_sphere_points(spec.n, sphere_samples)) {
        const CMatrix sym = evaluate_interior_symbol(spec, xi);
        Eigen::ComplexEigenSolver<CMatrix> eig(sym, false);
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
            const Complex z = eig.eigenvalues()(i);
            const double a = std::abs(std::arg(z));
            const bool bad = !(z.real() > 0.0) || !(a < std::numbers::pi / 2.0 - margin);
            if (bad && !failed) {
                witness_xi = xi;
                witness_eig = z;
                failed = true;
            }
            if (!failed && z.real() < min_re) {
                witness_xi = xi;
                witness_eig = z;
            }
            min_re = std::min(min_re, z.real());
            max_arg = std::max(max_arg, a);
        }
    }

    // For (E) the scanned quantity is min Re over the spectrum on the sphere.
    rep.min_singular_value = min_re;
    rep.threshold = 0.0;
    rep.extra = {{"min_re", min_re},
                 {"max_abs_arg", max_arg},
                 {"arg_bound", std::numbers::pi / 2.0 - margin}};
    if (failed || !(max_arg < std::numbers::pi / 2.0 - margin) || !(min_re > 0.0)) {
        rep.threshold = std::numeric_limits<double>::infinity();  // force fail verdict
        rep.extra["witness_xi"] = std::vector<double>(witness_xi.data(), witness_xi.data() + witness_xi.size());
        rep.extra["witness_eigenvalue"] = {{"re", witness_eig.real()}, {"im", witness_eig.imag()}};
    }
    if (witness_xi.size() > 0) rep.argmin_witness.zeta = witness_xi;
    else rep.argmin_witness.zeta = RVector::Zero(spec.n);
    return rep;
}

}  // namespace qs

#endif
