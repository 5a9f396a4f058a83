#ifndef QUASISTEADY_NORMS_HPP
#define QUASISTEADY_NORMS_HPP

#include <cmath>
#include <functional>

#include "quasisteady/halfspace.hpp"

namespace qs {

// Discrete realizations of the function-space norms. Fractional tangential
// smoothness is applied spectrally through (1 + |xi|^2)^{s/2}; height
// derivatives use finite differences up to the integer order; time integrals
// are composite trapezoid rules, with W^1_p realized through second-order
// difference quotients. For p = q = 2 the boundary norms coincide with the
// Plancherel sums.
enum class SpaceKind { X, Y_j, Z_u, Z_rho, piZ_rho, plain };

struct SpaceTag {
    SpaceKind kind = SpaceKind::plain;
    int j = 0;
    double p = 2.0, q = 2.0;
    double s_time = 0.0, s_space = 0.0;  // plain_LpLq smoothness orders
    // orders derived from the problem spec; never free inputs
    double order_Yj = 0.0;         // 2m kappa_j
    double order_Zrho_time = 0.0;  // 2m kappa_0
    double order_Zrho_space = 0.0; // l + 2m kappa_0
    double order_besov = 0.0;      // l(1 - 1/p) + 2m kappa_0
    int two_m = 2;
};

inline SpaceTag space_tag(const ProblemSpec& spec, SpaceKind kind, int j = 0) {
    FunctionSpaceSpec fs = function_spaces(spec);
    SpaceTag tag;
    tag.kind = kind;
    tag.j = j;
    tag.p = spec.p;
    tag.q = spec.q;
    tag.two_m = 2 * spec.m;
    tag.order_Yj = 2.0 * spec.m * fs.kappa.at(j);
    tag.order_Zrho_time = 2.0 * spec.m * fs.kappa.at(0);
    tag.order_Zrho_space = fs.l + tag.order_Zrho_time;
    tag.order_besov = fs.l * (1.0 - 1.0 / spec.p) + tag.order_Zrho_time;
    return tag;
}

inline SpaceTag plain_tag(double p, double q, double s_time, double s_space) {
    SpaceTag tag;
    tag.kind = SpaceKind::plain;
    tag.p = p;
    tag.q = q;
    tag.s_time = s_time;
    tag.s_space = s_space;
    return tag;
}

namespace detail {

// L_q over the tangential torus from one row of mode coefficients
// (n_modes x comp flattened), by inverse FFT and quadrature; exact for q = 2.
inline double tangential_Lq(const Eigen::Ref<const Eigen::RowVectorXcd>& row,
                            const FieldGrids& g, int comp, double q) {
    const int nm = g.n_modes();
    std::vector<CVector> phys(comp);
    for (int c = 0; c < comp; ++c) {
        CVector modes(nm);
        for (int mode = 0; mode < nm; ++mode) modes(mode) = row(mode * comp + c);
        phys[c] = fft::modes_to_phys(modes, g.K, g.tangential_dims);
    }
    const double w = std::pow(g.L / g.modes_per_dim(), g.tangential_dims);
    double acc = 0.0;
    for (int i = 0; i < phys[0].size(); ++i) {
        double point2 = 0.0;
        for (int c = 0; c < comp; ++c) point2 += std::norm(phys[c](i));
        acc += w * std::pow(point2, 0.5 * q);
    }
    return std::pow(acc, 1.0 / q);
}

// (1 + |xi_k|^2)^{s/2} multiplier applied in place on a (time x modes*comp)
// block.
inline Eigen::MatrixXcd bessel_multiplier(const Eigen::MatrixXcd& values, const FieldGrids& g,
                                          int comp, double s) {
    Eigen::MatrixXcd out = values;
    for (int mode = 0; mode < g.n_modes(); ++mode) {
        const double w = std::pow(1.0 + g.xi_of(mode).squaredNorm(), 0.5 * s);
        out.middleCols(mode * comp, comp) *= w;
    }
    return out;
}

inline double time_Lp(const std::vector<double>& phi, const FieldGrids& g, double p) {
    double acc = 0.0;
    const double dt = g.dt();
    for (int it = 0; it <= g.Nt; ++it) {
        const double w = (it == 0 || it == g.Nt) ? 0.5 * dt : dt;
        acc += w * std::pow(phi[it], p);
    }
    return std::pow(acc, 1.0 / p);
}

// second-order time difference quotient
inline Eigen::MatrixXcd time_derivative(const Eigen::MatrixXcd& values, const FieldGrids& g) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(values.rows(), values.cols());
    const double dt = g.dt();
    const int n = g.Nt;
    if (n < 2) throw Error("time derivative needs at least three nodes");
    out.row(0) = (-3.0 * values.row(0) + 4.0 * values.row(1) - values.row(2)) / (2.0 * dt);
    for (int it = 1; it < n; ++it) out.row(it) = (values.row(it + 1) - values.row(it - 1)) / (2.0 * dt);
    out.row(n) = (3.0 * values.row(n) - 4.0 * values.row(n - 1) + values.row(n - 2)) / (2.0 * dt);
    return out;
}

// first-derivative matrix in y (second order, one-sided at the ends)
inline Eigen::MatrixXd y_derivative_matrix(const FieldGrids& g) {
    const int n = g.Ny;
    const double h = g.dy();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    D(0, 0) = -1.5 / h;
    D(0, 1) = 2.0 / h;
    D(0, 2) = -0.5 / h;
    for (int i = 1; i + 1 < n; ++i) {
        D(i, i - 1) = -0.5 / h;
        D(i, i + 1) = 0.5 / h;
    }
    D(n - 1, n - 1) = 1.5 / h;
    D(n - 1, n - 2) = -2.0 / h;
    D(n - 1, n - 3) = 0.5 / h;
    return D;
}

inline double interior_Lq_slice(const Eigen::MatrixXcd& slice /* modes x Ny*comp */,
                                const FieldGrids& g, int comp, double q) {
    const int nm = g.n_modes();
    const double wx = std::pow(g.L / g.modes_per_dim(), g.tangential_dims);
    const double hy = g.dy();
    double acc = 0.0;
    for (int iy = 0; iy < g.Ny; ++iy) {
        const double wy = (iy == 0 || iy == g.Ny - 1) ? 0.5 * hy : hy;
        std::vector<CVector> phys(comp);
        for (int c = 0; c < comp; ++c) {
            CVector modes(nm);
            for (int mode = 0; mode < nm; ++mode) modes(mode) = slice(mode, iy * comp + c);
            phys[c] = fft::modes_to_phys(modes, g.K, g.tangential_dims);
        }
        for (int i = 0; i < phys[0].size(); ++i) {
            double point2 = 0.0;
            for (int c = 0; c < comp; ++c) point2 += std::norm(phys[c](i));
            acc += wx * wy * std::pow(point2, 0.5 * q);
        }
    }
    return std::pow(acc, 1.0 / q);
}

// multi-indices |alpha| <= order over dims coordinates
inline std::vector<MultiIndex> multi_indices_up_to(int dims, int order) {
    std::vector<MultiIndex> all;
    MultiIndex cur(dims, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == dims) {
            all.push_back(cur);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            cur[pos] = a;
            rec(pos + 1, left - a);
        }
        cur[pos] = 0;
    };
    rec(0, order);
    return all;
}

}  // namespace detail

// L_p-in-time of the fractional tangential Sobolev norm of a surface field.
inline double boundary_LpWs(const BoundaryField& f, double p, double q, double s) {
    const Eigen::MatrixXcd scaled = detail::bessel_multiplier(f.values, f.g, f.components, s);
    std::vector<double> phi(f.g.Nt + 1);
    for (int it = 0; it <= f.g.Nt; ++it)
        phi[it] = detail::tangential_Lq(scaled.row(it), f.g, f.components, q);
    return detail::time_Lp(phi, f.g, p);
}

inline double sobolev_norm(const BoundaryField& f, const SpaceTag& tag) {
    switch (tag.kind) {
        case SpaceKind::Y_j:
            return boundary_LpWs(f, tag.p, tag.q, tag.order_Yj);
        case SpaceKind::Z_rho: {
            BoundaryField dt = f;
            dt.values = detail::time_derivative(f.values, f.g);
            return boundary_LpWs(f, tag.p, tag.q, tag.order_Zrho_space) +
                   boundary_LpWs(f, tag.p, tag.q, tag.order_Zrho_time) +
                   boundary_LpWs(dt, tag.p, tag.q, tag.order_Zrho_time);
        }
        case SpaceKind::plain: {
            if (tag.s_time == 0.0) return boundary_LpWs(f, tag.p, tag.q, tag.s_space);
            if (tag.s_time == 1.0) {
                BoundaryField dt = f;
                dt.values = detail::time_derivative(f.values, f.g);
                return boundary_LpWs(f, tag.p, tag.q, tag.s_space) +
                       boundary_LpWs(dt, tag.p, tag.q, tag.s_space);
            }
            throw Error("boundary norms support integer time smoothness 0 or 1");
        }
        default:
            throw Error("space tag does not apply to a boundary field");
    }
}

// Interior norms: X = L_p(L_q) and Z_u = L_p(W^{2m}_q), with tangential
// derivatives applied spectrally and height derivatives by repeated
// second-order differencing.
inline double sobolev_norm(const DiscreteField& f, const SpaceTag& tag) {
    const FieldGrids& g = f.g;
    const int comp = f.components;
    if (tag.kind == SpaceKind::X || (tag.kind == SpaceKind::plain && tag.s_space == 0.0)) {
        std::vector<double> phi(g.Nt + 1);
        for (int it = 0; it <= g.Nt; ++it)
            phi[it] = detail::interior_Lq_slice(f.values[it], g, comp, tag.q);
        return detail::time_Lp(phi, g, tag.p);
    }
    if (tag.kind != SpaceKind::Z_u) throw Error("space tag does not apply to an interior field");

    const auto alphas = detail::multi_indices_up_to(g.tangential_dims + 1, tag.two_m);
    const Eigen::MatrixXd Dy = detail::y_derivative_matrix(g);
    std::vector<double> phi(g.Nt + 1, 0.0);
    for (int it = 0; it <= g.Nt; ++it) {
        double acc = 0.0;
        for (const MultiIndex& alpha : alphas) {
            // tangential part of the derivative as a mode multiplier
            Eigen::MatrixXcd slice = f.values[it];
            for (int mode = 0; mode < g.n_modes(); ++mode) {
                const RVector xi = g.xi_of(mode);
                double mult = 1.0;
                for (int d2 = 0; d2 < g.tangential_dims; ++d2)
                    for (int r = 0; r < alpha[d2]; ++r) mult *= xi(d2);
                slice.row(mode) *= mult;
            }
            // height derivatives column-block wise
            const int ay = alpha[g.tangential_dims];
            for (int r = 0; r < ay; ++r) {
                Eigen::MatrixXcd next = slice;
                for (int c = 0; c < comp; ++c) {
                    Eigen::MatrixXcd cols(g.n_modes(), g.Ny);
                    for (int iy = 0; iy < g.Ny; ++iy) cols.col(iy) = slice.col(iy * comp + c);
                    cols = cols * Dy.transpose();
                    for (int iy = 0; iy < g.Ny; ++iy) next.col(iy * comp + c) = cols.col(iy);
                }
                slice.swap(next);
            }
            acc += std::pow(detail::interior_Lq_slice(slice, g, comp, tag.q), tag.q);
        }
        phi[it] = std::pow(acc, 1.0 / tag.q);
    }
    return detail::time_Lp(phi, g, tag.p);
}

// Littlewood-Paley surrogate of the Besov norm B^s_{q,p} of a surface slice
// given as mode coefficients (n_modes x comp). Blocks partition the modes by
// |xi|: block 0 holds |xi| <= 1, block kappa holds 2^{kappa-1} < |xi| <= 2^kappa.
inline double besov_norm(const Eigen::MatrixXcd& modes, const FieldGrids& g, double s, double q,
                         double p) {
    if (!(s > 0.0)) throw Error("besov_norm requires s > 0");
    const int comp = static_cast<int>(modes.cols());
    int max_block = 0;
    for (int mode = 0; mode < g.n_modes(); ++mode) {
        const double r = g.xi_of(mode).norm();
        if (r > 1.0) max_block = std::max(max_block, static_cast<int>(std::ceil(std::log2(r))));
    }
    double acc = 0.0;
    for (int kappa = 0; kappa <= max_block; ++kappa) {
        Eigen::RowVectorXcd block = Eigen::RowVectorXcd::Zero(g.n_modes() * comp);
        bool nonempty = false;
        for (int mode = 0; mode < g.n_modes(); ++mode) {
            const double r = g.xi_of(mode).norm();
            const int kb = (r <= 1.0) ? 0 : static_cast<int>(std::ceil(std::log2(r)));
            if (kb != kappa) continue;
            nonempty = true;
            for (int c = 0; c < comp; ++c) block(mode * comp + c) = modes(mode, c);
        }
        if (!nonempty) continue;
        const double bq = detail::tangential_Lq(block, g, comp, q);
        acc += std::pow(2.0, kappa * s * p) * std::pow(bq, p);
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace qs

#endif
