#ifndef QUASISTEADY_MANUFACTURED_HPP
#define QUASISTEADY_MANUFACTURED_HPP

#include "quasisteady/halfspace.hpp"

namespace qs {

// Manufactured solution for the Laplace problem with dynamic Neumann coupling
// (builtin example 1):
//   rho(t, x') = profile(t) cos(x'_1),
//   u(t, x', y) = profile(t) e^{-mu_hat y} cos(x'_1),  mu_hat = sqrt(eta + |xi_1|^2),
// which gives f = 0, g_0 = (profile' + mu_hat profile) cos(x'_1), g_1 = 0 and
// rho_0 = profile(0) cos(x'_1). The linear profile keeps the forcing linear
// in time, so the exponential integrator reproduces it to round-off; the
// exponential profile exercises the integrator's convergence order.
struct ManufacturedProblem {
    enum class Profile { linear, exponential } profile = Profile::linear;
    FieldGrids grids;
    double mu_hat = 0.0;

    DiscreteField f;
    std::vector<BoundaryField> g;
    Eigen::MatrixXcd rho0_modes;

    double value(double t) const {
        return profile == Profile::linear ? 1.0 + 0.5 * t : std::exp(-t);
    }
    double derivative(double t) const { return profile == Profile::linear ? 0.5 : -std::exp(-t); }

    Complex exact_rho_mode(int mode, double t) const {
        const Eigen::VectorXi k = grids.mode_of(mode);
        if (std::abs(k(0)) != 1 || k.tail(k.size() - 1).cwiseAbs().sum() != 0) return {0, 0};
        return Complex(0.5 * value(t), 0.0);
    }
    Complex exact_u_mode(int mode, double t, double y) const {
        return exact_rho_mode(mode, t) * std::exp(-mu_hat * y);
    }
};

inline ManufacturedProblem make_manufactured(const ProblemSpec& spec, const FieldGrids& grids,
                                             ManufacturedProblem::Profile profile) {
    if (spec.m != 1 || spec.dimE != 1 || spec.dimF != 1)
        throw Error("manufactured data is built for the example-1 problem shape");
    ManufacturedProblem mk;
    mk.profile = profile;
    mk.grids = grids;
    const double xi1 = 2.0 * std::numbers::pi / grids.L;
    mk.mu_hat = std::sqrt(spec.eta + xi1 * xi1);

    mk.f = DiscreteField(grids, 1);
    mk.g.assign(2, BoundaryField(grids, 1));
    mk.rho0_modes = Eigen::MatrixXcd::Zero(grids.n_modes(), 1);

    Eigen::VectorXi kplus = Eigen::VectorXi::Zero(grids.tangential_dims);
    kplus(0) = 1;
    Eigen::VectorXi kminus = -kplus;
    const int mp = grids.flat_of(kplus), mm = grids.flat_of(kminus);
    mk.rho0_modes(mp, 0) = mk.rho0_modes(mm, 0) = Complex(0.5 * mk.value(0.0), 0.0);
    for (int it = 0; it <= grids.Nt; ++it) {
        const double t = grids.t_node(it);
        const Complex g0(0.5 * (mk.derivative(t) + mk.mu_hat * mk.value(t)), 0.0);
        mk.g[0].values(it, mp) = mk.g[0].values(it, mm) = g0;
    }
    return mk;
}

struct ManufacturedError {
    double max_u = 0.0;
    double max_rho = 0.0;
};

inline ManufacturedError manufactured_error(const ManufacturedProblem& mk, const SolveResult& sol) {
    ManufacturedError err;
    const FieldGrids& g = mk.grids;
    for (int it = 0; it <= g.Nt; ++it) {
        const double t = g.t_node(it);
        for (int mode = 0; mode < g.n_modes(); ++mode) {
            err.max_rho = std::max(err.max_rho,
                                   std::abs(sol.rho.at(it, mode, 0) - mk.exact_rho_mode(mode, t)));
            for (int iy = 0; iy < g.Ny; ++iy)
                err.max_u = std::max(err.max_u, std::abs(sol.u.at(it, mode, iy, 0) -
                                                         mk.exact_u_mode(mode, t, g.y_node(iy))));
        }
    }
    return err;
}

}  // namespace qs

#endif
