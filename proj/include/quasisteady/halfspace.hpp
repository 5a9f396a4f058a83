#ifndef QUASISTEADY_HALFSPACE_HPP
#define QUASISTEADY_HALFSPACE_HPP

#include <numbers>
#include <vector>

#include <json.hpp>

#include "quasisteady/boundary.hpp"
#include "quasisteady/fft.hpp"
#include "quasisteady/problem.hpp"

namespace qs {

// Discretization of the model domain (torus)^{n-1} x [0, Y] x [0, T]:
// tangential Fourier modes |k_i| <= K on a torus of circumference L, a
// uniform time grid with Nt+1 nodes, and Ny height nodes used for output and
// quadrature (the solver state itself lives on the boundary).
struct FieldGrids {
    int tangential_dims = 1;
    int K = 16;
    double L = 2.0 * std::numbers::pi;
    double T = 1.0;
    int Nt = 64;
    double Y = 3.0;
    int Ny = 64;

    int modes_per_dim() const { return 2 * K + 1; }
    int n_modes() const {
        int n = 1;
        for (int d = 0; d < tangential_dims; ++d) n *= modes_per_dim();
        return n;
    }
    double dt() const { return T / Nt; }
    double dy() const { return Y / (Ny - 1); }
    double t_node(int i) const { return T * i / Nt; }
    double y_node(int i) const { return Y * i / (Ny - 1); }

    Eigen::VectorXi mode_of(int flat) const { return fft::mode_unflat(flat, K, tangential_dims); }
    int flat_of(const Eigen::VectorXi& k) const { return fft::mode_flat(k, K); }
    RVector xi_of(int flat) const {
        return (2.0 * std::numbers::pi / L) * mode_of(flat).cast<double>();
    }

    bool compatible(const FieldGrids& o) const {
        return tangential_dims == o.tangential_dims && K == o.K && L == o.L && T == o.T &&
               Nt == o.Nt && Y == o.Y && Ny == o.Ny;
    }

    nlohmann::json to_json() const {
        return {{"tangential_dims", tangential_dims}, {"K", K}, {"L", L}, {"T", T},
                {"Nt", Nt},                           {"Y", Y}, {"Ny", Ny}};
    }
};

// Surface field in tangential-coefficient representation:
// values(time, mode * components + c).
struct BoundaryField {
    FieldGrids g;
    int components = 1;
    Eigen::MatrixXcd values;

    BoundaryField() = default;
    BoundaryField(const FieldGrids& grids, int comp)
        : g(grids), components(comp),
          values(Eigen::MatrixXcd::Zero(grids.Nt + 1, grids.n_modes() * comp)) {}

    Complex& at(int it, int mode, int c) { return values(it, mode * components + c); }
    Complex at(int it, int mode, int c) const { return values(it, mode * components + c); }

    // component vector at one (time, mode)
    CVector vec(int it, int mode) const {
        return values.row(it).segment(mode * components, components).transpose();
    }
};

// Interior field: per time node a (modes x (Ny * components)) matrix.
struct DiscreteField {
    FieldGrids g;
    int components = 1;
    std::vector<Eigen::MatrixXcd> values;

    DiscreteField() = default;
    DiscreteField(const FieldGrids& grids, int comp)
        : g(grids), components(comp),
          values(grids.Nt + 1,
                 Eigen::MatrixXcd::Zero(grids.n_modes(), grids.Ny * comp)) {}

    Complex& at(int it, int mode, int iy, int c) {
        return values[it](mode, iy * components + c);
    }
    Complex at(int it, int mode, int iy, int c) const {
        return values[it](mode, iy * components + c);
    }
};

struct ReducedData {
    DiscreteField u_star;
    BoundaryField rho_star;
    std::vector<BoundaryField> g_corrections;  // j = 0..m, the -(B_j u* + C_j rho*) terms
};

namespace detail {

// Whole-space resolvent solve on the doubled periodic box: for one
// tangential mode given as a full box column f(y_0..y_{nbox-1}) (the caller
// performs the zero extension), returns (eta + A)^{-1} f on the box together
// with the boundary jet D_y^r u(0), r = 0..2m-1.
struct BoxSolve {
    CVector u;    // nbox * dimE
    CVector jet;  // 2m * dimE
};

inline BoxSolve resolvent_box_solve(const ProblemSpec& spec, const RVector& xi_prime,
                                    const Eigen::Ref<const CVector>& f_box, int Ny, double Y) {
    const int d = spec.dimE;
    const int nbox = 2 * (Ny - 1);
    if (f_box.size() != nbox * d) throw Error("box column has the wrong length");
    std::vector<CVector> fhat(d, CVector::Zero(nbox));
    for (int c = 0; c < d; ++c) {
        CVector col = CVector::Zero(nbox);
        for (int iy = 0; iy < nbox; ++iy) col(iy) = f_box(iy * d + c);
        fft::dft(col, 1, nbox, FFTW_FORWARD);
        fhat[c] = col;
    }

    RVector xi(spec.n);
    xi.head(spec.n - 1) = xi_prime;
    std::vector<CVector> uhat(d, CVector::Zero(nbox));
    for (int kk = 0; kk < nbox; ++kk) {
        const int ky = (kk <= nbox / 2) ? kk : kk - nbox;
        xi(spec.n - 1) = std::numbers::pi / Y * ky;
        CMatrix sym = spec.eta * CMatrix::Identity(d, d) + full_interior_symbol(spec, xi);
        Eigen::FullPivLU<CMatrix> lu(sym);
        if (!lu.isInvertible())
            throw Error("eta + A(xi) singular at a box mode; raise eta above the lower-order terms");
        CVector rhs(d);
        for (int c = 0; c < d; ++c) rhs(c) = fhat[c](kk);
        CVector sol = lu.solve(rhs);
        for (int c = 0; c < d; ++c) uhat[c](kk) = sol(c);
    }

    BoxSolve out;
    out.jet = CVector::Zero(2 * spec.m * d);
    for (int c = 0; c < d; ++c) {
        // boundary jet from the spectral sums sum_k (xi_y)^r uhat
        for (int r = 0; r < 2 * spec.m; ++r) {
            Complex acc(0, 0);
            for (int kk = 0; kk < nbox; ++kk) {
                const int ky = (kk <= nbox / 2) ? kk : kk - nbox;
                acc += std::pow(std::numbers::pi / Y * ky, r) * uhat[c](kk);
            }
            out.jet(r * d + c) = acc / static_cast<double>(nbox);
        }
        fft::dft(uhat[c], 1, nbox, FFTW_BACKWARD);
    }
    out.u = CVector::Zero(nbox * d);
    for (int iy = 0; iy < nbox; ++iy)
        for (int c = 0; c < d; ++c) out.u(iy * d + c) = uhat[c](iy) / static_cast<double>(nbox);
    return out;
}

}  // namespace detail

// Reduction to f = 0, rho_0 = 0: solves the whole-space problem for u_*, the
// surface semigroup rho_*(t) = e^{-t (eta - Lap')^{l/2}} rho_0 mode by mode,
// and returns the boundary-row corrections
//   g_corrections[0] = -(dt rho_* + B_0 u_* + C_0 rho_*),
//   g_corrections[j] = -(B_j u_* + C_j rho_*).
inline ReducedData reduce_data(const ProblemSpec& spec, const DiscreteField& f,
                               const Eigen::MatrixXcd& rho0_modes) {
    const FieldGrids& g = f.g;
    if (g.tangential_dims != spec.n - 1)
        throw Error("field grid dimension does not match the problem spec");
    const int d = spec.dimE;
    const int dF = spec.dimF;
    const int l = spec.l();

    ReducedData out;
    out.u_star = DiscreteField(g, d);
    out.rho_star = BoundaryField(g, dF);
    out.g_corrections.assign(spec.m + 1, BoundaryField(g, 0));
    for (int j = 0; j <= spec.m; ++j)
        out.g_corrections[j] = BoundaryField(g, j == 0 ? dF : d);

    // per-mode boundary jets of u_*, per time node
    const int nbox = 2 * (g.Ny - 1);
    std::vector<Eigen::MatrixXcd> jets(g.Nt + 1,
                                       Eigen::MatrixXcd::Zero(g.n_modes(), 2 * spec.m * d));
    for (int it = 0; it <= g.Nt; ++it)
        for (int mode = 0; mode < g.n_modes(); ++mode) {
            const RVector xi = g.xi_of(mode);
            // zero extension of f from [0, Y] to the doubled box [0, 2Y)
            CVector f_box = CVector::Zero(nbox * d);
            f_box.head(g.Ny * d) = f.values[it].row(mode).transpose();
            detail::BoxSolve bs = detail::resolvent_box_solve(spec, xi, f_box, g.Ny, g.Y);
            out.u_star.values[it].row(mode) = bs.u.head(g.Ny * d).transpose();
            jets[it].row(mode) = bs.jet.transpose();
        }

    for (int mode = 0; mode < g.n_modes(); ++mode) {
        const RVector xi = g.xi_of(mode);
        const double omega = std::pow(spec.eta + xi.squaredNorm(), 0.5 * l);
        for (int it = 0; it <= g.Nt; ++it) {
            const CVector rho = std::exp(-g.t_node(it) * omega) *
                                rho0_modes.row(mode).transpose();
            out.rho_star.values.row(it).segment(mode * dF, dF) = rho.transpose();

            for (int j = 0; j <= spec.m; ++j) {
                // B_j u_* on the boundary through the stored jet (full symbol)
                const int rows = (j == 0) ? dF : d;
                CVector corr = CVector::Zero(rows);
                for (const auto& [beta, mat] : spec.boundary[j].coeffs) {
                    Complex tang = 1.0;
                    for (int i = 0; i < spec.n - 1; ++i)
                        for (int r = 0; r < beta[i]; ++r) tang *= xi(i);
                    const int r = beta[spec.n - 1];
                    corr += tang * (mat * jets[it].row(mode).segment(r * d, d).transpose());
                }
                corr += full_tangential_symbol(spec, j, xi) * rho;
                if (j == 0) corr += -omega * rho;  // dt rho_* is exact
                out.g_corrections[j].values.row(it).segment(mode * rows, rows) =
                    -corr.transpose();
            }
        }
    }
    return out;
}

// Per-mode boundary evolution: eliminating the trace unknown through the
// j = 1..m rows and the stable constraint leaves d sigma/dt = -K sigma + F;
// the exponential integrator below is the exact variation-of-constants
// formula for the piecewise-linear interpolant of F (hence exact for
// piecewise-constant and linear forcing).
struct ModeSolution {
    Eigen::MatrixXcd sigma;  // (Nt+1) x dimF
    Eigen::MatrixXcd w0;     // (Nt+1) x 2m dimE
};

namespace detail {

// exp(h A), h phi_1(h A), h phi_2(h A) via one block exponential.
struct PhiFunctions {
    CMatrix E, P1, P2;
};

inline PhiFunctions phi_functions(const CMatrix& A, double h) {
    const int d = static_cast<int>(A.rows());
    CMatrix X = CMatrix::Zero(3 * d, 3 * d);
    X.topLeftCorner(d, d) = h * A;
    X.block(0, d, d, d) = CMatrix::Identity(d, d);
    X.block(d, 2 * d, d, d) = CMatrix::Identity(d, d);
    const CMatrix EX = X.exp();
    PhiFunctions out;
    out.E = EX.topLeftCorner(d, d);
    out.P1 = h * EX.block(0, d, d, d);
    out.P2 = h * EX.block(0, 2 * d, d, d);
    return out;
}

// Static per-mode data of the eliminated system.
struct ModeOperator {
    CompanionSystem sys;
    double mu = 1.0;
    CMatrix R0;          // dimF x mE
    CMatrix S_inv;       // mE x mE, inverse of the stacked j = 1..m rows
    CMatrix C_vec;       // mE x dimF
    CMatrix K;           // dimF x dimF
    CMatrix R0_Sinv;     // dimF x mE
};

inline ModeOperator mode_operator(const ProblemSpec& spec, const RVector& xi_prime) {
    const int d = spec.dimE;
    const int mE = spec.m * d;
    ModeOperator op;
    ModeParameters mp = mode_parameters(spec.eta, xi_prime, Complex(0, 0), spec.m, spec.l());
    op.mu = mp.mu;
    op.sys = stable_projection(spec, mp.zeta, mp.a);

    op.R0 = std::pow(mp.mu, spec.boundary[0].order) *
            (boundary_block_row(spec, 0, mp.zeta) * op.sys.stable_basis);
    CMatrix S(mE, mE);
    op.C_vec = CMatrix::Zero(mE, spec.dimF);
    for (int j = 1; j <= spec.m; ++j) {
        S.middleRows((j - 1) * d, d) = std::pow(mp.mu, spec.boundary[j].order) *
                                       (boundary_block_row(spec, j, mp.zeta) * op.sys.stable_basis);
        op.C_vec.middleRows((j - 1) * d, d) = full_tangential_symbol(spec, j, xi_prime);
    }
    Eigen::FullPivLU<CMatrix> lu(S);
    if (!lu.isInvertible())
        throw Error("elimination block singular at a tangential mode: LS/ALS fails there");
    op.S_inv = lu.inverse();
    op.R0_Sinv = op.R0 * op.S_inv;
    op.K = full_tangential_symbol(spec, 0, xi_prime) - op.R0_Sinv * op.C_vec;
    return op;
}

}  // namespace detail

// g_hat: per-mode time series of the boundary rows, (Nt+1) x (dimF + m dimE),
// columns ordered (row 0 block, rows 1..m). sigma(0) = 0 (reduction applied).
inline ModeSolution solve_mode(const ProblemSpec& spec, const Eigen::VectorXi& k,
                               const Eigen::MatrixXcd& g_hat, const FieldGrids& grids) {
    const int d = spec.dimE;
    const int dF = spec.dimF;
    const int mE = spec.m * d;
    const RVector xi = (2.0 * std::numbers::pi / grids.L) * k.cast<double>();
    detail::ModeOperator op = detail::mode_operator(spec, xi);
    const double h = grids.dt();
    detail::PhiFunctions phi = detail::phi_functions(-op.K, h);

    ModeSolution out;
    out.sigma = Eigen::MatrixXcd::Zero(grids.Nt + 1, dF);
    out.w0 = Eigen::MatrixXcd::Zero(grids.Nt + 1, 2 * spec.m * d);

    auto forcing = [&](int it) -> CVector {
        const CVector g0 = g_hat.row(it).head(dF).transpose();
        const CVector gv = g_hat.row(it).tail(mE).transpose();
        return g0 - op.R0_Sinv * gv;
    };

    CVector sigma = CVector::Zero(dF);
    for (int it = 0; it <= grids.Nt; ++it) {
        out.sigma.row(it) = sigma.transpose();
        const CVector gv = g_hat.row(it).tail(mE).transpose();
        const CVector s = op.S_inv * (gv - op.C_vec * sigma);
        out.w0.row(it) = (op.sys.stable_basis * s).transpose();
        if (it == grids.Nt) break;
        const CVector Fi = forcing(it);
        const CVector Fi1 = forcing(it + 1);
        sigma = phi.E * sigma + phi.P1 * Fi + phi.P2 * (Fi1 - Fi);
    }
    return out;
}

struct SolveResult {
    DiscreteField u;
    BoundaryField rho;
};

// Full model solve: reduction, per-mode boundary evolution, and field
// reconstruction through the decaying extension. rho0_modes holds the initial
// surface data as tangential coefficients (n_modes x dimF).
inline SolveResult solve(const ProblemSpec& spec, const DiscreteField& f,
                         const std::vector<BoundaryField>& g_data,
                         const Eigen::MatrixXcd& rho0_modes) {
    const FieldGrids& g = f.g;
    const int d = spec.dimE;
    const int dF = spec.dimF;
    const int mE = spec.m * d;
    if (static_cast<int>(g_data.size()) != spec.m + 1)
        throw Error("expected m+1 boundary data fields");

    ReducedData red = reduce_data(spec, f, rho0_modes);

    SolveResult out;
    out.u = red.u_star;  // start from u_*, add the reconstructed part
    out.rho = red.rho_star;

    for (int mode = 0; mode < g.n_modes(); ++mode) {
        Eigen::MatrixXcd g_hat(g.Nt + 1, dF + mE);
        for (int it = 0; it <= g.Nt; ++it) {
            g_hat.row(it).head(dF) =
                g_data[0].values.row(it).segment(mode * dF, dF) +
                red.g_corrections[0].values.row(it).segment(mode * dF, dF);
            for (int j = 1; j <= spec.m; ++j)
                g_hat.row(it).segment(dF + (j - 1) * d, d) =
                    g_data[j].values.row(it).segment(mode * d, d) +
                    red.g_corrections[j].values.row(it).segment(mode * d, d);
        }
        ModeSolution ms = solve_mode(spec, g.mode_of(mode), g_hat, g);

        // surface unknown
        for (int it = 0; it <= g.Nt; ++it)
            out.rho.values.row(it).segment(mode * dF, dF) += ms.sigma.row(it);

        // interior reconstruction via the stable flow, cached per height
        const RVector xi = g.xi_of(mode);
        ModeParameters mp = mode_parameters(spec.eta, xi, Complex(0, 0), spec.m, spec.l());
        CompanionSystem sys = stable_projection(spec, mp.zeta, mp.a);
        std::vector<CMatrix> G(g.Ny);
        for (int iy = 0; iy < g.Ny; ++iy) {
            const CMatrix E = (mp.mu * g.y_node(iy) * sys.stable_generator).exp();
            G[iy] = sys.stable_basis.topRows(d) * E;  // dimE x mE
        }
        for (int it = 0; it <= g.Nt; ++it) {
            const CVector s = sys.stable_coordinates(ms.w0.row(it).transpose());
            for (int iy = 0; iy < g.Ny; ++iy) {
                const CVector v = G[iy] * s;
                out.u.values[it].row(mode).segment(iy * d, d) += v.transpose();
            }
        }
    }
    return out;
}

}  // namespace qs

#endif
