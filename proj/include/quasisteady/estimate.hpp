#ifndef QUASISTEADY_ESTIMATE_HPP
#define QUASISTEADY_ESTIMATE_HPP

#include <random>

#include "quasisteady/norms.hpp"

namespace qs {

// Seeded random band-limited data ensembles for the maximal-regularity ratio
// check. Members are deterministic functions of (seed, member index) and are
// band-limited at K_data tangential modes and box_modes height modes, so the
// same continuum datum can be materialized at any resolution K >= K_data.
struct EnsembleSpec {
    int size = 32;
    uint64_t seed = 1234;
    int K_data = 8;
    int box_modes = 6;
    int time_harmonics = 3;
    double amplitude = 1.0;
};

struct RatioReport {
    double eta = 0.0;
    int ensemble_size = 0;
    nlohmann::json resolution;
    double max_ratio = 0.0;
    double refined_max_ratio = 0.0;
    std::string verdict;
    uint64_t seed = 0;
    int skipped = 0;

    nlohmann::json to_json() const {
        return {{"eta", eta},
                {"ensemble_size", ensemble_size},
                {"resolution", resolution},
                {"max_ratio", max_ratio},
                {"refined_max_ratio", refined_max_ratio},
                {"verdict", verdict},
                {"seed", seed},
                {"skipped_members", skipped}};
    }
};

namespace detail {

// Coefficient tables of one ensemble member, resolution independent.
struct MemberRecipe {
    // tangential coefficient per data-layer: key = data-grid flat index
    std::vector<std::vector<Complex>> g_coef;     // per j: harmonics-major table
    std::vector<Complex> rho0_coef;               // per data mode
    std::vector<std::vector<Complex>> f_coef;     // per data mode: per box mode
};

inline MemberRecipe member_recipe(const ProblemSpec& spec, const EnsembleSpec& ens, int member) {
    std::mt19937_64 rng(ens.seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(member + 1));
    std::normal_distribution<double> gauss;
    const int dmodes = static_cast<int>(std::pow(2 * ens.K_data + 1, spec.n - 1));
    const int H = ens.time_harmonics;
    MemberRecipe r;
    r.g_coef.assign(spec.m + 1, {});
    for (int j = 0; j <= spec.m; ++j) {
        r.g_coef[j].resize(dmodes * (2 * H + 1));
        for (auto& c : r.g_coef[j]) c = ens.amplitude * Complex(gauss(rng), gauss(rng));
    }
    r.rho0_coef.resize(dmodes);
    for (auto& c : r.rho0_coef) c = ens.amplitude * Complex(gauss(rng), gauss(rng));
    r.f_coef.assign(dmodes, {});
    for (auto& per_mode : r.f_coef) {
        per_mode.resize(2 * ens.box_modes + 1);
        for (auto& c : per_mode) c = ens.amplitude * Complex(gauss(rng), gauss(rng));
    }
    return r;
}

// decay weight keeping the data smooth across the band
inline double mode_weight(const Eigen::VectorXi& k) {
    return 1.0 / (1.0 + k.cast<double>().squaredNorm());
}

struct MemberData {
    DiscreteField f;
    std::vector<BoundaryField> g;
    Eigen::MatrixXcd rho0;
};

// Materializes the recipe at the resolution of `grids`, with conjugate
// symmetry enforced so all physical data are real.
inline MemberData materialize(const ProblemSpec& spec, const EnsembleSpec& ens,
                              const MemberRecipe& r, const FieldGrids& grids) {
    if (grids.K < ens.K_data) throw Error("grid K below the data band limit");
    const int td = grids.tangential_dims;
    const int H = ens.time_harmonics;
    MemberData out;
    out.f = DiscreteField(grids, spec.dimE);
    out.g.assign(spec.m + 1, BoundaryField(grids, 1));
    for (int j = 0; j <= spec.m; ++j)
        out.g[j] = BoundaryField(grids, j == 0 ? spec.dimF : spec.dimE);
    out.rho0 = Eigen::MatrixXcd::Zero(grids.n_modes(), spec.dimF);

    const int dmodes = static_cast<int>(std::pow(2 * ens.K_data + 1, td));
    for (int dflat = 0; dflat < dmodes; ++dflat) {
        const Eigen::VectorXi k = fft::mode_unflat(dflat, ens.K_data, td);
        // reality: drive the representative with leading nonzero entry > 0 and
        // mirror the conjugate onto -k; k = 0 is kept real directly.
        const bool self = k.isZero();
        bool primary = true;
        for (int d2 = 0; d2 < td; ++d2) {
            if (k(d2) > 0) break;
            if (k(d2) < 0) {
                primary = false;
                break;
            }
        }
        if (!primary) continue;
        const int flat = grids.flat_of(k);
        const int flat_neg = grids.flat_of(Eigen::VectorXi(-k));
        const double w = mode_weight(k);

        for (int j = 0; j <= spec.m; ++j) {
            const int comp = (j == 0) ? spec.dimF : spec.dimE;
            for (int it = 0; it <= grids.Nt; ++it) {
                const double t = grids.t_node(it);
                Complex val(0, 0);
                for (int h = -H; h <= H; ++h) {
                    const Complex c = r.g_coef[j][dflat * (2 * H + 1) + (h + H)];
                    val += c * std::exp(Complex(0, std::numbers::pi * h * t / grids.T)) /
                           (1.0 + h * h);
                }
                val *= w;
                if (self) val = Complex(val.real(), 0.0);
                out.g[j].values(it, flat * comp) = val;
                if (!self) out.g[j].values(it, flat_neg * comp) = std::conj(val);
            }
        }
        {
            Complex c = w * r.rho0_coef[dflat];
            if (self) c = Complex(c.real(), 0.0);
            out.rho0(flat, 0) = c;
            if (!self) out.rho0(flat_neg, 0) = std::conj(c);
        }
        for (int it = 0; it <= grids.Nt; ++it) {
            const double tfac = 1.0 + 0.5 * std::cos(std::numbers::pi * grids.t_node(it) / grids.T);
            for (int iy = 0; iy < grids.Ny; ++iy) {
                Complex val(0, 0);
                for (int j = -ens.box_modes; j <= ens.box_modes; ++j) {
                    const Complex c = r.f_coef[dflat][j + ens.box_modes];
                    const double xiy = std::numbers::pi / grids.Y * j;
                    val += c / (1.0 + j * j) * std::exp(Complex(0, xiy * grids.y_node(iy)));
                }
                val *= w * tfac;
                if (self) val = Complex(val.real(), 0.0);
                out.f.at(it, flat, iy, 0) = val;
                if (!self) out.f.at(it, flat_neg, iy, 0) = std::conj(val);
            }
        }
    }
    return out;
}

struct RatioParts {
    double numerator = 0.0;
    double denominator = 0.0;
};

inline RatioParts regularity_ratio(const ProblemSpec& spec, const MemberData& data) {
    SolveResult sol = solve(spec, data.f, data.g, data.rho0);
    const SpaceTag x_tag = space_tag(spec, SpaceKind::X);
    const SpaceTag zu_tag = space_tag(spec, SpaceKind::Z_u);
    const SpaceTag zr_tag = space_tag(spec, SpaceKind::Z_rho);

    RatioParts parts;
    parts.numerator = spec.eta * sobolev_norm(sol.u, x_tag) + sobolev_norm(sol.u, zu_tag) +
                      sobolev_norm(sol.rho, zr_tag);
    parts.denominator = sobolev_norm(data.f, x_tag);
    for (int j = 0; j <= spec.m; ++j)
        parts.denominator += sobolev_norm(data.g[j], space_tag(spec, SpaceKind::Y_j, j));
    const SpaceTag pz = space_tag(spec, SpaceKind::piZ_rho);
    parts.denominator += besov_norm(data.rho0, data.f.g, pz.order_besov, pz.q, pz.p);
    return parts;
}

}  // namespace detail

// Maximal-regularity ratio scan: max over a seeded ensemble of
//   R = (eta ||u||_X + ||u||_{Z_u} + ||rho||_{Z_rho}) /
//       (||f||_X + sum_j ||g_j||_{Y_j} + ||rho_0||_{pi Z_rho}),
// at the base resolution and at (2K, 2Nt). Verdict "bounded" when the two
// maxima agree within `agreement` (relative).
inline RatioReport verify_max_regularity(const ProblemSpec& spec, const EnsembleSpec& ens,
                                         const FieldGrids& base, double agreement = 0.2) {
    RatioReport rep;
    rep.eta = spec.eta;
    rep.ensemble_size = ens.size;
    rep.seed = ens.seed;
    rep.resolution = {{"K", base.K}, {"Nt", base.Nt}, {"Ny", base.Ny},
                      {"refined_K", 2 * base.K}, {"refined_Nt", 2 * base.Nt}};

    FieldGrids fine = base;
    fine.K = 2 * base.K;
    fine.Nt = 2 * base.Nt;

    for (int member = 0; member < ens.size; ++member) {
        const detail::MemberRecipe recipe = detail::member_recipe(spec, ens, member);
        const detail::MemberData coarse_data = detail::materialize(spec, ens, recipe, base);
        const detail::RatioParts coarse = detail::regularity_ratio(spec, coarse_data);
        if (coarse.denominator < 1e-14) {
            ++rep.skipped;  // zero-data member: the ratio is undefined
            continue;
        }
        const detail::MemberData fine_data = detail::materialize(spec, ens, recipe, fine);
        const detail::RatioParts refined = detail::regularity_ratio(spec, fine_data);
        rep.max_ratio = std::max(rep.max_ratio, coarse.numerator / coarse.denominator);
        rep.refined_max_ratio =
            std::max(rep.refined_max_ratio, refined.numerator / refined.denominator);
    }
    const double rel = std::abs(rep.refined_max_ratio - rep.max_ratio) /
                       std::max(rep.max_ratio, 1e-300);
    rep.verdict = (rep.skipped < ens.size && rel <= agreement) ? "bounded" : "not confirmed";
    return rep;
}

}  // namespace qs

#endif
