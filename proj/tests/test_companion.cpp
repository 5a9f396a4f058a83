#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "quasisteady/boundary.hpp"
#include "quasisteady/companion.hpp"
#include "quasisteady/config.hpp"

using namespace qs;
using Catch::Approx;

namespace {

std::string problem_path(const std::string& name) {
    return std::string(QS_PROBLEM_DIR) + "/" + name;
}

ProblemSpec laplace_spec() { return load_problem_spec(problem_path("example1.cfg")); }
ProblemSpec biharmonic_spec() { return load_problem_spec(problem_path("example3.cfg")); }

// Independent evaluation of sum_k a_k(zeta) z^{2m-k} + a I straight from the
// coefficient map (test-side oracle for the companion charpoly identity).
CMatrix normal_symbol_oracle(const ProblemSpec& spec, const RVector& zeta, Complex z, double a) {
    CMatrix acc = a * CMatrix::Identity(spec.dimE, spec.dimE);
    for (const auto& [alpha, mat] : spec.interior) {
        if (order(alpha) != 2 * spec.m) continue;
        Complex term = 1.0;
        for (int i = 0; i < spec.n - 1; ++i)
            for (int r = 0; r < alpha[i]; ++r) term *= zeta(i);
        for (int r = 0; r < alpha[spec.n - 1]; ++r) term *= z;
        acc += term * mat;
    }
    return acc;
}

}  // namespace

TEST_CASE("mode parameters satisfy the defining formulas") {
    RVector zero1(1);
    zero1 << 0.0;

    SECTION("eta=1, xi'=0 collapses all powers") {
        ModeParameters mp = mode_parameters(1.0, zero1, Complex(1, 0), 1, 1);
        CHECK(mp.mu == Approx(1.0));
        CHECK(mp.zeta.norm() == Approx(0.0));
        CHECK(mp.a == Approx(1.0));
        CHECK(mp.a_tilde == Approx(1.0));
        CHECK(mp.nu == Complex(1, 0));
    }
    SECTION("eta=16 gives mu=4 for m=1") {
        ModeParameters mp = mode_parameters(16.0, zero1, Complex(0, 0), 1, 1);
        CHECK(mp.mu == Approx(4.0));
        CHECK(mp.a == Approx(1.0));
    }
    SECTION("|xi'| -> infinity drives a -> 0, |zeta| -> 1") {
        double prev_a = 1.0;
        for (double r : {1e1, 1e2, 1e3, 1e4}) {
            RVector xi(1);
            xi << r;
            ModeParameters mp = mode_parameters(1.0, xi, Complex(0, 0), 1, 1);
            CHECK(mp.a < prev_a);
            prev_a = mp.a;
            CHECK(mp.zeta.norm() < 1.0);
        }
        RVector xi(1);
        xi << 1e4;
        CHECK(mode_parameters(1.0, xi, Complex(0, 0), 1, 1).zeta.norm() == Approx(1.0).margin(1e-7));
    }
    SECTION("|zeta|^{2m} + a = 1 identity") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(-8.0, 8.0);
        for (int rep = 0; rep < 50; ++rep) {
            RVector xi(2);
            xi << unif(rng), unif(rng);
            const double eta = std::abs(unif(rng)) + 0.05;
            for (int m : {1, 2}) {
                ModeParameters mp = mode_parameters(eta, xi, Complex(1, 1), m, 1);
                CHECK(std::pow(mp.zeta.norm(), 2 * m) + mp.a == Approx(1.0).epsilon(0).margin(1e-12));
                CHECK(mp.b == Approx(mp.zeta.norm()));
                CHECK(mp.a > 0.0);
                CHECK(mp.a <= 1.0);
            }
        }
    }
}

TEST_CASE("companion matrix of the Laplacian mode") {
    ProblemSpec spec = laplace_spec();
    RVector zeta(1);
    zeta << 0.6;
    const double a = 1.0 - 0.36;  // |zeta|^2 + a = 1
    CMatrix A0 = build_companion(spec, zeta, a);
    REQUIRE(A0.rows() == 2);
    CHECK(A0(0, 0) == Complex(0, 0));
    CHECK(A0(0, 1) == Complex(1, 0));
    CHECK(A0(1, 0).real() == Approx(-1.0));  // -(|zeta|^2 + a)
    CHECK(A0(1, 1) == Complex(0, 0));
}

TEST_CASE("companion matrix of the biharmonic mode") {
    ProblemSpec spec = biharmonic_spec();
    RVector zeta(1);
    zeta << 0.5;
    const double a = 0.25;
    CMatrix A0 = build_companion(spec, zeta, a);
    REQUIRE(A0.rows() == 4);
    // last row: (-(|zeta|^4 + a), 0, -2|zeta|^2, 0)
    CHECK(A0(3, 0).real() == Approx(-(std::pow(0.5, 4) + a)));
    CHECK(std::abs(A0(3, 1)) == Approx(0.0));
    CHECK(A0(3, 2).real() == Approx(-2.0 * 0.25));
    CHECK(std::abs(A0(3, 3)) == Approx(0.0));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(A0(r, c) - ((c == r + 1) ? Complex(1, 0) : Complex(0, 0))) < 1e-15);
}

TEST_CASE("companion charpoly identity against brute-force oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const char* name : {"example1.cfg", "example3.cfg"}) {
        ProblemSpec spec = load_problem_spec(problem_path(name));
        const Complex det_a0 = spec.a0().determinant();
        for (int rep = 0; rep < 20; ++rep) {
            RVector zeta(spec.n - 1);
            for (int i = 0; i < spec.n - 1; ++i) zeta(i) = unif(rng);
            const double a = std::abs(unif(rng)) + 0.01;
            const Complex z(unif(rng) * 2.0, unif(rng) * 2.0);
            CMatrix A0 = build_companion(spec, zeta, a);
            const Complex lhs =
                (z * CMatrix::Identity(A0.rows(), A0.cols()) - A0).determinant() * det_a0;
            const Complex rhs = normal_symbol_oracle(spec, zeta, z, a).determinant();
            CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("stable projection of the Laplacian mode is the hand-derived one") {
    ProblemSpec spec = laplace_spec();
    RVector zeta(1);
    zeta << 0.6;
    CompanionSystem sys = stable_projection(spec, zeta, 1.0 - 0.36);

    CMatrix expected(2, 2);
    expected << Complex(0.5, 0), Complex(0, 0.5), Complex(0, -0.5), Complex(0.5, 0);
    CHECK((sys.P_plus - expected).norm() < 1e-10);
    CHECK(sys.stable_dim() == 1);
}

TEST_CASE("spectral projection properties hold on a parameter grid") {
    for (const char* name : {"example1.cfg", "example2.cfg", "example3.cfg"}) {
        ProblemSpec spec = load_problem_spec(problem_path(name));
        for (double z : {0.0, 0.3, 0.7, 0.95}) {
            RVector zeta(1);
            zeta << z;
            const double a = 1.0 - std::pow(z, 2 * spec.m);
            CompanionSystem sys = stable_projection(spec, zeta, a);
            const CMatrix iA0 = Complex(0, 1) * sys.A0;
            CHECK((sys.P_plus * sys.P_plus - sys.P_plus).norm() < 1e-10);
            CHECK((sys.P_plus * iA0 - iA0 * sys.P_plus).norm() < 1e-10);
            CHECK(sys.stable_dim() == spec.m * spec.dimE);
            const int rank = static_cast<int>(std::lround(sys.P_plus.trace().real()));
            CHECK(rank == spec.m * spec.dimE);
            // spectrum split: stable generator strictly in the left half plane
            CHECK(sys.stable_generator.diagonal().real().maxCoeff() < 0.0);
        }
    }
}

TEST_CASE("spectral splitting failure is loud at a = 0, zeta = 0") {
    ProblemSpec spec = laplace_spec();
    RVector zeta(1);
    zeta << 0.0;
    CHECK_THROWS_AS(stable_projection(spec, zeta, 0.0), SpectralSplittingError);
}

TEST_CASE("projection annihilates its own range under the decaying flow") {
    ProblemSpec spec = biharmonic_spec();
    RVector zeta(1);
    zeta << 0.5;
    CompanionSystem sys = stable_projection(spec, zeta, 1.0 - std::pow(0.5, 4));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    CVector w0(4);
    for (int i = 0; i < 4; ++i) w0(i) = Complex(gauss(rng), gauss(rng));
    const CVector unstable = sys.P_plus * w0;
    for (double y : {0.0, 0.5, 2.0})
        CHECK(evaluate_decaying_solution(sys, 1.3, unstable, y).norm() < 1e-10);
}

TEST_CASE("decaying solution of the Laplacian mode is a pure exponential") {
    ProblemSpec spec = laplace_spec();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double eta = unif(rng);
        RVector xi(1);
        xi << unif(rng);
        ModeParameters mp = mode_parameters(eta, xi, Complex(0, 0), 1, 1);
        CompanionSystem sys = stable_projection(spec, mp.zeta, mp.a);
        CVector w0(2);
        w0 << Complex(unif(rng), unif(rng)), Complex(unif(rng), unif(rng));
        const CVector w0s = w0 - sys.P_plus * w0;
        const double y = unif(rng);
        const CVector v = evaluate_decaying_solution(sys, mp.mu, w0, y);
        const double decay = std::exp(-std::sqrt(eta + xi(0) * xi(0)) * y);
        CHECK(std::abs(v(0) - decay * w0s(0)) < 1e-12 * std::max(1.0, std::abs(w0s(0))));
    }
}

TEST_CASE("decaying flow has the semigroup property") {
    ProblemSpec spec = biharmonic_spec();
    RVector zeta(1);
    zeta << 0.4;
    CompanionSystem sys = stable_projection(spec, zeta, 1.0 - std::pow(0.4, 4));
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss;
    CVector w0(4);
    for (int i = 0; i < 4; ++i) w0(i) = Complex(gauss(rng), gauss(rng));
    const double mu = 1.7, y1 = 0.3, y2 = 0.9;
    const CVector at_y1 = evaluate_decaying_solution(sys, mu, w0, y1);
    const CVector composed = evaluate_decaying_solution(sys, mu, at_y1, y2);
    const CVector direct = evaluate_decaying_solution(sys, mu, w0, y1 + y2);
    CHECK((composed - direct).norm() < 1e-9 * std::max(1.0, direct.norm()));
}

TEST_CASE("decay bound from the spectral gap") {
    ProblemSpec spec = laplace_spec();
    RVector xi(1);
    xi << 0.8;
    ModeParameters mp = mode_parameters(2.0, xi, Complex(0, 0), 1, 1);
    CompanionSystem sys = stable_projection(spec, mp.zeta, mp.a);
    CVector w0(2);
    w0 << Complex(1, 0), Complex(0, -1);
    const CVector w0s = w0 - sys.P_plus * w0;
    const double y = 10.0 / mp.mu;
    const double gap = sys.spectral_gap();
    const CVector v = evaluate_decaying_solution(sys, mp.mu, w0, y);
    CHECK(v.norm() <= std::exp(-10.0 * gap) * w0s.norm() * (1.0 + 1e-9));
}

TEST_CASE("projection is Lipschitz on a compact grid away from a = 0") {
    ProblemSpec spec = biharmonic_spec();
    double max_ratio = 0.0;
    CMatrix prev;
    double prev_z = 0.0;
    for (double z = 0.0; z <= 0.9001; z += 0.05) {
        RVector zeta(1);
        zeta << z;
        const double a = 1.0 - std::pow(z, 4);
        CMatrix P = stable_projection(spec, zeta, a).P_plus;
        if (prev.size() > 0) {
            const double da = std::abs(std::pow(prev_z, 4) - std::pow(z, 4));
            max_ratio = std::max(max_ratio, (P - prev).norm() / (std::abs(z - prev_z) + da));
        }
        prev = P;
        prev_z = z;
    }
    INFO("empirical Lipschitz constant " << max_ratio);
    CHECK(max_ratio < 10.0);  // regression bound; measured ~1.5
}

TEST_CASE("dimE = 2 diagonal system splits with rank m*dimE") {
    ProblemSpec spec = laplace_spec();
    spec.dimE = 2;
    for (auto& [alpha, mat] : spec.interior) {
        CMatrix d = CMatrix::Zero(2, 2);
        d(0, 0) = mat(0, 0);
        d(1, 1) = 2.0 * mat(0, 0);
        mat = d;
    }
    RVector zeta(1);
    zeta << 0.5;
    CompanionSystem sys = stable_projection(build_companion(spec, zeta, 0.75));
    CHECK(sys.stable_dim() == 2);
    CHECK((sys.P_plus * sys.P_plus - sys.P_plus).norm() < 1e-10);
}
