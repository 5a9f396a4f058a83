#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "quasisteady/config.hpp"
#include "quasisteady/ellipticity.hpp"
#include "quasisteady/problem.hpp"

using namespace qs;
using Catch::Approx;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string problem_path(const std::string& name) {
    return std::string(QS_PROBLEM_DIR) + "/" + name;
}

// eta u - Lap u with dynamic Neumann coupling (worked example 1), n = 2.
ProblemSpec laplace_spec() { return load_problem_spec(problem_path("example1.cfg")); }

ProblemSpec biharmonic_spec() { return load_problem_spec(problem_path("example3.cfg")); }

}  // namespace

TEST_CASE("example 1 config parses with the expected orders") {
    ProblemSpec spec = laplace_spec();
    CHECK(spec.m == 1);
    CHECK(spec.boundary[0].order == 1);
    CHECK(spec.boundary[1].order == 0);
    CHECK_FALSE(spec.boundary[0].has_tangential());
    REQUIRE(spec.boundary[1].has_tangential());
    CHECK(*spec.boundary[1].tangential_order == 0);
    CHECK(spec.l_j(1).value() == 1);
    CHECK(spec.l() == 1);

    FunctionSpaceSpec fs = function_spaces(spec);
    CHECK(fs.kappa[0] == Approx(1.0 - 0.5 - 0.25));  // 1 - m_0/2m - 1/(2mq)
    CHECK(fs.kappa[1] == Approx(1.0 - 0.25));
}

TEST_CASE("config with no tangential coefficients anywhere is rejected") {
    std::string text = read_file(problem_path("example1.cfg"));
    auto pos = text.find("tangential_order");
    REQUIRE(pos != std::string::npos);
    text = text.substr(0, pos);  // drop C_1 entirely
    try {
        parse_problem_spec(text);
        FAIL("expected invariant violation");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("at least one C_j") != std::string::npos);
    }
}

TEST_CASE("parser reports unknown keys and malformed entries with a locus") {
    CHECK_THROWS_AS(parse_problem_spec("[problem]\nbogus = 3\n"), ConfigError);
    try {
        parse_problem_spec("[problem]\ndimE = 1\n\n[interior]\nalpha = (2,0) : [[1]\n");
    } catch (const ConfigError& e) {
        CHECK(e.line == 5);
        CHECK(e.field == "alpha");
    }
    CHECK_THROWS_AS(parse_problem_spec("x = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_problem_spec("[bogus]\n"), ConfigError);
}

TEST_CASE("singular pure-normal coefficient is rejected by name") {
    std::string text = read_file(problem_path("example1.cfg"));
    auto pos = text.find("alpha = (0,2) : [[1]]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("alpha = (0,2) : [[1]]").size(), "alpha = (0,2) : [[0]]");
    try {
        parse_problem_spec(text);
        FAIL("expected invariant violation");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("a_0") != std::string::npos);
    }
}

TEST_CASE("serialize/parse round trip is the identity") {
    for (const char* name : {"example1.cfg", "example2.cfg", "example3.cfg"}) {
        ProblemSpec spec = load_problem_spec(problem_path(name));
        ProblemSpec again = parse_problem_spec(serialize_problem_spec(spec));
        CHECK(again == spec);
    }
}

TEST_CASE("complex literals cover the documented forms") {
    ProblemSpec spec = laplace_spec();
    std::string text = serialize_problem_spec(spec);
    auto pos = text.find("beta = (0,1) : [[-1i]]");
    CHECK(pos != std::string::npos);

    CHECK(detail::parse_complex("2", 1, "t") == Complex(2, 0));
    CHECK(detail::parse_complex("-1.5", 1, "t") == Complex(-1.5, 0));
    CHECK(detail::parse_complex("3i", 1, "t") == Complex(0, 3));
    CHECK(detail::parse_complex("1+2i", 1, "t") == Complex(1, 2));
    CHECK(detail::parse_complex("2.5-1e-3i", 1, "t") == Complex(2.5, -1e-3));
    CHECK(detail::parse_complex("-i", 1, "t") == Complex(0, -1));
    CHECK_THROWS_AS(detail::parse_complex("1+2", 1, "t"), ConfigError);
}

TEST_CASE("interior principal symbol evaluates the multi-index sum") {
    ProblemSpec spec = laplace_spec();
    RVector e1(2);
    e1 << 1.0, 0.0;
    CHECK(evaluate_interior_symbol(spec, e1)(0, 0).real() == Approx(1.0));

    ProblemSpec bi = biharmonic_spec();
    RVector xi(2);
    xi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(evaluate_interior_symbol(bi, xi)(0, 0).real() == Approx(1.0));
}

TEST_CASE("diagonal system symbol evaluates blockwise") {
    ProblemSpec spec = laplace_spec();
    spec.dimE = 2;
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    for (auto& [alpha, mat] : spec.interior) mat = d;
    RVector xi(2);
    xi << 0.6, 0.8;
    CMatrix sym = evaluate_interior_symbol(spec, xi);
    CHECK(sym(0, 0).real() == Approx(1.0));
    CHECK(sym(1, 1).real() == Approx(2.0));
    CHECK(std::abs(sym(0, 1)) == Approx(0.0));
}

TEST_CASE("interior symbol is homogeneous of degree 2m") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (const char* name : {"example1.cfg", "example3.cfg"}) {
        ProblemSpec spec = load_problem_spec(problem_path(name));
        for (int rep = 0; rep < 20; ++rep) {
            RVector xi(spec.n);
            for (int i = 0; i < spec.n; ++i) xi(i) = unif(rng);
            const double t = std::abs(unif(rng)) + 0.1;
            const CMatrix a = evaluate_interior_symbol(spec, RVector(t * xi));
            const CMatrix b = std::pow(t, 2.0 * spec.m) * evaluate_interior_symbol(spec, xi);
            CHECK((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }
}

TEST_CASE("ellipticity check passes the Laplacian with min Re = 1") {
    VerificationReport rep = check_ellipticity(laplace_spec(), 64);
    CHECK(rep.pass());
    CHECK(rep.extra["min_re"].get<double>() == Approx(1.0));
}

TEST_CASE("sign-flipped operator fails with the offending eigenvalue") {
    ProblemSpec spec = laplace_spec();
    for (auto& [alpha, mat] : spec.interior) mat = -mat;
    VerificationReport rep = check_ellipticity(spec, 32);
    CHECK_FALSE(rep.pass());
    CHECK(rep.extra["witness_eigenvalue"]["re"].get<double>() == Approx(-1.0));
}

TEST_CASE("rotated symbol at angle pi/2 fails (Re = 0)") {
    ProblemSpec spec = laplace_spec();
    for (auto& [alpha, mat] : spec.interior) mat *= Complex(0.0, 1.0);
    VerificationReport rep = check_ellipticity(spec, 32);
    CHECK_FALSE(rep.pass());
}

TEST_CASE("ellipticity verdict is stable under refinement") {
    for (const char* name : {"example1.cfg", "example2.cfg", "example3.cfg"}) {
        ProblemSpec spec = load_problem_spec(problem_path(name));
        const int N = 33;
        const double margin = 1e-8;
        VerificationReport coarse = check_ellipticity(spec, N, margin);
        VerificationReport fine = check_ellipticity(spec, 4 * N, margin / 2.0);
        REQUIRE(coarse.pass());
        CHECK(fine.pass());
    }
}
