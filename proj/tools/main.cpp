// quasisteady: solvability checks and half-space solves for quasi-steady
// elliptic problems with dynamic boundary conditions.
//
// Subcommands:
//   check            run the (E), (LS), (ALS) scans and the multiplier bound
//   solve            solve the half-space model problem (files or manufactured)
//   verify-estimate  maximal-regularity ratio scan over a seeded ensemble
//   example          print a builtin problem config

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "quasisteady/checks.hpp"
#include "quasisteady/config.hpp"
#include "quasisteady/estimate.hpp"
#include "quasisteady/fieldio.hpp"
#include "quasisteady/manufactured.hpp"

namespace {

using nlohmann::json;

std::string problem_dir = QS_PROBLEM_DIR;

std::string builtin_path(int id) {
    if (id < 1 || id > 3) throw qs::Error("unknown builtin example " + std::to_string(id));
    return problem_dir + "/example" + std::to_string(id) + ".cfg";
}

struct ProblemChoice {
    int example = 0;       // 1..3, or 0 when --problem is used
    std::string path;

    std::string resolve() const {
        if (!path.empty()) return path;
        return builtin_path(example);
    }
};

void add_problem_flags(CLI::App* cmd, ProblemChoice& choice) {
    auto* ex = cmd->add_option("--example", choice.example, "builtin problem id (1, 2 or 3)");
    auto* pr = cmd->add_option("--problem", choice.path, "path to a problem config file");
    ex->excludes(pr);
}

// temp-file-then-rename so readers never observe partial reports
void write_text_atomically(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw qs::Error("cannot open '" + tmp + "' for writing");
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

void emit_report(const std::string& output, const json& report) {
    const std::string text = report.dump(2) + "\n";
    if (output.empty() || output == "-") std::cout << text;
    else write_text_atomically(output, text);
}

int run_check(const ProblemChoice& choice, const qs::GridSpec& grid, int sphere_samples,
              const std::string& output) {
    qs::ProblemSpec spec = qs::load_problem_spec(choice.resolve());
    json reports;

    qs::VerificationReport e = qs::check_ellipticity(spec, sphere_samples);
    reports["E"] = e.to_json();
    bool all_pass = e.pass();

    if (e.pass()) {
        qs::VerificationReport ls = qs::check_LS(spec, grid);
        reports["LS"] = ls.to_json();
        all_pass = all_pass && ls.pass();

        auto als = qs::check_ALS(spec, grid);
        for (const auto& rep : als) {
            reports[qs::to_string(rep.condition)] = rep.to_json();
            all_pass = all_pass && rep.pass();
        }

        qs::MultiplierBoundReport mb = qs::multiplier_bound_scan(spec, grid);
        reports["multiplier_bound"] = mb.to_json();
        all_pass = all_pass && mb.bounded;
    } else {
        reports["note"] = "ellipticity failed; LS/ALS scans skipped";
    }

    json out = {{"problem", choice.resolve()}, {"reports", reports}, {"pass", all_pass}};
    emit_report(output, out);
    return all_pass ? 0 : 1;
}

struct SolveOptions {
    int K = 16, Nt = 64, Ny = 64;
    double T = 1.0, Y = 0.0, dt = 0.0;  // Y = 0: pick 10/sqrt(eta); dt > 0 overrides Nt
    double eta = 0.0;                   // 0: keep the config value
    bool manufactured = false;
    std::string profile = "linear";
    std::string f_path, rho0_path;
    std::vector<std::string> g_paths;
    std::string out_dir = ".";
    bool binary = false;
};

qs::FieldGrids make_grids(const qs::ProblemSpec& spec, const SolveOptions& opt) {
    qs::FieldGrids g;
    g.tangential_dims = spec.n - 1;
    g.K = opt.K;
    g.T = opt.T;
    g.Nt = opt.dt > 0.0 ? std::max(2, static_cast<int>(std::lround(opt.T / opt.dt))) : opt.Nt;
    g.Ny = opt.Ny;
    g.Y = opt.Y > 0.0 ? opt.Y : 10.0 / std::sqrt(spec.eta);
    return g;
}

int run_solve(const ProblemChoice& choice, const SolveOptions& opt) {
    qs::ProblemSpec spec = qs::load_problem_spec(choice.resolve());
    if (opt.eta > 0.0) spec.eta = opt.eta;

    qs::DiscreteField f;
    std::vector<qs::BoundaryField> g;
    Eigen::MatrixXcd rho0;
    qs::FieldGrids grids = make_grids(spec, opt);
    const qs::ManufacturedProblem* oracle = nullptr;
    qs::ManufacturedProblem mk;

    if (opt.manufactured) {
        auto profile = opt.profile == "exponential" ? qs::ManufacturedProblem::Profile::exponential
                                                    : qs::ManufacturedProblem::Profile::linear;
        mk = qs::make_manufactured(spec, grids, profile);
        f = mk.f;
        g = mk.g;
        rho0 = mk.rho0_modes;
        oracle = &mk;
    } else {
        if (opt.f_path.empty() || opt.rho0_path.empty() ||
            static_cast<int>(opt.g_paths.size()) != spec.m + 1)
            throw qs::Error("solve needs --f, --rho0 and " + std::to_string(spec.m + 1) +
                            " --g files (or --manufactured)");
        std::ifstream fin(opt.f_path, std::ios::binary);
        if (!fin) throw qs::Error("cannot open '" + opt.f_path + "'");
        f = qs::read_binary_interior(fin);
        grids = f.g;
        for (const auto& path : opt.g_paths) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw qs::Error("cannot open '" + path + "'");
            g.push_back(qs::read_binary_boundary(in));
            if (!g.back().g.compatible(grids)) throw qs::Error("grid mismatch in '" + path + "'");
        }
        std::ifstream rin(opt.rho0_path, std::ios::binary);
        if (!rin) throw qs::Error("cannot open '" + opt.rho0_path + "'");
        qs::BoundaryField r0 = qs::read_binary_boundary(rin);
        rho0 = Eigen::MatrixXcd::Zero(grids.n_modes(), spec.dimF);
        for (int mode = 0; mode < grids.n_modes(); ++mode)
            for (int c = 0; c < spec.dimF; ++c) rho0(mode, c) = r0.at(0, mode, c);
    }

    qs::SolveResult sol = qs::solve(spec, f, g, rho0);

    std::filesystem::create_directories(opt.out_dir);
    qs::save_csv(opt.out_dir + "/u.csv", sol.u);
    qs::save_csv(opt.out_dir + "/rho.csv", sol.rho);
    if (opt.binary) {
        qs::save_binary(opt.out_dir + "/u.qsf", sol.u);
        qs::save_binary(opt.out_dir + "/rho.qsf", sol.rho);
    }

    if (oracle) {
        qs::ManufacturedError err = qs::manufactured_error(*oracle, sol);
        std::printf("manufactured %s profile: max|u-exact| = %.3e, max|rho-exact| = %.3e\n",
                    opt.profile.c_str(), err.max_u, err.max_rho);
    }
    std::printf("solution written to %s/u.csv and %s/rho.csv\n", opt.out_dir.c_str(),
                opt.out_dir.c_str());
    return 0;
}

int run_verify_estimate(const ProblemChoice& choice, const SolveOptions& opt,
                        qs::EnsembleSpec ens, double agreement, const std::string& output) {
    qs::ProblemSpec spec = qs::load_problem_spec(choice.resolve());
    if (opt.eta > 0.0) spec.eta = opt.eta;
    qs::FieldGrids grids = make_grids(spec, opt);
    qs::RatioReport rep = qs::verify_max_regularity(spec, ens, grids, agreement);
    emit_report(output, rep.to_json());
    return rep.verdict == "bounded" ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solvability checks and half-space solves for quasi-steady problems"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string output;
    uint64_t seed = 1234;
    app.add_option("-o,--output", output, "report file (default: stdout)");
    app.add_option("--seed", seed, "seed for all randomized runs");
    app.add_option("--problem-dir", problem_dir, "directory holding the builtin configs");

    // check
    auto* check = app.add_subcommand("check", "run condition checks and write a combined report");
    ProblemChoice check_choice;
    add_problem_flags(check, check_choice);
    qs::GridSpec grid;
    int sphere_samples = 256;
    std::vector<int> grid_nu = {33, 17};
    check->add_option("--grid-zeta", grid.zeta_count, "zeta grid count")->check(CLI::Range(2, 10000));
    check->add_option("--grid-nu", grid_nu, "nu grid counts: radial angular")->expected(2);
    check->add_option("--grid-eta", grid.eta_count, "eta grid count")->check(CLI::Range(2, 10000));
    check->add_option("--theta", grid.theta, "sector half-angle (pi/2, pi)");
    check->add_option("--eta-min", grid.eta_min, "smallest scanned eta");
    check->add_option("--eta-max", grid.eta_max, "largest scanned eta");
    check->add_option("--threshold-rel", grid.threshold_rel,
                      "pass threshold relative to the largest matrix norm");
    check->add_option("--sphere-samples", sphere_samples, "ellipticity sphere samples");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve the half-space model problem");
    ProblemChoice solve_choice;
    add_problem_flags(solve_cmd, solve_choice);
    SolveOptions sopt;
    solve_cmd->add_flag("--manufactured", sopt.manufactured,
                        "use the built-in manufactured data for example 1");
    solve_cmd->add_option("--profile", sopt.profile, "manufactured time profile")
        ->check(CLI::IsMember({"linear", "exponential"}));
    solve_cmd->add_option("--K", sopt.K, "tangential mode cutoff");
    solve_cmd->add_option("--Nt", sopt.Nt, "number of time steps");
    solve_cmd->add_option("--dt", sopt.dt, "time step (overrides --Nt)");
    solve_cmd->add_option("--Ny", sopt.Ny, "height grid points");
    solve_cmd->add_option("--T", sopt.T, "final time");
    solve_cmd->add_option("--Y", sopt.Y, "height extent (default 10/sqrt(eta))");
    solve_cmd->add_option("--eta", sopt.eta, "override the config eta");
    solve_cmd->add_option("--f", sopt.f_path, "interior data (binary dump)");
    solve_cmd->add_option("--g", sopt.g_paths, "boundary data files, j = 0..m in order");
    solve_cmd->add_option("--rho0", sopt.rho0_path, "initial surface data (binary dump)");
    solve_cmd->add_option("--out-dir", sopt.out_dir, "output directory");
    solve_cmd->add_flag("--binary", sopt.binary, "also write binary dumps");

    // verify-estimate
    auto* verify = app.add_subcommand("verify-estimate", "maximal-regularity ratio scan");
    ProblemChoice verify_choice;
    add_problem_flags(verify, verify_choice);
    SolveOptions vopt;
    qs::EnsembleSpec ens;
    verify->add_option("--K", vopt.K, "tangential mode cutoff");
    verify->add_option("--Nt", vopt.Nt, "number of time steps");
    verify->add_option("--Ny", vopt.Ny, "height grid points");
    verify->add_option("--T", vopt.T, "final time");
    verify->add_option("--Y", vopt.Y, "height extent (default 10/sqrt(eta))");
    verify->add_option("--eta", vopt.eta, "override the config eta");
    verify->add_option("--ensemble", ens.size, "ensemble size");
    verify->add_option("--K-data", ens.K_data, "data band limit");
    double agreement = 0.2;
    verify->add_option("--agreement", agreement, "relative agreement for the bounded verdict");

    // example
    auto* example = app.add_subcommand("example", "print a builtin problem config");
    int example_id = 1;
    example->add_option("id", example_id, "builtin id (1, 2 or 3)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            grid.nu_radial = grid_nu.at(0);
            grid.nu_angular = grid_nu.at(1);
            if (!(grid.theta > std::numbers::pi / 2 && grid.theta < std::numbers::pi))
                throw qs::Error("theta must lie in (pi/2, pi)");
            if (check_choice.example == 0 && check_choice.path.empty())
                throw qs::Error("check needs --example or --problem");
            return run_check(check_choice, grid, sphere_samples, output);
        }
        if (solve_cmd->parsed()) {
            if (solve_choice.example == 0 && solve_choice.path.empty())
                throw qs::Error("solve needs --example or --problem");
            return run_solve(solve_choice, sopt);
        }
        if (verify->parsed()) {
            if (verify_choice.example == 0 && verify_choice.path.empty())
                throw qs::Error("verify-estimate needs --example or --problem");
            ens.seed = seed;
            return run_verify_estimate(verify_choice, vopt, ens, agreement, output);
        }
        if (example->parsed()) {
            std::ifstream in(builtin_path(example_id));
            if (!in) throw qs::Error("cannot open builtin config");
            std::cout << in.rdbuf();
            return 0;
        }
    } catch (const std::exception& e) {
        json err = {{"error", {{"message", e.what()}}}};
        emit_report(output, err);
        return 2;
    }
    return 2;
}
