// Command-line driver: convergence tables, energy-stability traces and single runs.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "savns/harness.hpp"

namespace {

using namespace savns;
using namespace savns::harness;

enum ExitCode { kOk = 0, kInvariantFailed = 1, kConfigError = 2, kSolverFailure = 3 };

/// Accepts "0.0125" or "1/80".
double parse_dt(const std::string& text) {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("bad dt '" + text + "'");
        return v;
    }
    const double num = std::stod(text.substr(0, slash), &used);
    const std::string den_text = text.substr(slash + 1);
    std::size_t used_den = 0;
    const double den = std::stod(den_text, &used_den);
    if (used != slash || used_den != den_text.size() || den == 0.0) {
        throw std::invalid_argument("bad dt '" + text + "'");
    }
    return num / den;
}

struct Options {
    std::string scheme = "sav1";
    std::string example = "1";
    int nx = 128;
    int ny = 0;
    std::vector<std::string> dts;
    double nu = 0.1;
    double tfinal = 1.0;
    double c0 = 1.0;
    std::string backend = "direct";
    std::string out;
    bool paper_mode = false;
    std::uint64_t seed = 7;
    int ic_modes = 4;
    double ic_amplitude = 1.0;
    double tol_rel = 1e-11;
    double tol_abs = 1e-14;
    double energy_tol = 1e-8;
};

void add_common(CLI::App& app, Options& o) {
    app.add_option("--scheme", o.scheme, "Time integrator: sav1 | sav2 | sav3")
        ->check(CLI::IsMember({"sav1", "sav2", "sav3"}))
        ->capture_default_str();
    app.add_option("--example", o.example, "Case: 1 | 2 (manufactured) | stability (unforced random IC)")
        ->check(CLI::IsMember({"1", "2", "stability"}))
        ->capture_default_str();
    app.add_option("--nx", o.nx, "Cells per axis")->capture_default_str();
    app.add_option("--ny", o.ny, "Cells in y (defaults to nx)");
    app.add_option("--dt", o.dts, "Time step, repeatable; decimals or fractions such as 1/80");
    app.add_option("--nu", o.nu, "Viscosity")->capture_default_str();
    app.add_option("--tfinal", o.tfinal, "Final time T (also the scalar decay constant)")->capture_default_str();
    app.add_option("--c0", o.c0, "Energy shift for sav3")->capture_default_str();
    app.add_option("--backend", o.backend, "Elliptic solver: direct | cg")
        ->check(CLI::IsMember({"direct", "cg"}))
        ->capture_default_str();
    app.add_option("--out", o.out, "Output CSV path (stdout when empty)");
    app.add_flag("--paper-mode", o.paper_mode, "Force a 250 x 250 grid (overrides --nx/--ny)");
    app.add_option("--seed", o.seed, "Seed for the stability initial condition")->capture_default_str();
    app.add_option("--ic-modes", o.ic_modes, "Sine modes per axis in the stability IC")->capture_default_str();
    app.add_option("--ic-amplitude", o.ic_amplitude, "Max velocity of the stability IC")->capture_default_str();
    app.add_option("--tol-rel", o.tol_rel, "Relative elliptic-solver tolerance")->capture_default_str();
    app.add_option("--tol-abs", o.tol_abs, "Absolute elliptic-solver tolerance")->capture_default_str();
    app.add_option("--energy-tol", o.energy_tol, "Allowed energy violation relative to E^0")->capture_default_str();
}

RunConfig build_config(const Options& o, Mode mode) {
    RunConfig cfg;
    cfg.mode = mode;
    cfg.nx = o.nx;
    cfg.ny = o.ny > 0 ? o.ny : o.nx;
    cfg.case_kind = parse_case_kind(o.example);
    cfg.params.scheme = parse_scheme(o.scheme);
    cfg.params.nu = o.nu;
    cfg.params.t_final = o.tfinal;
    cfg.params.c0 = o.c0;
    cfg.params.tol.rel = o.tol_rel;
    cfg.params.tol.abs = o.tol_abs;
    cfg.backend = parse_backend(o.backend);
    cfg.out = o.out;
    cfg.paper_mode = o.paper_mode;
    cfg.seed = o.seed;
    cfg.ic_modes = o.ic_modes;
    cfg.ic_amplitude = o.ic_amplitude;
    cfg.energy_rel_tol = o.energy_tol;
    if (!o.dts.empty()) {
        cfg.dts.clear();
        for (const std::string& s : o.dts) cfg.dts.push_back(parse_dt(s));
    } else if (mode != Mode::Converge) {
        cfg.dts = {mode == Mode::Stability ? 0.1 : 0.0125};
    }
    if (mode == Mode::Single && cfg.dts.size() != 1) {
        throw ContractViolation("single mode takes exactly one --dt");
    }
    cfg.validate();
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& csv) {
    if (cfg.out.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
    f << csv;
}

int check_divergence(const RunConfig& cfg, double div_max) {
    if (div_max > cfg.divergence_bound()) {
        std::cerr << "FAIL: max |div u| = " << div_max << " exceeds " << cfg.divergence_bound() << '\n';
        return kInvariantFailed;
    }
    return kOk;
}

int run_converge(const RunConfig& cfg) {
    const ConvergenceTable table = convergence_study(cfg);
    std::ostringstream os;
    write_convergence_csv(os, table);
    emit(cfg, os.str());
    return check_divergence(cfg, table.div_max);
}

int run_trace(const RunResult& r, const RunConfig& cfg) {
    std::ostringstream os;
    write_energy_csv(os, *r.trace);
    emit(cfg, os.str());
    int code = check_divergence(cfg, r.div_max);
    if (!r.trace->passed()) {
        std::cerr << "FAIL: energy violation " << r.trace->max_violation() << " exceeds bound "
                  << r.trace->bound << '\n';
        code = kInvariantFailed;
    } else {
        std::cerr << "energy law holds: max violation " << r.trace->max_violation() << " <= "
                  << r.trace->bound << '\n';
    }
    return code;
}

int run_stability(const RunConfig& cfg) { return run_trace(stability_study(cfg), cfg); }

int run_single(const RunConfig& cfg) {
    RunResult r = run_simulation(cfg, cfg.dts.front());
    if (r.trace) return run_trace(r, cfg);
    ConvergenceTable table;
    table.div_max = r.div_max;
    table.rows.push_back({r.errors->dt, r.errors->e_u, std::nullopt, r.errors->e_p, std::nullopt,
                          r.errors->e_q, std::nullopt});
    std::ostringstream os;
    write_convergence_csv(os, table);
    emit(cfg, os.str());
    return check_divergence(cfg, r.div_max);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SAV pressure-correction Navier-Stokes solver on a MAC grid"};
    // Options live on the top-level app; fallthrough lets them follow the subcommand.
    app.set_config("--config", "", "Read options from a key=value file (command-line flags override)");
    app.fallthrough();
    app.require_subcommand(1);

    Options opts;
    add_common(app, opts);

    CLI::App* converge = app.add_subcommand("converge", "Error/rate table over a decreasing dt list");
    CLI::App* stability = app.add_subcommand("stability", "Per-step modified-energy trace with f = 0");
    app.add_subcommand("single", "One run at a single dt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }
    if (stability->parsed() && app.count("--example") == 0) opts.example = "stability";

    try {
        if (converge->parsed()) return run_converge(build_config(opts, Mode::Converge));
        if (stability->parsed()) return run_stability(build_config(opts, Mode::Stability));
        return run_single(build_config(opts, Mode::Single));
    } catch (const ContractViolation& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kSolverFailure;
    }
}
