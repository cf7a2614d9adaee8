#include "savns/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "savns/mac_ops.hpp"

namespace savns::harness {

namespace {

mms::ManufacturedCase manufactured(const RunConfig& cfg) {
    mms::ManufacturedCase mc;
    mc.id = cfg.case_kind == CaseKind::Example1 ? mms::CaseId::Example1 : mms::CaseId::Example2;
    mc.nu = cfg.params.nu;
    return mc;
}

double initial_scalar(const SchemeParams& params, const VelocityField& u0) {
    if (params.scheme == SchemeKind::NonlinearScalar) return std::sqrt(kinetic_energy(u0) + params.c0);
    return 1.0;
}

std::string format_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string format_rate(const std::optional<double>& r) {
    if (!r) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *r);
    return buf;
}

} // namespace

Mode parse_mode(const std::string& name) {
    if (name == "converge") return Mode::Converge;
    if (name == "stability") return Mode::Stability;
    if (name == "single") return Mode::Single;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

CaseKind parse_case_kind(const std::string& name) {
    if (name == "1") return CaseKind::Example1;
    if (name == "2") return CaseKind::Example2;
    if (name == "stability") return CaseKind::StabilityIC;
    throw std::invalid_argument("unknown example '" + name + "' (expected 1|2|stability)");
}

std::string to_string(CaseKind c) {
    switch (c) {
    case CaseKind::Example1: return "1";
    case CaseKind::Example2: return "2";
    case CaseKind::StabilityIC: return "stability";
    }
    return "?";
}

int step_count(double t_final, double dt) {
    const double ratio = t_final / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
        throw ContractViolation("T_final/dt = " + format_value(ratio) + " is not an integer");
    }
    return static_cast<int>(n);
}

void RunConfig::validate() const {
    if (effective_nx() < 2 || effective_ny() < 2) throw ContractViolation("nx and ny must be at least 2");
    if (dts.empty()) throw ContractViolation("at least one dt is required");
    for (double dt : dts) {
        SchemeParams p = params;
        p.dt = dt;
        p.validate();
        step_count(params.t_final, dt);
    }
    if (mode == Mode::Converge) {
        if (case_kind == CaseKind::StabilityIC) {
            throw ContractViolation("converge mode needs a manufactured example (1 or 2)");
        }
        for (std::size_t k = 1; k < dts.size(); ++k) {
            if (!(dts[k] < dts[k - 1])) throw ContractViolation("dt list must be strictly decreasing");
        }
    }
    if (mode == Mode::Stability) {
        if (case_kind != CaseKind::StabilityIC) {
            throw ContractViolation("stability mode runs the unforced initial condition (--example stability)");
        }
        if (params.scheme == SchemeKind::NonlinearScalar) {
            throw ContractViolation("stability mode checks the sav1/sav2 energy laws only");
        }
    }
    if (!(ic_amplitude >= 0.0) || ic_modes < 1) throw ContractViolation("bad stability initial condition");
    if (!(energy_rel_tol >= 0.0)) throw ContractViolation("energy tolerance must be non-negative");
}

double EnergyTrace::max_violation() const {
    // Row 0 only records E^0.
    double m = -std::numeric_limits<double>::infinity();
    for (const EnergyRow& r : rows)
        if (r.n > 0) m = std::max(m, r.violation);
    return std::isfinite(m) ? m : 0.0;
}

RunResult run_simulation(const RunConfig& config, double dt) {
    const Grid grid = config.grid();
    SchemeParams params = config.params;
    params.dt = dt;
    params.validate();
    const int steps = step_count(params.t_final, dt);
    const EllipticSolver solver(grid, config.backend, params.tol);

    const bool manufactured_case = config.case_kind != CaseKind::StabilityIC;
    const mms::ManufacturedCase mc = manufactured(config);

    SolverState state;
    Forcing force;
    if (manufactured_case) {
        mms::SampledFields init = mms::sample_on_grid(mc, grid, 0.0);
        const double q0 = initial_scalar(params, init.u);
        state = SolverState::initial(std::move(init.u), std::move(init.p), q0);
        force = mms::forcing_for(mc);
    } else {
        VelocityField u0 = mms::random_solenoidal(grid, config.seed, config.ic_modes, config.ic_amplitude);
        const double q0 = initial_scalar(params, u0);
        state = SolverState::initial(std::move(u0), CellField(grid), q0);
    }

    RunResult result;
    result.q_history.push_back(state.q);
    ErrorReport err;
    err.dt = dt;
    double pressure_sum = 0.0;
    EnergyTrace trace;
    if (!manufactured_case) {
        trace.e0 = modified_energy1(state, params);
        trace.bound = config.energy_rel_tol * trace.e0;
        trace.rows.push_back({0, 0.0, trace.e0, 0.0, 0.0});
    }

    for (int n = 0; n < steps; ++n) {
        StepResult res = advance(state, params, force, solver);
        result.div_max = std::max(result.div_max, res.diag.div_max);

        if (manufactured_case) {
            const mms::SampledFields ex = mms::sample_on_grid(mc, grid, res.state.t);
            err.e_u = mac::norm_l2(res.state.u - ex.u);
            err.e_u_max = std::max(err.e_u_max, err.e_u);
            CellField ep = res.state.p;
            ep.subtract_mean();
            ep -= ex.p;
            pressure_sum += mac::inner_cell(ep, ep);
            const double q_exact = params.scheme == SchemeKind::NonlinearScalar
                                       ? std::sqrt(kinetic_energy(ex.u) + params.c0)
                                       : std::exp(-res.state.t / params.t_final);
            err.e_q = std::abs(res.state.q - q_exact);
            err.e_q_max = std::max(err.e_q_max, err.e_q);
        } else {
            // The BDF2 energy needs two levels, so its first (bootstrap) step
            // is checked against the first-order energy.
            const bool second = params.scheme == SchemeKind::SecondRotational && state.u_prev.has_value();
            const double before = second ? modified_energy2(state, params) : modified_energy1(state, params);
            const double after = second ? modified_energy2(res.state, params) : modified_energy1(res.state, params);
            EnergyRow row;
            row.n = res.state.step;
            row.t = res.state.t;
            row.energy = after;
            row.dissipation = 2.0 * params.nu * dt * res.diag.grad_tilde_norm_sq;
            row.violation = after - before + row.dissipation;
            trace.rows.push_back(row);
        }
        state = std::move(res.state);
        result.q_history.push_back(state.q);
    }

    if (manufactured_case) {
        err.e_p = std::sqrt(dt * pressure_sum);
        result.errors = err;
    } else {
        result.trace = std::move(trace);
    }
    result.final_state = std::move(state);
    return result;
}

std::vector<double> rates(std::span<const double> errors, std::span<const double> dts) {
    if (errors.size() != dts.size() || errors.size() < 2) {
        throw ContractViolation("rates: need matching error/dt lists of length >= 2");
    }
    std::vector<double> out;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k - 1] > 0.0) || !(errors[k] > 0.0) || !(dts[k - 1] > 0.0) || !(dts[k] > 0.0)) {
            throw std::domain_error("rates: undefined for non-positive error or dt");
        }
        if (dts[k - 1] == dts[k]) throw std::domain_error("rates: undefined for equal time steps");
        out.push_back(std::log(errors[k - 1] / errors[k]) / std::log(dts[k - 1] / dts[k]));
    }
    return out;
}

ConvergenceTable convergence_study(const RunConfig& config) {
    config.validate();
    std::vector<std::future<RunResult>> jobs;
    for (double dt : config.dts) {
        jobs.push_back(std::async(std::launch::async, [&config, dt] { return run_simulation(config, dt); }));
    }
    ConvergenceTable table;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        RunResult r = jobs[k].get();
        table.div_max = std::max(table.div_max, r.div_max);
        const ErrorReport& e = *r.errors;
        ConvergenceRow row;
        row.dt = e.dt;
        row.e_u = e.e_u;
        row.e_p = e.e_p;
        row.e_q = e.e_q;
        table.rows.push_back(row);
    }
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        const ConvergenceRow& a = table.rows[k - 1];
        ConvergenceRow& b = table.rows[k];
        const double dts[2] = {a.dt, b.dt};
        auto rate_of = [&](double ea, double eb) -> std::optional<double> {
            if (!(ea > 0.0) || !(eb > 0.0)) return std::nullopt;
            const double es[2] = {ea, eb};
            return rates(es, dts).front();
        };
        b.rate_u = rate_of(a.e_u, b.e_u);
        b.rate_p = rate_of(a.e_p, b.e_p);
        b.rate_q = rate_of(a.e_q, b.e_q);
    }
    return table;
}

RunResult stability_study(const RunConfig& config) {
    config.validate();
    if (config.case_kind != CaseKind::StabilityIC) {
        throw ContractViolation("stability_study: needs the unforced initial condition");
    }
    return run_simulation(config, config.dts.front());
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
    os << "dt,e_u,rate_u,e_p,rate_p,e_q,rate_q\n";
    for (const ConvergenceRow& r : table.rows) {
        os << format_value(r.dt) << ',' << format_value(r.e_u) << ',' << format_rate(r.rate_u) << ','
           << format_value(r.e_p) << ',' << format_rate(r.rate_p) << ',' << format_value(r.e_q) << ','
           << format_rate(r.rate_q) << '\n';
    }
}

void write_energy_csv(std::ostream& os, const EnergyTrace& trace) {
    os << "n,t,energy,dissipation,violation\n";
    for (const EnergyRow& r : trace.rows) {
        os << r.n << ',' << format_value(r.t) << ',' << format_value(r.energy) << ',' << format_value(r.dissipation)
           << ',' << format_value(r.violation) << '\n';
    }
}

} // namespace savns::harness
