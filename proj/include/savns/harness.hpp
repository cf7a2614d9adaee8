#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "savns/linsolve.hpp"
#include "savns/mms.hpp"
#include "savns/schemes.hpp"

namespace savns::harness {

enum class Mode { Converge, Stability, Single };
enum class CaseKind { Example1, Example2, StabilityIC };

Mode parse_mode(const std::string& name);
CaseKind parse_case_kind(const std::string& name);
std::string to_string(CaseKind c);

struct RunConfig {
    int nx = 128;
    int ny = 128;
    Mode mode = Mode::Converge;
    CaseKind case_kind = CaseKind::Example1;
    /// params.dt is overwritten per run from `dts`.
    SchemeParams params{};
    std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
    Backend backend = Backend::Direct;
    std::string out;
    /// Forces a 250 x 250 grid regardless of nx/ny.
    bool paper_mode = false;

    // Stability initial condition.
    std::uint64_t seed = 7;
    int ic_modes = 4;
    double ic_amplitude = 1.0;

    /// Relative energy-violation bound: violation <= energy_rel_tol * E^0.
    double energy_rel_tol = 1e-8;

    int effective_nx() const { return paper_mode ? 250 : nx; }
    int effective_ny() const { return paper_mode ? 250 : ny; }
    Grid grid() const { return Grid(effective_nx(), effective_ny(), 0.0, 0.0, 1.0, 1.0); }

    /// Divergence bound enforced after every step.
    double divergence_bound() const { return 10.0 * params.tol.rel; }

    /// Throws ContractViolation naming the first bad key.
    void validate() const;
};

/// Number of steps N with N dt = T; throws if T/dt is not an integer.
int step_count(double t_final, double dt);

/**
 * Error norms of one manufactured-solution run.
 *
 * The table columns e_u and e_q are final-time errors at t^N = T. The
 * running maxima over all steps are kept alongside for diagnostics.
 */
struct ErrorReport {
    double dt = 0.0;
    /// ||u^N - u(T)||
    double e_u = 0.0;
    /// sqrt(dt sum_n ||p^n - p(t^n)||^2), both pressures mean-free
    double e_p = 0.0;
    /// |q^N - q(T)|
    double e_q = 0.0;
    /// max_n ||u^n - u(t^n)||
    double e_u_max = 0.0;
    /// max_n |q^n - q(t^n)|
    double e_q_max = 0.0;
};

struct EnergyRow {
    int n = 0;
    double t = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double violation = 0.0;
};

struct EnergyTrace {
    std::vector<EnergyRow> rows;
    double e0 = 0.0;
    double bound = 0.0;

    double max_violation() const;
    bool passed() const { return max_violation() <= bound; }
};

struct RunResult {
    SolverState final_state;
    std::optional<ErrorReport> errors;
    std::optional<EnergyTrace> trace;
    /// max over steps of max |div u^n|
    double div_max = 0.0;
    std::vector<double> q_history;
};

/// One simulation at time step dt. MMS cases yield an ErrorReport,
/// the stability case an EnergyTrace.
RunResult run_simulation(const RunConfig& config, double dt);

/// rate_k = log(e_{k-1}/e_k) / log(dt_{k-1}/dt_k)
std::vector<double> rates(std::span<const double> errors, std::span<const double> dts);

struct ConvergenceRow {
    double dt = 0.0;
    double e_u = 0.0;
    std::optional<double> rate_u;
    double e_p = 0.0;
    std::optional<double> rate_p;
    double e_q = 0.0;
    std::optional<double> rate_q;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double div_max = 0.0;
};

/// Runs every dt of the config (concurrently) and assembles the table in dt order.
ConvergenceTable convergence_study(const RunConfig& config);

/// Runs the first dt of the config with f = 0 and returns the per-step trace.
RunResult stability_study(const RunConfig& config);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);
void write_energy_csv(std::ostream& os, const EnergyTrace& trace);

} // namespace savns::harness
