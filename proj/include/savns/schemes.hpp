#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "savns/field.hpp"
#include "savns/linsolve.hpp"

namespace savns {

enum class SchemeKind {
    First,            ///< first-order SAV pressure correction
    SecondRotational, ///< BDF2 SAV rotational pressure correction
    NonlinearScalar,  ///< first-order pressure correction with the energy-based scalar
};

SchemeKind parse_scheme(const std::string& name);
std::string to_string(SchemeKind s);

struct SchemeParams {
    double nu = 0.1;
    /// Horizon T; also the decay constant of the auxiliary scalar exp(-t/T).
    double t_final = 1.0;
    double dt = 0.1;
    SchemeKind scheme = SchemeKind::First;
    /// Shift inside sqrt(E(u) + C0) for the nonlinear-scalar scheme.
    double c0 = 1.0;
    Tolerances tol{};

    /// Throws ContractViolation on non-positive nu/T/dt/c0 or dt > T.
    void validate() const;
};

/**
 * Time-stepper state at t^n.
 *
 * `u_prev`/`q_prev` hold the previous level (needed by the BDF2 scheme);
 * `g` is the rotational accumulator g^{n+1} = g^n + nu div(u_tilde^{n+1}),
 * which stays zero for the first-order schemes.
 */
struct SolverState {
    double t = 0.0;
    int step = 0;
    VelocityField u;
    std::optional<VelocityField> u_prev;
    CellField p;
    double q = 1.0;
    std::optional<double> q_prev;
    CellField g;

    static SolverState initial(VelocityField u0, CellField p0, double q0);
};

struct StepDiagnostics {
    /// exp(t^{n+1}/T) q^{n+1} for the linear schemes, q^{n+1}/sqrt(E(u^n)+C0) otherwise.
    double S = 0.0;
    /// ||grad u_tilde^{n+1}||^2
    double grad_tilde_norm_sq = 0.0;
    /// Scheme's modified energy at the new level.
    double energy = 0.0;
    /// max |div u^{n+1}|
    double div_max = 0.0;
};

struct StepResult {
    SolverState state;
    StepDiagnostics diag;
    /// Intermediate (not yet projected) velocity of this step.
    VelocityField u_tilde;
};

/// Samples f(t) on the staggered grid; an empty function means f = 0.
using Forcing = std::function<VelocityField(const Grid&, double)>;

class SingularScalar : public std::runtime_error {
public:
    SingularScalar(double coefficient, double b2, double t);
};

class NoRealRoot : public std::runtime_error {
public:
    NoRealRoot(double a, double b, double c);
    double a, b, c;
};

/// A solver failure inside a time step, tagged with the step index n+1.
class StepFailure : public std::runtime_error {
public:
    StepFailure(int step, const std::string& what);
    int step;
};

struct Projection {
    VelocityField u;
    /// Mean-zero increment with Lap_h(phi) = scale * div(u_tilde).
    CellField phi;
};

/// u = u_tilde - grad(phi)/scale, which is discretely divergence-free.
Projection project(const VelocityField& u_tilde, double scale, const EllipticSolver& solver);

/// Solves the first-order scalar equation for S^{n+1}.
///
/// b1 = (N, u_tilde_1) and b2 = (N, u_tilde_2) with N the explicit
/// convection term. The equation is
///   [ (T+dt)/(T dt) - exp(2t/T) b2 ] exp(-t/T) S = exp(t/T) b1 + q^n/dt.
double solve_sav_scalar(double q_n, double t_next, double dt, double T, double b1, double b2);

/// BDF2 analogue:
///   S [ (3/(2dt) + 1/T) exp(-t/T) - exp(t/T) b2 ] = exp(t/T) b1 + (4q^n - q^{n-1})/(2dt).
double solve_sav_scalar_bdf2(double q_n, double q_prev, double t_next, double dt, double T, double b1,
                             double b2);

/// Real root of a q^2 + b q + c = 0 closest to q_n (ties go to the larger
/// root). Degenerates to the linear equation when a vanishes.
double select_sav_root(double a, double b, double c, double q_n);

StepResult step_scheme1(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver);
StepResult step_scheme2(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver);
StepResult step_scheme3(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver);

/// Dispatches on params.scheme. The BDF2 scheme bootstraps its first step
/// with the first-order scheme.
StepResult advance(const SolverState& state, const SchemeParams& params, const Forcing& force,
                   const EllipticSolver& solver);

/// ||u||^2 + |q|^2 + dt^2 ||grad p||^2
double modified_energy1(const SolverState& state, const SchemeParams& params);

/// ||u||^2 + ||2u - u_prev||^2 + (4/3) dt^2 ||grad(p+g)||^2 + (2 dt/nu) ||g||^2
///   + |q|^2 + |2q - q_prev|^2
double modified_energy2(const SolverState& state, const SchemeParams& params);

/// Energy matching params.scheme (the nonlinear-scalar scheme reports modified_energy1).
double scheme_energy(const SolverState& state, const SchemeParams& params);

/// E(u) = ||u||^2 / 2
double kinetic_energy(const VelocityField& u);

} // namespace savns
