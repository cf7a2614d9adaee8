#include "savns/schemes.hpp"

#include <cmath>
#include <sstream>

#include "savns/mac_ops.hpp"

namespace savns {

namespace {

std::string describe(const char* head, std::initializer_list<std::pair<const char*, double>> values) {
    std::ostringstream os;
    os.precision(17);
    os << head;
    for (const auto& [name, value] : values) os << ' ' << name << '=' << value;
    return os.str();
}

VelocityField sample_force(const Forcing& force, const Grid& grid, double t) {
    if (!force) return VelocityField(grid);
    VelocityField f = force(grid, t);
    require_same_grid(grid, f.grid(), "forcing");
    return f;
}

void check_step_time(const SolverState& state, const SchemeParams& params) {
    const double t_next = state.t + params.dt;
    if (t_next > params.t_final * (1.0 + 1e-12) + 1e-14) {
        throw ContractViolation(describe("step would pass the final time:", {{"t", state.t}, {"dt", params.dt},
                                                                              {"T", params.t_final}}));
    }
}

double finish_scalar(double coefficient, double rhs, double b2, double t_next) {
    if (std::abs(coefficient) < 1e-14 * std::max(1.0, std::abs(rhs))) {
        throw SingularScalar(coefficient, b2, t_next);
    }
    return rhs / coefficient;
}

// Re-raises solver failures tagged with the step index.
template <class Fn>
auto tag_step(int step, Fn&& fn) {
    try {
        return fn();
    } catch (const SolveFailure& e) {
        throw StepFailure(step, e.what());
    } catch (const IncompatibleRhs& e) {
        throw StepFailure(step, e.what());
    }
}

StepDiagnostics diagnostics(const SolverState& next, const VelocityField& u_tilde, double S,
                            const SchemeParams& params) {
    StepDiagnostics d;
    d.S = S;
    const double g = mac::norm_h1_semi(u_tilde);
    d.grad_tilde_norm_sq = g * g;
    d.energy = scheme_energy(next, params);
    d.div_max = mac::divergence(next.u).max_abs();
    return d;
}

} // namespace

SchemeKind parse_scheme(const std::string& name) {
    if (name == "sav1") return SchemeKind::First;
    if (name == "sav2") return SchemeKind::SecondRotational;
    if (name == "sav3") return SchemeKind::NonlinearScalar;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected sav1|sav2|sav3)");
}

std::string to_string(SchemeKind s) {
    switch (s) {
    case SchemeKind::First: return "sav1";
    case SchemeKind::SecondRotational: return "sav2";
    case SchemeKind::NonlinearScalar: return "sav3";
    }
    return "?";
}

void SchemeParams::validate() const {
    if (!(nu > 0.0)) throw ContractViolation("nu must be positive");
    if (!(t_final > 0.0)) throw ContractViolation("T_final must be positive");
    if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
    if (dt > t_final) throw ContractViolation("dt must not exceed T_final");
    if (!(c0 > 0.0)) throw ContractViolation("C0 must be positive");
}

SolverState SolverState::initial(VelocityField u0, CellField p0, double q0) {
    require_same_grid(u0.grid(), p0.grid(), "SolverState::initial");
    SolverState s;
    s.g = CellField(u0.grid());
    s.u = std::move(u0);
    s.p = std::move(p0);
    s.p.subtract_mean();
    s.q = q0;
    return s;
}

SingularScalar::SingularScalar(double coefficient, double b2, double t)
    : std::runtime_error(describe("singular scalar equation for S:", {{"coefficient", coefficient}, {"b2", b2},
                                                                       {"t", t}})) {}

NoRealRoot::NoRealRoot(double a_, double b_, double c_)
    : std::runtime_error(describe("scalar quadratic has no real root:", {{"a", a_}, {"b", b_}, {"c", c_}})),
      a(a_), b(b_), c(c_) {}

StepFailure::StepFailure(int step_, const std::string& what)
    : std::runtime_error("step " + std::to_string(step_) + ": " + what), step(step_) {}

Projection project(const VelocityField& u_tilde, double scale, const EllipticSolver& solver) {
    if (!(scale > 0.0)) throw ContractViolation("project: scale must be positive");
    // Lap(phi) = scale div(u~)  <=>  -Lap(phi) = -scale div(u~)
    CellField rhs = mac::divergence(u_tilde);
    rhs *= -scale;
    auto [phi, report] = solver.solve_poisson_neumann(rhs);
    (void)report;
    VelocityField u = u_tilde;
    u.axpy(-1.0 / scale, mac::gradient(phi));
    u.enforce_no_penetration();
    return {std::move(u), std::move(phi)};
}

double solve_sav_scalar(double q_n, double t_next, double dt, double T, double b1, double b2) {
    const double grow = std::exp(t_next / T);
    const double coefficient = ((T + dt) / (T * dt) - grow * grow * b2) / grow;
    const double rhs = grow * b1 + q_n / dt;
    return finish_scalar(coefficient, rhs, b2, t_next);
}

double solve_sav_scalar_bdf2(double q_n, double q_prev, double t_next, double dt, double T, double b1,
                             double b2) {
    const double grow = std::exp(t_next / T);
    const double coefficient = (1.5 / dt + 1.0 / T) / grow - grow * b2;
    const double rhs = grow * b1 + (4.0 * q_n - q_prev) / (2.0 * dt);
    return finish_scalar(coefficient, rhs, b2, t_next);
}

double select_sav_root(double a, double b, double c, double q_n) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    if (std::abs(a) <= 1e-15 * scale) {
        if (b == 0.0) throw NoRealRoot(a, b, c);
        return -c / b;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw NoRealRoot(a, b, c);
    const double sq = std::sqrt(disc);
    const double k = -0.5 * (b + std::copysign(sq, b));
    const double r1 = k / a;
    const double r2 = (k != 0.0) ? c / k : r1;
    const double d1 = std::abs(r1 - q_n);
    const double d2 = std::abs(r2 - q_n);
    if (d1 < d2) return r1;
    if (d2 < d1) return r2;
    return std::max(r1, r2);
}

StepResult step_scheme1(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver) {
    check_step_time(state, params);
    const Grid& grid = state.u.grid();
    const double dt = params.dt;
    const double t_next = state.t + dt;
    const int n1 = state.step + 1;

    return tag_step(n1, [&] {
        const VelocityField conv = mac::convect(state.u, state.u);

        VelocityField rhs1 = sample_force(force, grid, t_next);
        rhs1.axpy(1.0 / dt, state.u);
        rhs1 -= mac::gradient(state.p);
        VelocityField ut1 = solver.solve_helmholtz(rhs1, 1.0 / dt, params.nu).first;
        VelocityField ut2 = solver.solve_helmholtz(-1.0 * conv, 1.0 / dt, params.nu).first;

        const double S = solve_sav_scalar(state.q, t_next, dt, params.t_final, mac::inner(conv, ut1),
                                          mac::inner(conv, ut2));
        VelocityField u_tilde = ut1;
        u_tilde.axpy(S, ut2);

        auto [u_next, phi] = project(u_tilde, 1.0 / dt, solver);

        SolverState next;
        next.t = t_next;
        next.step = n1;
        next.u_prev = state.u;
        next.q_prev = state.q;
        next.u = std::move(u_next);
        next.p = state.p + phi;
        next.p.subtract_mean();
        next.q = std::exp(-t_next / params.t_final) * S;
        next.g = state.g;

        StepDiagnostics d = diagnostics(next, u_tilde, S, params);
        return StepResult{std::move(next), d, std::move(u_tilde)};
    });
}

StepResult step_scheme2(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver) {
    if (!state.u_prev || !state.q_prev) {
        throw ContractViolation("step_scheme2: previous velocity and scalar are required");
    }
    check_step_time(state, params);
    const Grid& grid = state.u.grid();
    const double dt = params.dt;
    const double t_next = state.t + dt;
    const double alpha = 1.5 / dt;
    const int n1 = state.step + 1;
    const VelocityField& u_prev = *state.u_prev;

    return tag_step(n1, [&] {
        VelocityField u_bar = 2.0 * state.u;
        u_bar -= u_prev;
        const VelocityField conv = mac::convect(u_bar, u_bar);

        VelocityField rhs1 = sample_force(force, grid, t_next);
        rhs1.axpy(2.0 / dt, state.u);
        rhs1.axpy(-0.5 / dt, u_prev);
        rhs1 -= mac::gradient(state.p);
        VelocityField ut1 = solver.solve_helmholtz(rhs1, alpha, params.nu).first;
        VelocityField ut2 = solver.solve_helmholtz(-1.0 * conv, alpha, params.nu).first;

        const double S = solve_sav_scalar_bdf2(state.q, *state.q_prev, t_next, dt, params.t_final,
                                               mac::inner(conv, ut1), mac::inner(conv, ut2));
        VelocityField u_tilde = ut1;
        u_tilde.axpy(S, ut2);

        const CellField div_tilde = mac::divergence(u_tilde);
        auto [u_next, psi] = project(u_tilde, alpha, solver);

        SolverState next;
        next.t = t_next;
        next.step = n1;
        next.u_prev = state.u;
        next.q_prev = state.q;
        next.u = std::move(u_next);
        next.p = state.p + psi;
        next.p.axpy(-params.nu, div_tilde);
        next.p.subtract_mean();
        next.g = state.g;
        next.g.axpy(params.nu, div_tilde);
        next.q = std::exp(-t_next / params.t_final) * S;

        StepDiagnostics d = diagnostics(next, u_tilde, S, params);
        return StepResult{std::move(next), d, std::move(u_tilde)};
    });
}

StepResult step_scheme3(const SolverState& state, const SchemeParams& params, const Forcing& force,
                        const EllipticSolver& solver) {
    check_step_time(state, params);
    const Grid& grid = state.u.grid();
    const double dt = params.dt;
    const double t_next = state.t + dt;
    const int n1 = state.step + 1;

    return tag_step(n1, [&] {
        const double r = 1.0 / std::sqrt(kinetic_energy(state.u) + params.c0);
        const VelocityField conv = mac::convect(state.u, state.u);

        VelocityField rhs1 = sample_force(force, grid, t_next);
        rhs1.axpy(1.0 / dt, state.u);
        rhs1 -= mac::gradient(state.p);
        VelocityField ut1 = solver.solve_helmholtz(rhs1, 1.0 / dt, params.nu).first;
        VelocityField ut2 = solver.solve_helmholtz(-1.0 * conv, 1.0 / dt, params.nu).first;

        auto [u1, phi1] = project(ut1, 1.0 / dt, solver);
        auto [u2, phi2] = project(ut2, 1.0 / dt, solver);

        // With theta = r q, the scalar equation
        //   2q(q - q^n)/dt = ((u^{n+1} - u^n)/dt + theta N, u~)
        // is quadratic in q; A and B are the theta-free and theta parts of
        // the left factor of the pairing.
        VelocityField A = u1 - state.u;
        A *= 1.0 / dt;
        VelocityField B = u2;
        B *= 1.0 / dt;
        B += conv;
        const double a = 2.0 / dt - r * r * mac::inner(B, ut2);
        const double b = -(2.0 * state.q / dt + r * (mac::inner(A, ut2) + mac::inner(B, ut1)));
        const double c = -mac::inner(A, ut1);
        const double q_next = select_sav_root(a, b, c, state.q);
        const double theta = r * q_next;

        VelocityField u_tilde = ut1;
        u_tilde.axpy(theta, ut2);

        SolverState next;
        next.t = t_next;
        next.step = n1;
        next.u_prev = state.u;
        next.q_prev = state.q;
        next.u = u1;
        next.u.axpy(theta, u2);
        next.p = state.p + phi1;
        next.p.axpy(theta, phi2);
        next.p.subtract_mean();
        next.q = q_next;
        next.g = state.g;

        StepDiagnostics d = diagnostics(next, u_tilde, theta, params);
        return StepResult{std::move(next), d, std::move(u_tilde)};
    });
}

StepResult advance(const SolverState& state, const SchemeParams& params, const Forcing& force,
                   const EllipticSolver& solver) {
    switch (params.scheme) {
    case SchemeKind::First: return step_scheme1(state, params, force, solver);
    case SchemeKind::SecondRotational:
        if (!state.u_prev || !state.q_prev) return step_scheme1(state, params, force, solver);
        return step_scheme2(state, params, force, solver);
    case SchemeKind::NonlinearScalar: return step_scheme3(state, params, force, solver);
    }
    throw ContractViolation("advance: unknown scheme");
}

double kinetic_energy(const VelocityField& u) { return 0.5 * mac::inner(u, u); }

double modified_energy1(const SolverState& state, const SchemeParams& params) {
    const double gp = mac::norm_l2(mac::gradient(state.p));
    return mac::inner(state.u, state.u) + state.q * state.q + params.dt * params.dt * gp * gp;
}

double modified_energy2(const SolverState& state, const SchemeParams& params) {
    if (!state.u_prev || !state.q_prev) {
        throw ContractViolation("modified_energy2: previous velocity and scalar are required");
    }
    VelocityField extrap = 2.0 * state.u;
    extrap -= *state.u_prev;
    const double gh = mac::norm_l2(mac::gradient(state.p + state.g));
    const double gq = 2.0 * state.q - *state.q_prev;
    const double dt = params.dt;
    return mac::inner(state.u, state.u) + mac::inner(extrap, extrap) + (4.0 / 3.0) * dt * dt * gh * gh +
           (2.0 * dt / params.nu) * mac::inner_cell(state.g, state.g) + state.q * state.q + gq * gq;
}

double scheme_energy(const SolverState& state, const SchemeParams& params) {
    if (params.scheme == SchemeKind::SecondRotational && state.u_prev && state.q_prev) {
        return modified_energy2(state, params);
    }
    return modified_energy1(state, params);
}

} // namespace savns
