#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "savns/field.hpp"

namespace savns {

struct Tolerances {
    double rel = 1e-11;
    double abs = 1e-14;
    /// Pure-Neumann data is accepted when |mean(rhs)| <= compat * rms(rhs) + abs.
    double compat = 1e-10;
    /// 0 picks a size-dependent default for the iterative backend.
    int max_iterations = 0;
};

struct SolveReport {
    int iterations = 0;
    double residual_l2 = 0.0;
    bool converged = false;
};

/// Iterative or direct solve that ended above tolerance.
class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, SolveReport report)
        : std::runtime_error(what), report_(report) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// Neumann right-hand side whose mean is not (numerically) zero.
class IncompatibleRhs : public std::runtime_error {
public:
    IncompatibleRhs(double mean, double rms);
    double mean() const { return mean_; }
    double rms() const { return rms_; }

private:
    double mean_;
    double rms_;
};

enum class Backend { Direct, ConjugateGradient };

Backend parse_backend(const std::string& name);
std::string to_string(Backend b);

/**
 * Constant-coefficient elliptic solves on one grid.
 *
 * The direct backend diagonalizes the operators with real-to-real
 * trigonometric transforms: DST-I along directions whose unknowns sit on
 * the Dirichlet wall lines, DST-II along cell-centered directions with odd
 * ghost reflection, DCT-II for the Neumann problem on centers. The CG
 * backend is Jacobi-preconditioned conjugate gradients applied to the same
 * stencils. Instances are immutable after construction and may be shared
 * between threads.
 */
class EllipticSolver {
public:
    explicit EllipticSolver(const Grid& grid, Backend backend = Backend::Direct, Tolerances tol = {});
    ~EllipticSolver();
    EllipticSolver(const EllipticSolver&) = delete;
    EllipticSolver& operator=(const EllipticSolver&) = delete;

    const Grid& grid() const { return grid_; }
    Backend backend() const { return backend_; }
    const Tolerances& tolerances() const { return tol_; }

    /// Solves (alpha I - nu Lap_h) w = rhs with homogeneous Dirichlet data.
    /// Values of rhs on boundary-normal edges are ignored.
    std::pair<VelocityField, SolveReport> solve_helmholtz(const VelocityField& rhs, double alpha,
                                                          double nu) const;

    /// Solves -Lap_h phi = rhs with homogeneous Neumann data; returns the
    /// mean-zero solution.
    std::pair<CellField, SolveReport> solve_poisson_neumann(const CellField& rhs) const;

private:
    struct Plans;

    VelocityField helmholtz_direct(const VelocityField& rhs, double alpha, double nu) const;
    CellField poisson_direct(const CellField& rhs) const;
    VelocityField helmholtz_cg(const VelocityField& rhs, double alpha, double nu, SolveReport& rep) const;
    CellField poisson_cg(const CellField& rhs, SolveReport& rep) const;
    int iteration_cap(std::size_t unknowns) const;

    Grid grid_;
    Backend backend_;
    Tolerances tol_;
    std::unique_ptr<Plans> plans_;
};

} // namespace savns
