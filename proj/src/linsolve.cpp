#include "savns/linsolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "savns/mac_ops.hpp"

namespace savns {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// Eigenvalue of -d2/dx2 (3-point) for wavenumber k on n cells of width h.
double stencil_eigenvalue(int k, int n, double h) {
    const double s = std::sin(k * std::numbers::pi / (2.0 * n));
    return 4.0 * s * s / (h * h);
}

class R2RPlan {
public:
    R2RPlan() = default;
    R2RPlan(int n_slow, int n_fast, fftw_r2r_kind slow, fftw_r2r_kind fast) {
        std::vector<double> scratch(static_cast<std::size_t>(n_slow) * n_fast);
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_r2r_2d(n_slow, n_fast, scratch.data(), scratch.data(), slow, fast,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~R2RPlan() {
        if (plan_ != nullptr) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
    }
    R2RPlan(const R2RPlan&) = delete;
    R2RPlan& operator=(const R2RPlan&) = delete;

    /// In-place transform of a row-major (slow, fast) buffer.
    void run(std::vector<double>& data) const { fftw_execute_r2r(plan_, data.data(), data.data()); }

private:
    fftw_plan plan_ = nullptr;
};

double rms(const CellField& f) {
    double s = 0.0;
    for (double x : f.values()) s += x * x;
    return std::sqrt(s / static_cast<double>(f.values().size()));
}

VelocityField helmholtz_apply(const VelocityField& w, double alpha, double nu) {
    VelocityField out = mac::laplacian_dirichlet(w, -nu);
    out.axpy(alpha, w);
    out.enforce_no_penetration();
    return out;
}

CellField neumann_apply(const CellField& p) {
    CellField out = mac::laplacian_neumann(p);
    out *= -1.0;
    return out;
}

double dot(const VelocityField& a, const VelocityField& b) { return mac::inner(a, b); }
double dot(const CellField& a, const CellField& b) { return mac::inner_cell(a, b); }

/**
 * Preconditioned conjugate gradients on a field type. `project` maps a
 * vector onto the solvable subspace (identity for SPD problems, mean
 * removal for the Neumann problem). Restarts from the true residual when
 * the recursive one has drifted below target.
 */
template <class Field, class Apply, class Precond, class Project>
SolveReport pcg(Field& x, const Field& b, Apply apply, Precond precond, Project project, double target,
                int max_iterations) {
    SolveReport rep;
    auto true_residual = [&] {
        Field r = b;
        r -= apply(x);
        project(r);
        return r;
    };

    Field r = true_residual();
    double rnorm = mac::norm_l2(r);
    while (rnorm > target && rep.iterations < max_iterations) {
        Field z = precond(r);
        project(z);
        Field d = z;
        double rz = dot(r, z);
        while (rnorm > target && rep.iterations < max_iterations) {
            Field ad = apply(d);
            project(ad);
            const double dad = dot(d, ad);
            if (!(dad > 0.0)) break;
            const double step = rz / dad;
            x.axpy(step, d);
            r.axpy(-step, ad);
            rnorm = mac::norm_l2(r);
            ++rep.iterations;
            z = precond(r);
            project(z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            d *= beta;
            d += z;
        }
        r = true_residual();
        rnorm = mac::norm_l2(r);
    }
    rep.residual_l2 = rnorm;
    rep.converged = rnorm <= target;
    return rep;
}

} // namespace

IncompatibleRhs::IncompatibleRhs(double mean, double rms_value)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "Neumann problem is incompatible: mean(rhs) = " << mean << " against rms(rhs) = "
             << rms_value << " (the constant mode has no solution)";
          return os.str();
      }()),
      mean_(mean),
      rms_(rms_value) {}

Backend parse_backend(const std::string& name) {
    if (name == "direct") return Backend::Direct;
    if (name == "cg") return Backend::ConjugateGradient;
    throw std::invalid_argument("unknown solver backend '" + name + "' (expected direct|cg)");
}

std::string to_string(Backend b) { return b == Backend::Direct ? "direct" : "cg"; }

struct EllipticSolver::Plans {
    // u unknowns: rows j = 0..ny-1 (DST-II), columns i = 1..nx-1 (DST-I).
    R2RPlan u_fwd, u_inv;
    // v unknowns: rows j = 1..ny-1 (DST-I), columns i = 0..nx-1 (DST-II).
    R2RPlan v_fwd, v_inv;
    // cell unknowns: DCT-II both ways.
    R2RPlan c_fwd, c_inv;

    explicit Plans(const Grid& g)
        : u_fwd(g.ny, g.nx - 1, FFTW_RODFT10, FFTW_RODFT00),
          u_inv(g.ny, g.nx - 1, FFTW_RODFT01, FFTW_RODFT00),
          v_fwd(g.ny - 1, g.nx, FFTW_RODFT00, FFTW_RODFT10),
          v_inv(g.ny - 1, g.nx, FFTW_RODFT00, FFTW_RODFT01),
          c_fwd(g.ny, g.nx, FFTW_REDFT10, FFTW_REDFT10),
          c_inv(g.ny, g.nx, FFTW_REDFT01, FFTW_REDFT01) {}
};

EllipticSolver::EllipticSolver(const Grid& grid, Backend backend, Tolerances tol)
    : grid_(grid), backend_(backend), tol_(tol) {
    if (backend_ == Backend::Direct) plans_ = std::make_unique<Plans>(grid_);
}

EllipticSolver::~EllipticSolver() = default;

int EllipticSolver::iteration_cap(std::size_t unknowns) const {
    if (tol_.max_iterations > 0) return tol_.max_iterations;
    return static_cast<int>(std::max<std::size_t>(1000, 10 * unknowns));
}

std::pair<VelocityField, SolveReport> EllipticSolver::solve_helmholtz(const VelocityField& rhs, double alpha,
                                                                      double nu) const {
    require_same_grid(grid_, rhs.grid(), "solve_helmholtz");
    if (!(alpha > 0.0) || !(nu >= 0.0)) {
        throw ContractViolation("solve_helmholtz: need alpha > 0 and nu >= 0");
    }
    VelocityField b = rhs;
    b.enforce_no_penetration();
    const double bnorm = mac::norm_l2(b);
    SolveReport rep;
    if (bnorm == 0.0) {
        rep.converged = true;
        return {VelocityField(grid_), rep};
    }
    const double target = tol_.abs + tol_.rel * bnorm;

    VelocityField w(grid_);
    if (backend_ == Backend::Direct) {
        w = helmholtz_direct(b, alpha, nu);
        rep.iterations = 1;
        VelocityField r = b;
        r -= helmholtz_apply(w, alpha, nu);
        rep.residual_l2 = mac::norm_l2(r);
        rep.converged = rep.residual_l2 <= target;
    } else {
        w = helmholtz_cg(b, alpha, nu, rep);
    }
    if (!rep.converged) {
        std::ostringstream os;
        os << "Helmholtz solve did not converge: residual " << rep.residual_l2 << " > " << target << " after "
           << rep.iterations << " iterations";
        throw SolveFailure(os.str(), rep);
    }
    return {std::move(w), rep};
}

std::pair<CellField, SolveReport> EllipticSolver::solve_poisson_neumann(const CellField& rhs) const {
    require_same_grid(grid_, rhs.grid(), "solve_poisson_neumann");
    const double mean = rhs.mean();
    const double r0 = rms(rhs);
    SolveReport rep;
    if (r0 == 0.0) {
        rep.converged = true;
        return {CellField(grid_), rep};
    }
    // The absolute floor admits rounding-level data such as div of a solenoidal field.
    if (std::abs(mean) > tol_.compat * r0 + tol_.abs) throw IncompatibleRhs(mean, r0);

    CellField b = rhs;
    b.subtract_mean();
    const double target = tol_.abs + tol_.rel * mac::norm_l2(b);

    CellField phi(grid_);
    if (backend_ == Backend::Direct) {
        phi = poisson_direct(b);
        rep.iterations = 1;
    } else {
        phi = poisson_cg(b, rep);
    }
    phi.subtract_mean();
    CellField r = b;
    r -= neumann_apply(phi);
    rep.residual_l2 = mac::norm_l2(r);
    rep.converged = rep.residual_l2 <= target;
    if (!rep.converged) {
        std::ostringstream os;
        os << "Neumann Poisson solve did not converge: residual " << rep.residual_l2 << " > " << target
           << " after " << rep.iterations << " iterations";
        throw SolveFailure(os.str(), rep);
    }
    return {std::move(phi), rep};
}

VelocityField EllipticSolver::helmholtz_direct(const VelocityField& rhs, double alpha, double nu) const {
    const Grid& g = grid_;
    const int nx = g.nx;
    const int ny = g.ny;
    VelocityField w(g);

    // u block: (ny) x (nx-1)
    {
        const int nf = nx - 1;
        std::vector<double> buf(static_cast<std::size_t>(ny) * nf);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) buf[static_cast<std::size_t>(j) * nf + (i - 1)] = rhs.u(i, j);
        plans_->u_fwd.run(buf);
        const double norm = 1.0 / (2.0 * ny * 2.0 * nx);
        for (int ky = 0; ky < ny; ++ky) {
            const double ly = stencil_eigenvalue(ky + 1, ny, g.hy);
            for (int kx = 0; kx < nf; ++kx) {
                const double lx = stencil_eigenvalue(kx + 1, nx, g.hx);
                buf[static_cast<std::size_t>(ky) * nf + kx] *= norm / (alpha + nu * (lx + ly));
            }
        }
        plans_->u_inv.run(buf);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) w.u(i, j) = buf[static_cast<std::size_t>(j) * nf + (i - 1)];
    }
    // v block: (ny-1) x (nx)
    {
        const int ns = ny - 1;
        std::vector<double> buf(static_cast<std::size_t>(ns) * nx);
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) buf[static_cast<std::size_t>(j - 1) * nx + i] = rhs.v(i, j);
        plans_->v_fwd.run(buf);
        const double norm = 1.0 / (2.0 * ny * 2.0 * nx);
        for (int ky = 0; ky < ns; ++ky) {
            const double ly = stencil_eigenvalue(ky + 1, ny, g.hy);
            for (int kx = 0; kx < nx; ++kx) {
                const double lx = stencil_eigenvalue(kx + 1, nx, g.hx);
                buf[static_cast<std::size_t>(ky) * nx + kx] *= norm / (alpha + nu * (lx + ly));
            }
        }
        plans_->v_inv.run(buf);
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) w.v(i, j) = buf[static_cast<std::size_t>(j - 1) * nx + i];
    }
    return w;
}

CellField EllipticSolver::poisson_direct(const CellField& rhs) const {
    const Grid& g = grid_;
    std::vector<double> buf = rhs.values();
    plans_->c_fwd.run(buf);
    const double norm = 1.0 / (4.0 * g.nx * g.ny);
    for (int ky = 0; ky < g.ny; ++ky) {
        const double ly = stencil_eigenvalue(ky, g.ny, g.hy);
        for (int kx = 0; kx < g.nx; ++kx) {
            const double lx = stencil_eigenvalue(kx, g.nx, g.hx);
            double& c = buf[static_cast<std::size_t>(ky) * g.nx + kx];
            c = (kx == 0 && ky == 0) ? 0.0 : c * norm / (lx + ly);
        }
    }
    plans_->c_inv.run(buf);
    CellField phi(g);
    phi.values() = std::move(buf);
    return phi;
}

VelocityField EllipticSolver::helmholtz_cg(const VelocityField& rhs, double alpha, double nu,
                                           SolveReport& rep) const {
    const Grid& g = grid_;
    const double ax = nu / (g.hx * g.hx);
    const double ay = nu / (g.hy * g.hy);
    // Ghost reflection adds one extra ay (ax) on rows (columns) next to a tangential wall.
    auto precond = [&](const VelocityField& r) {
        VelocityField z(g);
        for (int j = 0; j < g.ny; ++j) {
            const double d = alpha + 2.0 * ax + 2.0 * ay + ((j == 0 || j == g.ny - 1) ? ay : 0.0);
            for (int i = 1; i < g.nx; ++i) z.u(i, j) = r.u(i, j) / d;
        }
        for (int j = 1; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double d = alpha + 2.0 * ax + 2.0 * ay + ((i == 0 || i == g.nx - 1) ? ax : 0.0);
                z.v(i, j) = r.v(i, j) / d;
            }
        }
        return z;
    };
    VelocityField x(g);
    const double target = tol_.abs + tol_.rel * mac::norm_l2(rhs);
    rep = pcg(
        x, rhs, [&](const VelocityField& w) { return helmholtz_apply(w, alpha, nu); }, precond,
        [](VelocityField& f) { f.enforce_no_penetration(); }, target, iteration_cap(g.u_count() + g.v_count()));
    return x;
}

CellField EllipticSolver::poisson_cg(const CellField& rhs, SolveReport& rep) const {
    const Grid& g = grid_;
    const double ax = 1.0 / (g.hx * g.hx);
    const double ay = 1.0 / (g.hy * g.hy);
    auto precond = [&](const CellField& r) {
        CellField z(g);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const int xn = (i > 0) + (i < g.nx - 1);
                const int yn = (j > 0) + (j < g.ny - 1);
                z(i, j) = r(i, j) / (xn * ax + yn * ay);
            }
        }
        return z;
    };
    CellField x(g);
    const double target = tol_.abs + tol_.rel * mac::norm_l2(rhs);
    rep = pcg(x, rhs, neumann_apply, precond, [](CellField& f) { f.subtract_mean(); }, target,
              iteration_cap(g.cell_count()));
    return x;
}

} // namespace savns
