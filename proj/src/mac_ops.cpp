#include "savns/mac_ops.hpp"

#include <algorithm>
#include <cmath>

namespace savns::mac {

namespace {

// Dirichlet-aware reads. Out-of-range tangential indices return the odd
// reflection; boundary-normal edges read as zero.
struct DirichletView {
    const VelocityField& w;
    int nx;
    int ny;

    explicit DirichletView(const VelocityField& f) : w(f), nx(f.grid().nx), ny(f.grid().ny) {}

    double u(int i, int j) const {
        if (i <= 0 || i >= nx) return 0.0;
        if (j < 0) return -w.u(i, 0);
        if (j >= ny) return -w.u(i, ny - 1);
        return w.u(i, j);
    }

    double v(int i, int j) const {
        if (j <= 0 || j >= ny) return 0.0;
        if (i < 0) return -w.v(0, j);
        if (i >= nx) return -w.v(nx - 1, j);
        return w.v(i, j);
    }
};

} // namespace

CellField divergence(const VelocityField& w) {
    const Grid& g = w.grid();
    CellField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out(i, j) = (w.u(i + 1, j) - w.u(i, j)) / g.hx + (w.v(i, j + 1) - w.v(i, j)) / g.hy;
        }
    }
    return out;
}

VelocityField gradient(const CellField& p) {
    const Grid& g = p.grid();
    VelocityField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            out.u(i, j) = (p(i, j) - p(i - 1, j)) / g.hx;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out.v(i, j) = (p(i, j) - p(i, j - 1)) / g.hy;
        }
    }
    return out;
}

VelocityField laplacian_dirichlet(const VelocityField& w, double mu) {
    const Grid& g = w.grid();
    const DirichletView d(w);
    const double ax = mu / (g.hx * g.hx);
    const double ay = mu / (g.hy * g.hy);
    VelocityField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double c = d.u(i, j);
            out.u(i, j) = ax * (d.u(i + 1, j) - 2.0 * c + d.u(i - 1, j)) +
                          ay * (d.u(i, j + 1) - 2.0 * c + d.u(i, j - 1));
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = d.v(i, j);
            out.v(i, j) = ax * (d.v(i + 1, j) - 2.0 * c + d.v(i - 1, j)) +
                          ay * (d.v(i, j + 1) - 2.0 * c + d.v(i, j - 1));
        }
    }
    return out;
}

VelocityField convect(const VelocityField& a, const VelocityField& b) {
    require_same_grid(a.grid(), b.grid(), "convect");
    const Grid& g = a.grid();
    const DirichletView db(b);
    VelocityField out(g);

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double au = a.u(i, j);
            const double av = 0.25 * (a.v(i - 1, j) + a.v(i, j) + a.v(i - 1, j + 1) + a.v(i, j + 1));
            const double dx = (db.u(i + 1, j) - db.u(i - 1, j)) / (2.0 * g.hx);
            const double dy = (db.u(i, j + 1) - db.u(i, j - 1)) / (2.0 * g.hy);
            out.u(i, j) = au * dx + av * dy;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double au = 0.25 * (a.u(i, j - 1) + a.u(i + 1, j - 1) + a.u(i, j) + a.u(i + 1, j));
            const double av = a.v(i, j);
            const double dx = (db.v(i + 1, j) - db.v(i - 1, j)) / (2.0 * g.hx);
            const double dy = (db.v(i, j + 1) - db.v(i, j - 1)) / (2.0 * g.hy);
            out.v(i, j) = au * dx + av * dy;
        }
    }
    return out;
}

double inner(const VelocityField& a, const VelocityField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    const Grid& g = a.grid();
    double su = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        su += 0.5 * (a.u(0, j) * b.u(0, j) + a.u(g.nx, j) * b.u(g.nx, j));
        for (int i = 1; i < g.nx; ++i) su += a.u(i, j) * b.u(i, j);
    }
    double sv = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        sv += 0.5 * (a.v(i, 0) * b.v(i, 0) + a.v(i, g.ny) * b.v(i, g.ny));
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) sv += a.v(i, j) * b.v(i, j);
    }
    return g.cell_area() * (su + sv);
}

double inner_cell(const CellField& p, const CellField& q) {
    require_same_grid(p.grid(), q.grid(), "inner_cell");
    double s = 0.0;
    const auto& pv = p.values();
    const auto& qv = q.values();
    for (std::size_t k = 0; k < pv.size(); ++k) s += pv[k] * qv[k];
    return p.grid().cell_area() * s;
}

double norm_l2(const VelocityField& w) { return std::sqrt(inner(w, w)); }
double norm_l2(const CellField& p) { return std::sqrt(inner_cell(p, p)); }

double norm_h1_semi(const VelocityField& w) {
    // The Laplacian ignores boundary-normal values, so pair it with the
    // pinned field to keep the quadratic form exact.
    VelocityField pinned = w;
    pinned.enforce_no_penetration();
    return std::sqrt(std::max(0.0, -inner(laplacian_dirichlet(pinned), pinned)));
}

CellField laplacian_neumann(const CellField& p) { return divergence(gradient(p)); }

} // namespace savns::mac
