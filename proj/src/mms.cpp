#include "savns/mms.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace savns::mms {

namespace {

constexpr double pi = std::numbers::pi;

// Example 2 building blocks: A(s) = s^2 (s-1)^2, B(s) = s (s-1)(2s-1) = A'(s)/2.
double poly_a(double s) { return s * s * (s - 1.0) * (s - 1.0); }
double poly_a2(double s) { return 2.0 * (6.0 * s * s - 6.0 * s + 1.0); }
double poly_b(double s) { return s * (s - 1.0) * (2.0 * s - 1.0); }
double poly_b1(double s) { return 6.0 * s * s - 6.0 * s + 1.0; }
double poly_b2(double s) { return 12.0 * s - 6.0; }

ExactValues exact1(double x, double y, double t) {
    const double st = std::sin(t);
    const double sx = std::sin(pi * x);
    const double sy = std::sin(pi * y);
    return {st * sx * sx * std::sin(2.0 * pi * y), -st * std::sin(2.0 * pi * x) * sy * sy,
            st * (sy - 2.0 / pi)};
}

ForceValues forcing1(double x, double y, double t, double nu) {
    const double st = std::sin(t);
    const double ct = std::cos(t);
    const double sx = std::sin(pi * x);
    const double sy = std::sin(pi * y);
    const double s2x = std::sin(2.0 * pi * x);
    const double s2y = std::sin(2.0 * pi * y);
    const double c2x = std::cos(2.0 * pi * x);
    const double c2y = std::cos(2.0 * pi * y);

    const double u1 = st * sx * sx * s2y;
    const double u2 = -st * s2x * sy * sy;

    const double u1_t = ct * sx * sx * s2y;
    const double u1_x = st * pi * s2x * s2y;
    const double u1_y = st * sx * sx * 2.0 * pi * c2y;
    const double u1_xx = st * 2.0 * pi * pi * c2x * s2y;
    const double u1_yy = -st * sx * sx * 4.0 * pi * pi * s2y;

    const double u2_t = -ct * s2x * sy * sy;
    const double u2_x = -st * 2.0 * pi * c2x * sy * sy;
    const double u2_y = -st * s2x * pi * s2y;
    const double u2_xx = st * 4.0 * pi * pi * s2x * sy * sy;
    const double u2_yy = -st * s2x * 2.0 * pi * pi * c2y;

    const double p_x = 0.0;
    const double p_y = st * pi * std::cos(pi * y);

    return {u1_t + u1 * u1_x + u2 * u1_y - nu * (u1_xx + u1_yy) + p_x,
            u2_t + u1 * u2_x + u2 * u2_y - nu * (u2_xx + u2_yy) + p_y};
}

ExactValues exact2(double x, double y, double t) {
    const double tt = t * t;
    return {-128.0 * tt * poly_a(x) * poly_b(y), 128.0 * tt * poly_a(y) * poly_b(x), tt * (x - 0.5)};
}

ForceValues forcing2(double x, double y, double t, double nu) {
    const double tt = t * t;
    const double k = 128.0 * tt;

    const double u1 = -k * poly_a(x) * poly_b(y);
    const double u2 = k * poly_a(y) * poly_b(x);

    const double u1_t = -256.0 * t * poly_a(x) * poly_b(y);
    const double u1_x = -k * 2.0 * poly_b(x) * poly_b(y);
    const double u1_y = -k * poly_a(x) * poly_b1(y);
    const double u1_xx = -k * poly_a2(x) * poly_b(y);
    const double u1_yy = -k * poly_a(x) * poly_b2(y);

    const double u2_t = 256.0 * t * poly_a(y) * poly_b(x);
    const double u2_x = k * poly_a(y) * poly_b1(x);
    const double u2_y = k * 2.0 * poly_b(y) * poly_b(x);
    const double u2_xx = k * poly_a(y) * poly_b2(x);
    const double u2_yy = k * poly_a2(y) * poly_b(x);

    const double p_x = tt;
    const double p_y = 0.0;

    return {u1_t + u1 * u1_x + u2 * u1_y - nu * (u1_xx + u1_yy) + p_x,
            u2_t + u1 * u2_x + u2 * u2_y - nu * (u2_xx + u2_yy) + p_y};
}

} // namespace

CaseId parse_case(const std::string& name) {
    if (name == "1" || name == "example1") return CaseId::Example1;
    if (name == "2" || name == "example2") return CaseId::Example2;
    throw std::invalid_argument("unknown manufactured case '" + name + "'");
}

std::string to_string(CaseId id) { return id == CaseId::Example1 ? "1" : "2"; }

ExactValues ManufacturedCase::exact(double x, double y, double t) const {
    return id == CaseId::Example1 ? exact1(x, y, t) : exact2(x, y, t);
}

ForceValues ManufacturedCase::forcing(double x, double y, double t) const {
    return id == CaseId::Example1 ? forcing1(x, y, t, nu) : forcing2(x, y, t, nu);
}

SampledFields sample_on_grid(const ManufacturedCase& mc, const Grid& grid, double t) {
    SampledFields out{VelocityField(grid), CellField(grid)};
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) out.u.u(i, j) = mc.exact(grid.xe(i), grid.yc(j), t).u1;
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) out.u.v(i, j) = mc.exact(grid.xc(i), grid.ye(j), t).u2;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) out.p(i, j) = mc.exact(grid.xc(i), grid.yc(j), t).p;
    out.p.subtract_mean();
    return out;
}

VelocityField sample_forcing(const ManufacturedCase& mc, const Grid& grid, double t) {
    VelocityField f(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) f.u(i, j) = mc.forcing(grid.xe(i), grid.yc(j), t).f1;
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) f.v(i, j) = mc.forcing(grid.xc(i), grid.ye(j), t).f2;
    return f;
}

Forcing forcing_for(const ManufacturedCase& mc) {
    return [mc](const Grid& grid, double t) { return sample_forcing(mc, grid, t); };
}

VelocityField random_solenoidal(const Grid& grid, std::uint64_t seed, int modes, double amplitude) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> coef(static_cast<std::size_t>(modes) * modes);
    for (int l = 1; l <= modes; ++l)
        for (int k = 1; k <= modes; ++k)
            coef[static_cast<std::size_t>(l - 1) * modes + (k - 1)] = normal(rng) / (k * k + l * l);

    const double lx = grid.x1 - grid.x0;
    const double ly = grid.y1 - grid.y0;
    // psi at nodes (i hx, j hy), i = 0..nx, j = 0..ny; zero on the walls.
    const int nxn = grid.nx + 1;
    std::vector<double> psi(static_cast<std::size_t>(nxn) * (grid.ny + 1), 0.0);
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            if (i == 0 || j == 0 || i == grid.nx || j == grid.ny) continue;
            const double xs = (grid.xe(i) - grid.x0) / lx;
            const double ys = (grid.ye(j) - grid.y0) / ly;
            double s = 0.0;
            for (int l = 1; l <= modes; ++l)
                for (int k = 1; k <= modes; ++k)
                    s += coef[static_cast<std::size_t>(l - 1) * modes + (k - 1)] * std::sin(k * pi * xs) *
                         std::sin(l * pi * ys);
            psi[static_cast<std::size_t>(j) * nxn + i] = s;
        }
    }
    auto node = [&](int i, int j) { return psi[static_cast<std::size_t>(j) * nxn + i]; };

    VelocityField w(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) w.u(i, j) = (node(i, j + 1) - node(i, j)) / grid.hy;
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) w.v(i, j) = -(node(i + 1, j) - node(i, j)) / grid.hx;

    const double m = w.max_abs();
    if (m > 0.0) w *= amplitude / m;
    return w;
}

} // namespace savns::mms
