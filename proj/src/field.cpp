#include "savns/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace savns {

Grid::Grid(int nx_, int ny_, double x0_, double y0_, double x1_, double y1_)
    : nx(nx_), ny(ny_), x0(x0_), y0(y0_), x1(x1_), y1(y1_) {
    if (nx < 2 || ny < 2) {
        throw ContractViolation("Grid: need at least 2 cells per axis, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
    }
    if (!(x1 > x0) || !(y1 > y0)) {
        throw ContractViolation("Grid: empty domain");
    }
    hx = (x1 - x0) / nx;
    hy = (y1 - y0) / ny;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        throw ContractViolation(std::string(where) + ": fields live on different grids");
    }
}

namespace {

double max_abs_of(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

bool finite_all(const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

void add_scaled(std::vector<double>& dst, double s, const std::vector<double>& src) {
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += s * src[k];
}

} // namespace

CellField::CellField(const Grid& grid, double fill) : grid_(grid), values_(grid.cell_count(), fill) {}

double CellField::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

void CellField::subtract_mean() {
    const double m = mean();
    for (double& x : values_) x -= m;
}

double CellField::max_abs() const { return max_abs_of(values_); }
bool CellField::all_finite() const { return finite_all(values_); }

CellField& CellField::operator+=(const CellField& other) { return axpy(1.0, other); }
CellField& CellField::operator-=(const CellField& other) { return axpy(-1.0, other); }

CellField& CellField::operator*=(double s) {
    for (double& x : values_) x *= s;
    return *this;
}

CellField& CellField::axpy(double s, const CellField& other) {
    require_same_grid(grid_, other.grid_, "CellField::axpy");
    add_scaled(values_, s, other.values_);
    return *this;
}

VelocityField::VelocityField(const Grid& grid, double fill_u, double fill_v)
    : grid_(grid), u_(grid.u_count(), fill_u), v_(grid.v_count(), fill_v) {}

void VelocityField::enforce_no_penetration() {
    for (int j = 0; j < grid_.ny; ++j) {
        u(0, j) = 0.0;
        u(grid_.nx, j) = 0.0;
    }
    for (int i = 0; i < grid_.nx; ++i) {
        v(i, 0) = 0.0;
        v(i, grid_.ny) = 0.0;
    }
}

double VelocityField::boundary_normal_max() const {
    double m = 0.0;
    for (int j = 0; j < grid_.ny; ++j) {
        m = std::max({m, std::abs(u(0, j)), std::abs(u(grid_.nx, j))});
    }
    for (int i = 0; i < grid_.nx; ++i) {
        m = std::max({m, std::abs(v(i, 0)), std::abs(v(i, grid_.ny))});
    }
    return m;
}

double VelocityField::max_abs() const { return std::max(max_abs_of(u_), max_abs_of(v_)); }
bool VelocityField::all_finite() const { return finite_all(u_) && finite_all(v_); }

VelocityField& VelocityField::operator+=(const VelocityField& other) { return axpy(1.0, other); }
VelocityField& VelocityField::operator-=(const VelocityField& other) { return axpy(-1.0, other); }

VelocityField& VelocityField::operator*=(double s) {
    for (double& x : u_) x *= s;
    for (double& x : v_) x *= s;
    return *this;
}

VelocityField& VelocityField::axpy(double s, const VelocityField& other) {
    require_same_grid(grid_, other.grid_, "VelocityField::axpy");
    add_scaled(u_, s, other.u_);
    add_scaled(v_, s, other.v_);
    return *this;
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }
VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double s, VelocityField a) { return a *= s; }

} // namespace savns
