#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace savns {

/// Raised when a caller breaks an operation's preconditions (mismatched
/// grids, missing history, invalid sizes).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/**
 * Uniform staggered (MAC) grid on the rectangle [x0,x1] x [y0,y1].
 *
 * Cell (i,j) has its center at (x0 + (i+1/2)hx, y0 + (j+1/2)hy). The
 * x-velocity lives on vertical edges (i*hx, (j+1/2)hy), i = 0..nx, and the
 * y-velocity on horizontal edges ((i+1/2)hx, j*hy), j = 0..ny.
 */
struct Grid {
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;
    double hx = 0.0;
    double hy = 0.0;

    Grid() = default;
    Grid(int nx, int ny, double x0, double y0, double x1, double y1);

    static Grid unit_square(int n) { return Grid(n, n, 0.0, 0.0, 1.0, 1.0); }

    double cell_area() const { return hx * hy; }
    double xc(int i) const { return x0 + (i + 0.5) * hx; }
    double yc(int j) const { return y0 + (j + 0.5) * hy; }
    double xe(int i) const { return x0 + i * hx; }
    double ye(int j) const { return y0 + j * hy; }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t u_count() const { return static_cast<std::size_t>(nx + 1) * ny; }
    std::size_t v_count() const { return static_cast<std::size_t>(nx) * (ny + 1); }

    bool operator==(const Grid& other) const = default;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Scalar samples at cell centers; x index fastest.
class CellField {
public:
    CellField() = default;
    explicit CellField(const Grid& grid, double fill = 0.0);

    const Grid& grid() const { return grid_; }

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Plain (unweighted) average over cells.
    double mean() const;
    void subtract_mean();
    double max_abs() const;
    bool all_finite() const;

    CellField& operator+=(const CellField& other);
    CellField& operator-=(const CellField& other);
    CellField& operator*=(double s);
    /// this += s * other
    CellField& axpy(double s, const CellField& other);

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_.nx) * j;
    }

    Grid grid_;
    std::vector<double> values_;
};

/**
 * Edge-centered velocity. u(i,j) for i in [0,nx], j in [0,ny); v(i,j) for
 * i in [0,nx), j in [0,ny]. Columns i = 0,nx of u and rows j = 0,ny of v
 * are the boundary-normal edges.
 */
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(const Grid& grid, double fill_u = 0.0, double fill_v = 0.0);

    const Grid& grid() const { return grid_; }

    double& u(int i, int j) { return u_[uindex(i, j)]; }
    double u(int i, int j) const { return u_[uindex(i, j)]; }
    double& v(int i, int j) { return v_[vindex(i, j)]; }
    double v(int i, int j) const { return v_[vindex(i, j)]; }

    std::vector<double>& u_values() { return u_; }
    const std::vector<double>& u_values() const { return u_; }
    std::vector<double>& v_values() { return v_; }
    const std::vector<double>& v_values() const { return v_; }

    /// Zeroes u on i in {0,nx} and v on j in {0,ny}.
    void enforce_no_penetration();
    /// Largest magnitude found on the boundary-normal edges.
    double boundary_normal_max() const;
    double max_abs() const;
    bool all_finite() const;

    VelocityField& operator+=(const VelocityField& other);
    VelocityField& operator-=(const VelocityField& other);
    VelocityField& operator*=(double s);
    VelocityField& axpy(double s, const VelocityField& other);

private:
    std::size_t uindex(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_.nx + 1) * j;
    }
    std::size_t vindex(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_.nx) * j;
    }

    Grid grid_;
    std::vector<double> u_;
    std::vector<double> v_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);
VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double s, VelocityField a);

} // namespace savns
