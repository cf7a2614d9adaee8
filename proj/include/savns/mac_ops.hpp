#pragma once

#include "savns/field.hpp"

/// Discrete differential operators and quadratures on the MAC grid.
///
/// Boundary conventions shared by every operator here:
///  - boundary-normal edges carry homogeneous Dirichlet data and are treated
///    as zero whatever the stored value;
///  - tangential velocity across a wall uses the odd ghost reflection
///    (ghost = -interior), so the wall value is zero to second order;
///  - pressure gradients across the wall vanish (homogeneous Neumann).
namespace savns::mac {

/// (u(i+1,j)-u(i,j))/hx + (v(i,j+1)-v(i,j))/hy at every cell center.
CellField divergence(const VelocityField& w);

/// Centered differences onto interior edges; boundary-normal edges get 0.
VelocityField gradient(const CellField& p);

/// mu * 5-point Laplacian at interior velocity points, 0 on boundary-normal edges.
VelocityField laplacian_dirichlet(const VelocityField& w, double mu = 1.0);

/// Advective form (a . grad) b at velocity points.
///
/// The transverse advecting component is the 4-point average of the nearest
/// samples of `a`; derivatives of `b` are centered, with wall values taken
/// from the Dirichlet data.
VelocityField convect(const VelocityField& a, const VelocityField& b);

/// Weighted L2 pairing. Boundary-normal edges carry half weight so that
/// constants integrate exactly.
double inner(const VelocityField& a, const VelocityField& b);
double inner_cell(const CellField& p, const CellField& q);

double norm_l2(const VelocityField& w);
double norm_l2(const CellField& p);

/// sqrt(-(laplacian_dirichlet(w), w)).
double norm_h1_semi(const VelocityField& w);

/// 5-point Neumann Laplacian at centers, equal to divergence(gradient(p)).
CellField laplacian_neumann(const CellField& p);

} // namespace savns::mac
