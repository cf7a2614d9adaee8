#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "savns/field.hpp"
#include "savns/schemes.hpp"

namespace savns::mms {

enum class CaseId { Example1, Example2 };

CaseId parse_case(const std::string& name);
std::string to_string(CaseId id);

struct ExactValues {
    double u1 = 0.0;
    double u2 = 0.0;
    double p = 0.0;
};

struct ForceValues {
    double f1 = 0.0;
    double f2 = 0.0;
};

/**
 * Closed-form divergence-free flow on the unit square with zero velocity on
 * the boundary and zero-mean pressure.
 *
 * Example 1:
 *   u1 =  sin t sin^2(pi x) sin(2 pi y)
 *   u2 = -sin t sin(2 pi x) sin^2(pi y)
 *   p  =  sin t (sin(pi y) - 2/pi)
 *
 * Example 2:
 *   u1 = -128 t^2 x^2 (x-1)^2 y (y-1)(2y-1)
 *   u2 =  128 t^2 y^2 (y-1)^2 x (x-1)(2x-1)
 *   p  =  t^2 (x - 1/2)
 */
struct ManufacturedCase {
    CaseId id = CaseId::Example1;
    double nu = 0.1;

    ExactValues exact(double x, double y, double t) const;
    /// f = u_t + (u.grad)u - nu Lap u + grad p, from hand-derived partials.
    ForceValues forcing(double x, double y, double t) const;
};

struct SampledFields {
    VelocityField u;
    /// Cell-center pressure with its discrete mean removed.
    CellField p;
};

SampledFields sample_on_grid(const ManufacturedCase& mc, const Grid& grid, double t);

/// Forcing sampled at u-points (first component) and v-points (second).
VelocityField sample_forcing(const ManufacturedCase& mc, const Grid& grid, double t);

Forcing forcing_for(const ManufacturedCase& mc);

/**
 * Smooth random divergence-free velocity with zero normal flux.
 *
 * Built from a node stream function psi = sum c_kl sin(k pi x) sin(l pi y)
 * (k,l <= modes) that vanishes on the walls; u = d psi/dy and v = -d psi/dx
 * as edge differences, so the discrete divergence is zero to rounding.
 * The result is scaled to max |velocity| = amplitude.
 */
VelocityField random_solenoidal(const Grid& grid, std::uint64_t seed, int modes = 4, double amplitude = 1.0);

} // namespace savns::mms
