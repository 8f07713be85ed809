// SPDX-License-Identifier: Apache-2.0
//
// Parameter recovery for doubly stochastic Polya sum processes. A single
// large configuration determines (z, w) through the densities of points
// with multiplicity (u) and without (v) per unit rho_0-mass:
//
//     w z / (1 - z) = u,      -w log(1 - z) = v.
#pragma once

#include "polya/state_space.hpp"

#include <optional>

namespace polya {

struct DensityStats {
    double u = 0.0;
    double v = 0.0;
    double window_mass = 0.0;
};

struct ZWEstimate {
    double z_hat = 0.0;
    double w_hat = 0.0;
    bool converged = false;
    /// Largest absolute residual of the two forward equations.
    double residual = 0.0;
};

/// Optional knowledge of one coordinate; with z fixed only v is used
/// (w = v / -log(1-z)), with w fixed only u is used (z = u / (u + w)).
struct ZWConstraint {
    std::optional<double> fixed_z;
    std::optional<double> fixed_w;
};

/// count(mu, B) / rho0(B).
double stat_U(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells);
/// distinct_count(mu, B) / rho0(B).
double stat_V(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells);
DensityStats density_stats(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells);

/// R(z) = [z/(1-z)] / [-log(1-z)], the ratio u/v as a function of z.
double multiplicity_ratio(double z);

/// Solves the density equations for (z, w). (0, 0) maps to (0, 0); otherwise
/// u > v > 0 is required and R(z) = u/v is solved by bisection on (0, 1).
/// Throws InfeasibleStatistics when (u, v) lies outside the model.
ZWEstimate solve_zw(double u, double v, const ZWConstraint& constraint = {});

/// Plug-in kernel z_hat (w_hat rho0 + mu), with (z_hat, w_hat) estimated from
/// mu restricted to `cells`. Doubles as the Bayes estimator of the directing
/// intensity under a mixture prior.
ReferenceMeasure papangelou_kernel(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells,
                                   const ZWConstraint& constraint = {});
/// z (w rho0 + mu) for given (z, w).
ReferenceMeasure papangelou_kernel(const PointConfiguration& mu, const ReferenceMeasure& rho0, double z, double w);

} // namespace polya
