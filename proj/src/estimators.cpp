// SPDX-License-Identifier: Apache-2.0
#include "polya/estimators.hpp"

#include "polya/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace polya {

namespace {

double require_mass(const ReferenceMeasure& rho0, const PointConfiguration& mu, const CellSet& cells) {
    require_same_window(rho0.window(), mu.window());
    const double m = rho0.mass(cells);
    if (!(m > 0.0)) {
        throw ParameterError("density statistics need a cell set of positive reference mass");
    }
    return m;
}

double forward_residual(double z, double w, double u, double v) {
    if (z == 0.0) {
        return std::max(std::fabs(u), std::fabs(v));
    }
    const double ru = w * z / (1.0 - z) - u;
    const double rv = -w * std::log1p(-z) - v;
    return std::max(std::fabs(ru), std::fabs(rv));
}

[[noreturn]] void infeasible(double u, double v) {
    const double ratio = v > 0.0 ? u / v : std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "density statistics outside the model: u = " << u << ", v = " << v << ", u/v = " << ratio
        << " (need u > v > 0 or u = v = 0)";
    throw InfeasibleStatistics(msg.str(), ratio);
}

} // namespace

double stat_U(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells) {
    const double m = require_mass(rho0, mu, cells);
    return static_cast<double>(count(mu, cells)) / m;
}

double stat_V(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells) {
    const double m = require_mass(rho0, mu, cells);
    return static_cast<double>(distinct_count(mu, cells)) / m;
}

DensityStats density_stats(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells) {
    const double m = require_mass(rho0, mu, cells);
    return {static_cast<double>(count(mu, cells)) / m, static_cast<double>(distinct_count(mu, cells)) / m, m};
}

double multiplicity_ratio(double z) {
    if (!(z > 0.0 && z < 1.0)) {
        throw ParameterError("multiplicity_ratio: z must lie in (0,1)");
    }
    return z / ((1.0 - z) * -std::log1p(-z));
}

ZWEstimate solve_zw(double u, double v, const ZWConstraint& constraint) {
    if (!(u >= 0.0) || !(v >= 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
        throw ParameterError("solve_zw: u and v must be nonnegative and finite");
    }
    if (constraint.fixed_z && constraint.fixed_w) {
        throw ParameterError("solve_zw: at most one of z and w may be fixed");
    }
    if (u == 0.0 && v == 0.0) {
        return {0.0, 0.0, true, 0.0};
    }

    if (constraint.fixed_z) {
        const double z = *constraint.fixed_z;
        if (!(z > 0.0 && z < 1.0)) {
            throw ParameterError("solve_zw: fixed z must lie in (0,1)");
        }
        if (v == 0.0) {
            infeasible(u, v);
        }
        const double w = v / -std::log1p(-z);
        return {z, w, true, forward_residual(z, w, u, v)};
    }
    if (constraint.fixed_w) {
        const double w = *constraint.fixed_w;
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ParameterError("solve_zw: fixed w must be positive and finite");
        }
        if (u == 0.0) {
            infeasible(u, v);
        }
        const double z = u / (u + w);
        return {z, w, true, forward_residual(z, w, u, v)};
    }

    if (v == 0.0 || u <= v) {
        infeasible(u, v);
    }
    const double target = u / v;
    double lo = 0.0;
    double hi = 1.0;
    int iterations = 0;
    while (hi - lo > 1e-15 && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (multiplicity_ratio(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iterations;
    }
    const double z = 0.5 * (lo + hi);
    const double w = v / -std::log1p(-z);
    return {z, w, hi - lo <= 1e-12, forward_residual(z, w, u, v)};
}

ReferenceMeasure papangelou_kernel(const PointConfiguration& mu, const ReferenceMeasure& rho0, double z, double w) {
    require_same_window(rho0.window(), mu.window());
    if (!(z >= 0.0 && z < 1.0) || !(w >= 0.0) || !std::isfinite(w)) {
        throw ParameterError("papangelou_kernel: need z in [0,1) and finite w >= 0");
    }
    if (z == 0.0) {
        return ReferenceMeasure::zero(rho0.window());
    }
    return superpose(rho0.scaled(w), mu).scaled(z);
}

ReferenceMeasure papangelou_kernel(const PointConfiguration& mu, const ReferenceMeasure& rho0, const CellSet& cells,
                                   const ZWConstraint& constraint) {
    const auto stats = density_stats(mu, rho0, cells);
    const auto est = solve_zw(stats.u, stats.v, constraint);
    return papangelou_kernel(mu, rho0, est.z_hat, est.w_hat);
}

} // namespace polya
