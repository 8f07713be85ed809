// SPDX-License-Identifier: Apache-2.0
//
// Closed-form Laplace functionals of the Gamma random measure GP_{z,rho},
// the Polya sum process Poy_{z,rho} and their joint law, plus the count
// distributions they imply. All products are accumulated in log space.
#pragma once

#include "polya/state_space.hpp"
#include "polya/statistics.hpp"

#include <cstdint>
#include <span>

namespace polya {

struct TransformResult {
    double log_value = 0.0;
    double value = 1.0;

    static TransformResult from_log(double log_value);
};

/// E exp(-mu(g)) for mu ~ Poi_rho: exp[-int (1 - e^{-g}) d rho].
TransformResult laplace_poisson(const TestFunction& g, const ReferenceMeasure& rho);

/// E exp(-kappa(h)) for kappa ~ GP_{z,rho}:
///   exp[-int log(1 + z h / (1 - z)) d rho],  z in (0,1).
TransformResult laplace_gp(const TestFunction& h, double z, const ReferenceMeasure& rho);

/// E exp(-mu(g)) for mu ~ Poy_{z,rho}:
///   exp[-int log(1 + z (1 - e^{-g}) / (1 - z)) d rho],  z in [0,1).
TransformResult laplace_polya(const TestFunction& g, double z, const ReferenceMeasure& rho);

/// E exp(-mu(g) - kappa(h)) for kappa ~ GP_{z,rho}, mu ~ Poi_kappa:
///   exp[-int log(1 + z (1 - e^{-g} + h) / (1 - z)) d rho].
TransformResult joint_laplace(const TestFunction& g, const TestFunction& h, double z, const ReferenceMeasure& rho);

/// The same joint transform evaluated through the posterior: the Laplace
/// transform of GP_{z/(1+z), rho + mu} at h, integrated against Poy_{z,rho}.
/// Only the rho part survives the mu-integral in closed form, leaving
///   laplace_gp(h, z/(1+z), rho) * laplace_polya(g + log(1 + z h), z, rho).
TransformResult posterior_route_laplace(const TestFunction& g, const TestFunction& h, double z,
                                        const ReferenceMeasure& rho);

/// Negative binomial pmf: Gamma(m+k)/(Gamma(m) k!) (1-z)^m z^k.
double nb_pmf(std::uint64_t k, double m, double z);

/// Logarithmic series pmf: z^k / (k (-log(1-z))), k >= 1.
double logseries_pmf(std::uint64_t k, double z);
double logseries_mean(double z);

/// Smallest K past which the geometric bound on the remaining pmf mass
/// drops below `tol`; summing k = 0..K (resp. 1..K) is then complete.
std::uint64_t nb_truncation_point(double m, double z, double tol = 1e-15);
std::uint64_t logseries_truncation_point(double z, double tol = 1e-15);

/// Exact C_Poy(f (x) e^{-zeta_g}) = E[mu(f) e^{-mu(g)}]:
///   L_Poy(g) * int z f e^{-g} / (1 - z e^{-g}) d rho.
/// f must be finite.
double polya_campbell_exact(const TestFunction& f, const TestFunction& g, double z, const ReferenceMeasure& rho);

/// Sample mean and standard error of exp(-zeta(., f)).
Estimate empirical_laplace(std::span<const PointConfiguration> samples, const TestFunction& f);
Estimate empirical_laplace(std::span<const AtomicMeasure> samples, const TestFunction& f);

} // namespace polya
