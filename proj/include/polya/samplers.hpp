// SPDX-License-Identifier: Apache-2.0
//
// Samplers for Poisson processes, Gamma random measures, Polya sum processes
// (an exact cluster construction and the Cox construction), posterior random
// measures and doubly stochastic mixtures. Every sampler is a deterministic
// function of its inputs and the generator state.
#pragma once

#include "polya/random.hpp"
#include "polya/state_space.hpp"

#include <cstdint>
#include <vector>

namespace polya {

/// (z, rho) with z in [0,1) and the companion rate a = (1 - z)/z.
class PolyaParams {
public:
    PolyaParams(double z, ReferenceMeasure rho);

    double z() const noexcept { return z_; }
    /// (1 - z)/z; +infinity when z == 0.
    double a() const noexcept { return a_; }
    const ReferenceMeasure& rho() const noexcept { return rho_; }

private:
    double z_;
    double a_;
    ReferenceMeasure rho_;
};

struct MixtureComponent {
    double z = 0.0;
    double w = 0.0;
    double p = 0.0;
};

/// Discrete prior V over (z, w) pairs; component i directs Poy_{z_i, w_i rho_0}.
class MixingMeasure {
public:
    MixingMeasure(std::vector<MixtureComponent> components, ReferenceMeasure base);

    const std::vector<MixtureComponent>& components() const noexcept { return components_; }
    const ReferenceMeasure& base() const noexcept { return base_; }
    /// Each component is either (0,0) or has z in (0,1), w > 0.
    bool is_identifiable_family() const;
    std::size_t draw_component(Rng& rng) const;

private:
    std::vector<MixtureComponent> components_;
    std::vector<double> cumulative_;
    ReferenceMeasure base_;
};

enum class PolyaRoute { direct, cox };

/// Poisson process with the given intensity. Diffuse cell mass yields points
/// uniform in the cell (on a discrete site they pile up into a multiplicity);
/// an atom (x, w) yields a Poisson(w) multiplicity at x.
PointConfiguration sample_poisson(const ReferenceMeasure& intensity, Rng& rng);
PointConfiguration sample_poisson(const AtomicMeasure& intensity, Rng& rng);

/// Truncated inverse-Levy (Ferguson-Klass) draw of GP_{z,rho}. Jumps
/// r_1 > r_2 > ... solve m E1(a r_k) = Gamma_k for unit-rate arrival times
/// Gamma_k, with m = rho(window); generation stops once the expected mass of
/// the remaining jumps, (m/a)(1 - e^{-a r_K}), falls below eps, and that
/// expected mass is added as one more atom. Locations follow rho/m.
AtomicMeasure sample_gamma_measure(const PolyaParams& params, double eps, Rng& rng);

/// Exact draw of Poy_{z,rho}: Poisson(-log(1-z) m) cluster centres i.i.d.
/// from rho/m, each carrying an independent log-series(z) multiplicity.
PointConfiguration sample_polya_direct(const PolyaParams& params, Rng& rng);

/// Cox route: kappa ~ GP_{z,rho} (truncated at eps), then Poi_kappa.
PointConfiguration sample_polya_cox(const PolyaParams& params, double eps, Rng& rng);

PointConfiguration sample_polya(const PolyaParams& params, PolyaRoute route, double eps, Rng& rng);

/// Draw from the posterior GP_{z', rho + mu}, z' = z/(1+z), assembled as an
/// independent GP_{z', rho} part plus a Gamma(k, a + 1) weight at every
/// observed point (x, k).
AtomicMeasure sample_posterior(const PointConfiguration& mu, const PolyaParams& params, double eps, Rng& rng);

struct MixedSample {
    PointConfiguration config;
    std::size_t component = 0;
    double z = 0.0;
    double w = 0.0;
};

/// Poy_V: pick component i with probability p_i, then sample
/// Poy_{z_i, w_i rho_0} by `route`.
MixedSample sample_mixed(const MixingMeasure& v, PolyaRoute route, double eps, Rng& rng);

/// Log-series(z) variate (Kemp's algorithm).
std::uint64_t sample_logseries(double z, Rng& rng);

} // namespace polya
