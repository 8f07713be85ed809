// SPDX-License-Identifier: Apache-2.0
//
// Conjugate update for the Gamma-directed Cox model. With prior GP_{z,rho}
// and observation mu, the posterior of the directing measure is
// GP_{z/(1+z), rho + mu}; in the rate parametrisation a = (1-z)/z this is
// a -> a + 1, base rho -> rho + mu.
#pragma once

#include "polya/samplers.hpp"
#include "polya/state_space.hpp"

#include <utility>

namespace polya {

/// Parameters of a Gamma random measure GP_{z_post, base} obtained by
/// conditioning. Stores z_post and a_post side by side and verifies at
/// construction that a_post = (1 - z_post)/z_post to rounding.
class PosteriorSpec {
public:
    PosteriorSpec(double z_post, ReferenceMeasure base, double a_post);

    double z_post() const noexcept { return z_post_; }
    double a_post() const noexcept { return a_post_; }
    const ReferenceMeasure& base() const noexcept { return base_; }

    /// The posterior read as the prior for the next observation.
    PolyaParams as_prior() const { return PolyaParams(z_post_, base_); }

private:
    double z_post_;
    ReferenceMeasure base_;
    double a_post_;
};

/// (z/(1+z), rho + mu, a + 1).
PosteriorSpec posterior_params(double z, const ReferenceMeasure& rho, const PointConfiguration& mu);
PosteriorSpec posterior_params(const PosteriorSpec& prior, const PointConfiguration& mu);

/// b(mu) = z (rho + mu).
ReferenceMeasure bayes_estimator(double z, const ReferenceMeasure& rho, const PointConfiguration& mu);

/// First-moment measure of GP_{z_post, base}: (z_post / (1 - z_post)) base.
ReferenceMeasure posterior_intensity(const PosteriorSpec& spec);

/// Splits GP_{z', rho + mu} into the independent GP_{z', rho} and
/// GP_{z', mu} parts. Fails unless every observed point sits on a base atom
/// of weight at least its multiplicity.
std::pair<PosteriorSpec, PosteriorSpec> convolution_split(const PosteriorSpec& spec, const PointConfiguration& mu);

} // namespace polya
