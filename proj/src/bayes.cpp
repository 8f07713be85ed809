// SPDX-License-Identifier: Apache-2.0
#include "polya/bayes.hpp"

#include "polya/errors.hpp"

#include <algorithm>
#include <cmath>

namespace polya {

namespace {

void require_open_unit(double z, const char* what) {
    if (!(z > 0.0 && z < 1.0)) {
        throw ParameterError(std::string(what) + ": z must lie in (0,1)");
    }
}

} // namespace

PosteriorSpec::PosteriorSpec(double z_post, ReferenceMeasure base, double a_post)
    : z_post_(z_post), base_(std::move(base)), a_post_(a_post) {
    require_open_unit(z_post, "posterior");
    const double implied = (1.0 - z_post) / z_post;
    if (!(std::fabs(implied - a_post) <= 1e-12 * std::max(1.0, a_post))) {
        throw ParameterError("posterior: a_post does not match (1 - z_post)/z_post");
    }
}

PosteriorSpec posterior_params(double z, const ReferenceMeasure& rho, const PointConfiguration& mu) {
    require_open_unit(z, "posterior_params");
    const double a = (1.0 - z) / z;
    return PosteriorSpec(z / (1.0 + z), superpose(rho, mu), a + 1.0);
}

PosteriorSpec posterior_params(const PosteriorSpec& prior, const PointConfiguration& mu) {
    const double z = prior.z_post();
    return PosteriorSpec(z / (1.0 + z), superpose(prior.base(), mu), prior.a_post() + 1.0);
}

ReferenceMeasure bayes_estimator(double z, const ReferenceMeasure& rho, const PointConfiguration& mu) {
    require_open_unit(z, "bayes_estimator");
    return superpose(rho, mu).scaled(z);
}

ReferenceMeasure posterior_intensity(const PosteriorSpec& spec) {
    return spec.base().scaled(spec.z_post() / (1.0 - spec.z_post()));
}

std::pair<PosteriorSpec, PosteriorSpec> convolution_split(const PosteriorSpec& spec, const PointConfiguration& mu) {
    require_same_window(spec.base().window(), mu.window());
    std::vector<Atom> atoms(spec.base().atoms().begin(), spec.base().atoms().end());
    for (const auto& p : mu.points()) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), p.loc,
                                   [](const Atom& a, const Location& loc) { return a.loc < loc; });
        const double k = static_cast<double>(p.multiplicity);
        if (it == atoms.end() || it->loc != p.loc || it->weight < k) {
            throw ParameterError("convolution_split: base does not contain the observed configuration");
        }
        it->weight -= k;
    }
    std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
    std::vector<double> masses(spec.base().cell_masses().begin(), spec.base().cell_masses().end());
    ReferenceMeasure rho(spec.base().window(), std::move(masses), std::move(atoms));
    return {PosteriorSpec(spec.z_post(), std::move(rho), spec.a_post()),
            PosteriorSpec(spec.z_post(), as_reference(mu), spec.a_post())};
}

} // namespace polya
