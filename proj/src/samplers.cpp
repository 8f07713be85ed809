// SPDX-License-Identifier: Apache-2.0
#include "polya/samplers.hpp"

#include "polya/errors.hpp"
#include "polya/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polya {

namespace {

double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

std::uint64_t poisson_variate(double mean, Rng& rng) {
    if (!(mean > 0.0)) {
        return 0;
    }
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

Location uniform_in_cell_impl(const Window& w, std::size_t cell, Rng& rng) {
    if (w.is_discrete()) {
        return w.site(cell);
    }
    std::vector<double> coords(w.dimension());
    for (std::size_t axis = 0; axis < coords.size(); ++axis) {
        const auto e = w.cell_extent(cell, axis);
        coords[axis] = e.lo + (e.hi - e.lo) * uniform01(rng);
    }
    return w.locate(std::move(coords));
}

// Draws locations from rho / rho(window).
class LocationSampler {
public:
    explicit LocationSampler(const ReferenceMeasure& rho) : rho_(rho) {
        double acc = 0.0;
        for (auto m : rho.cell_masses()) {
            acc += m;
            cumulative_.push_back(acc);
        }
        for (const auto& a : rho.atoms()) {
            acc += a.weight;
            cumulative_.push_back(acc);
        }
        total_ = acc;
    }

    double total() const noexcept { return total_; }

    Location draw(Rng& rng) const {
        const double u = uniform01(rng) * total_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        auto index = static_cast<std::size_t>(it - cumulative_.begin());
        index = std::min(index, cumulative_.size() - 1);
        // Never land on a zero-mass slot (possible only at u == boundary).
        while (index > 0 && cumulative_[index] == cumulative_[index - 1]) {
            --index;
        }
        const auto ncells = rho_.cell_masses().size();
        if (index >= ncells) {
            return rho_.atoms()[index - ncells].loc;
        }
        return uniform_in_cell_impl(*rho_.window(), index, rng);
    }

private:
    const ReferenceMeasure& rho_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

void require_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw ParameterError("truncation threshold eps must be positive");
    }
}

} // namespace

// -- parameters --------------------------------------------------------------

PolyaParams::PolyaParams(double z, ReferenceMeasure rho) : z_(z), rho_(std::move(rho)) {
    if (!(z >= 0.0 && z < 1.0)) {
        throw ParameterError("Polya parameters: z must lie in [0,1)");
    }
    a_ = z == 0.0 ? std::numeric_limits<double>::infinity() : (1.0 - z) / z;
}

MixingMeasure::MixingMeasure(std::vector<MixtureComponent> components, ReferenceMeasure base)
    : components_(std::move(components)), base_(std::move(base)) {
    if (components_.empty()) {
        throw ParameterError("mixing measure needs at least one component");
    }
    double acc = 0.0;
    for (const auto& c : components_) {
        if (!(c.z >= 0.0 && c.z < 1.0)) {
            throw ParameterError("mixing measure: z must lie in [0,1)");
        }
        if (!(c.w >= 0.0) || !std::isfinite(c.w)) {
            throw ParameterError("mixing measure: w must be nonnegative and finite");
        }
        if (!(c.p > 0.0)) {
            throw ParameterError("mixing measure: probabilities must be positive");
        }
        acc += c.p;
        cumulative_.push_back(acc);
    }
    if (std::fabs(acc - 1.0) > 1e-12) {
        throw ParameterError("mixing measure: probabilities must sum to 1");
    }
}

bool MixingMeasure::is_identifiable_family() const {
    return std::all_of(components_.begin(), components_.end(), [](const MixtureComponent& c) {
        return (c.z == 0.0 && c.w == 0.0) || (c.z > 0.0 && c.w > 0.0);
    });
}

std::size_t MixingMeasure::draw_component(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), components_.size() - 1);
}

// -- samplers ----------------------------------------------------------------

PointConfiguration sample_poisson(const ReferenceMeasure& intensity, Rng& rng) {
    const auto& w = *intensity.window();
    std::vector<Point> points;
    const auto masses = intensity.cell_masses();
    for (std::size_t c = 0; c < masses.size(); ++c) {
        const auto k = poisson_variate(masses[c], rng);
        if (k == 0) {
            continue;
        }
        if (w.is_discrete()) {
            points.push_back({w.site(c), k});
        } else {
            for (std::uint64_t i = 0; i < k; ++i) {
                points.push_back({uniform_in_cell_impl(w, c, rng), 1});
            }
        }
    }
    for (const auto& a : intensity.atoms()) {
        if (const auto k = poisson_variate(a.weight, rng); k > 0) {
            points.push_back({a.loc, k});
        }
    }
    return PointConfiguration::merged(intensity.window(), std::move(points));
}

PointConfiguration sample_poisson(const AtomicMeasure& intensity, Rng& rng) {
    std::vector<Point> points;
    for (const auto& a : intensity.atoms()) {
        if (const auto k = poisson_variate(a.weight, rng); k > 0) {
            points.push_back({a.loc, k});
        }
    }
    return PointConfiguration(intensity.window(), std::move(points));
}

AtomicMeasure sample_gamma_measure(const PolyaParams& params, double eps, Rng& rng) {
    require_eps(eps);
    const auto& rho = params.rho();
    const LocationSampler locations(rho);
    const double m = locations.total();
    if (params.z() == 0.0 || !(m > 0.0)) {
        return AtomicMeasure(rho.window());
    }
    const double a = params.a();

    std::vector<Atom> atoms;
    std::exponential_distribution<double> arrival(1.0);
    double remaining = m / a;
    double gamma_k = 0.0;
    while (remaining >= eps) {
        gamma_k += arrival(rng);
        const double r = expint_e1_inverse(gamma_k / m) / a;
        if (!(r > 0.0)) {
            break;
        }
        atoms.push_back({locations.draw(rng), r});
        remaining = (m / a) * -std::expm1(-a * r);
    }
    if (remaining > 0.0) {
        atoms.push_back({locations.draw(rng), remaining});
    }
    return AtomicMeasure::merged(rho.window(), std::move(atoms));
}

std::uint64_t sample_logseries(double z, Rng& rng) {
    if (!(z > 0.0 && z < 1.0)) {
        throw ParameterError("sample_logseries: z must lie in (0,1)");
    }
    const double r = std::log1p(-z);
    while (true) {
        const double v = uniform01(rng);
        if (v >= z) {
            return 1;
        }
        const double q = -std::expm1(r * uniform01(rng));
        if (v <= q * q) {
            const double k = std::floor(1.0 + std::log(v) / std::log(q));
            if (k < 1.0 || v == 0.0) {
                continue;
            }
            return static_cast<std::uint64_t>(k);
        }
        return v >= q ? 1 : 2;
    }
}

PointConfiguration sample_polya_direct(const PolyaParams& params, Rng& rng) {
    const auto& rho = params.rho();
    const LocationSampler locations(rho);
    const double m = locations.total();
    if (params.z() == 0.0 || !(m > 0.0)) {
        return PointConfiguration(rho.window());
    }
    const auto clusters = poisson_variate(-std::log1p(-params.z()) * m, rng);
    std::vector<Point> points;
    points.reserve(clusters);
    for (std::uint64_t i = 0; i < clusters; ++i) {
        auto loc = locations.draw(rng);
        points.push_back({std::move(loc), sample_logseries(params.z(), rng)});
    }
    return PointConfiguration::merged(rho.window(), std::move(points));
}

PointConfiguration sample_polya_cox(const PolyaParams& params, double eps, Rng& rng) {
    const auto kappa = sample_gamma_measure(params, eps, rng);
    return sample_poisson(kappa, rng);
}

PointConfiguration sample_polya(const PolyaParams& params, PolyaRoute route, double eps, Rng& rng) {
    return route == PolyaRoute::direct ? sample_polya_direct(params, rng) : sample_polya_cox(params, eps, rng);
}

AtomicMeasure sample_posterior(const PointConfiguration& mu, const PolyaParams& params, double eps, Rng& rng) {
    require_same_window(mu.window(), params.rho().window());
    const double z = params.z();
    if (!(z > 0.0 && z < 1.0)) {
        throw ParameterError("sample_posterior: z must lie in (0,1)");
    }
    const double z_post = z / (1.0 + z);
    const double a_post = params.a() + 1.0;

    const auto diffuse = sample_gamma_measure(PolyaParams(z_post, params.rho()), eps, rng);
    std::vector<Atom> atoms(diffuse.atoms().begin(), diffuse.atoms().end());
    for (const auto& p : mu.points()) {
        std::gamma_distribution<double> weight(static_cast<double>(p.multiplicity), 1.0 / a_post);
        const double wgt = weight(rng);
        if (wgt > 0.0) {
            atoms.push_back({p.loc, wgt});
        }
    }
    return AtomicMeasure::merged(mu.window(), std::move(atoms));
}

MixedSample sample_mixed(const MixingMeasure& v, PolyaRoute route, double eps, Rng& rng) {
    const auto i = v.draw_component(rng);
    const auto& c = v.components()[i];
    if (c.z == 0.0 || c.w == 0.0) {
        return {PointConfiguration(v.base().window()), i, c.z, c.w};
    }
    const PolyaParams params(c.z, v.base().scaled(c.w));
    return {sample_polya(params, route, eps, rng), i, c.z, c.w};
}

} // namespace polya
