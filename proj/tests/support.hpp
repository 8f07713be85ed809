// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and hand-rolled generators for the property tests.
#pragma once

#include "polya/random.hpp"
#include "polya/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace polya::test {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline WindowPtr line(std::size_t cells, double length = 1.0) {
    return make_window(Window::box({{0.0, length}}, {cells}));
}

inline WindowPtr sites(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("s" + std::to_string(i));
    }
    return make_window(Window::sites(std::move(ids)));
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double rel_err(double a, double b) {
    if (a == b) {
        return 0.0;
    }
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

/// Per-cell diffuse masses, some cells empty, optionally a few atoms.
inline ReferenceMeasure random_rho(Rng& rng, const WindowPtr& w, double max_mass = 3.0, bool atoms = false) {
    std::vector<double> m(w->cell_count());
    for (auto& x : m) {
        x = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.0, max_mass);
    }
    std::vector<Atom> as;
    if (atoms) {
        const auto k = pick(rng, 0, 3);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t c = pick(rng, 0, w->cell_count() - 1);
            Location loc = w->is_discrete() ? w->site(c)
                                            : w->locate({w->cell_extent(c, 0).lo + 0.5 * (w->cell_extent(c, 0).hi -
                                                                                         w->cell_extent(c, 0).lo)});
            as.push_back({loc, uniform(rng, 0.0, max_mass)});
        }
    }
    return ReferenceMeasure(w, std::move(m), std::move(as));
}

/// Nonnegative values, some zero; infinite values with probability p_inf.
inline TestFunction random_function(Rng& rng, const WindowPtr& w, double max_value = 2.0, double p_inf = 0.0) {
    std::vector<double> v(w->cell_count());
    for (auto& x : v) {
        const double u = uniform(rng, 0.0, 1.0);
        x = u < p_inf ? kInf : (u < p_inf + 0.2 ? 0.0 : uniform(rng, 0.0, max_value));
    }
    return TestFunction(w, std::move(v));
}

/// Points at cell midpoints-ish with random multiplicities, on a 1-d box.
inline PointConfiguration random_configuration(Rng& rng, const WindowPtr& w, std::size_t max_points = 5) {
    std::vector<Point> pts;
    const auto k = pick(rng, 0, max_points);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t c = pick(rng, 0, w->cell_count() - 1);
        Location loc = w->is_discrete() ? w->site(c)
                                        : w->locate({uniform(rng, w->cell_extent(c, 0).lo, w->cell_extent(c, 0).hi)});
        pts.push_back({loc, pick(rng, 1, 4)});
    }
    return PointConfiguration::merged(w, std::move(pts));
}

} // namespace polya::test
