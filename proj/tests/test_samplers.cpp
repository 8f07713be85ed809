// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "support.hpp"

#include "polya/errors.hpp"
#include "polya/samplers.hpp"
#include "polya/statistics.hpp"
#include "polya/transforms.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace polya;
using namespace polya::test;

namespace {

template <typename Fn>
std::vector<std::uint64_t> counts(std::size_t n, std::uint64_t seed, Fn fn) {
    return replicate(n, RngSeed{seed, 0}, [&](std::size_t, Rng& rng) { return fn(rng); });
}

Estimate estimate_u64(const std::vector<std::uint64_t>& xs) {
    RunningStats s;
    for (auto x : xs) {
        s.push(static_cast<double>(x));
    }
    return s.estimate();
}

bool within(const Estimate& e, double target, double allowance = 0.0) {
    return std::abs(e.mean - target) <= 3.0 * e.std_error + allowance;
}

// Pearson goodness of fit for integer data against `pmf` on k >= k_min; bins
// are merged from the right until each expects at least five observations.
double chi_square_p_value(const std::vector<std::uint64_t>& xs, const std::function<double(std::uint64_t)>& pmf,
                          std::uint64_t k_min) {
    const auto emp = empirical_pmf(xs);
    const double n = static_cast<double>(xs.size());
    std::vector<double> expected, observed;
    double mass = 0.0;
    for (std::uint64_t k = k_min;; ++k) {
        const double p = pmf(k);
        const double obs = k < emp.size() ? emp[k] * n : 0.0;
        if (p * n < 5.0 || (1.0 - mass - p) * n < 5.0) {
            double rest = 0.0;
            for (std::size_t j = k; j < emp.size(); ++j) {
                rest += emp[j] * n;
            }
            expected.push_back((1.0 - mass) * n);
            observed.push_back(rest);
            break;
        }
        expected.push_back(p * n);
        observed.push_back(obs);
        mass += p;
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    }
    const boost::math::chi_squared dist(static_cast<double>(expected.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

double nb_tv(const std::vector<std::uint64_t>& xs, double m, double z) {
    return total_variation(empirical_pmf(xs), [&](std::uint64_t k) { return nb_pmf(k, m, z); },
                           nb_truncation_point(m, z) + 1);
}

} // namespace

TEST_CASE("Poisson sampler examples") {
    const auto w = line(3);
    auto rng = make_rng({41, 0});
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_poisson(ReferenceMeasure::zero(w), rng).empty());
    }

    const auto x = w->locate({0.5});
    const AtomicMeasure atom(w, {{x, 2.0}});
    const auto at_x = counts(100000, 42, [&](Rng& r) {
        const auto mu = sample_poisson(atom, r);
        CHECK(mu.distinct_size() <= 1);
        return mu.total_count();
    });
    CHECK(within(estimate_u64(at_x), 2.0));

    const auto diffuse = counts(100000, 43, [&](Rng& r) {
        const auto mu = sample_poisson(ReferenceMeasure::uniform(w, 3.0), r);
        for (const auto& p : mu.points()) {
            CHECK(p.multiplicity == 1);
        }
        return mu.total_count();
    });
    RunningStats s;
    for (auto c : diffuse) {
        s.push(static_cast<double>(c));
    }
    CHECK(within(s.estimate(), 3.0));
    CHECK(s.variance() == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("Poisson points on a site pile up") {
    const auto w = sites(2);
    auto rng = make_rng({44, 0});
    for (int i = 0; i < 200; ++i) {
        const auto mu = sample_poisson(ReferenceMeasure(w, {5.0, 0.0}), rng);
        CHECK(mu.distinct_size() <= 1);
        for (const auto& p : mu.points()) {
            CHECK(p.loc.cell == 0);
        }
    }
}

TEST_CASE("Poisson points fall in their cell") {
    const auto w = make_window(Window::box({{0.0, 1.0}, {0.0, 2.0}}, {2, 3}));
    const ReferenceMeasure rho(w, {0.0, 4.0, 0.0, 0.0, 0.0, 2.0});
    auto rng = make_rng({45, 0});
    for (int i = 0; i < 200; ++i) {
        const auto mu = sample_poisson(rho, rng);
        for (const auto& p : mu.points()) {
            CHECK((p.loc.cell == 1 || p.loc.cell == 5));
            CHECK(w->cell_of(p.loc.coords) == p.loc.cell);
        }
    }
}

TEST_CASE("Gamma measure total mass") {
    const auto w = line(1);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    const double eps = 1e-6;
    const auto masses = replicate(100000, RngSeed{46, 0},
                                  [&](std::size_t, Rng& r) { return sample_gamma_measure(params, eps, r).total_mass(); });
    const auto e = estimate(masses);
    CHECK(within(e, 2.0, eps));

    // Kolmogorov-Smirnov distance to Gamma(shape m, rate a)
    auto sorted = masses;
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = boost::math::gamma_p(2.0, params.a() * sorted[i]);
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    CHECK(d < 0.01);
}

TEST_CASE("Gamma measure contract") {
    const auto w = line(2);
    auto rng = make_rng({47, 0});
    CHECK(sample_gamma_measure(PolyaParams(0.0, ReferenceMeasure::uniform(w, 2.0)), 1e-6, rng).empty());
    CHECK(sample_gamma_measure(PolyaParams(0.5, ReferenceMeasure::zero(w)), 1e-6, rng).empty());
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    CHECK_THROWS_AS(sample_gamma_measure(params, 0.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_gamma_measure(params, -1.0, rng), ParameterError);

    // a single remainder atom once eps exceeds the expected total m/a
    for (int i = 0; i < 50; ++i) {
        const auto k = sample_gamma_measure(params, 10.0, rng);
        REQUIRE(k.atoms().size() == 1);
        CHECK(k.total_mass() <= 2.0 / params.a());
    }
    // jumps sorted from the Levy tail produce strictly positive weights
    for (int i = 0; i < 50; ++i) {
        const auto k = sample_gamma_measure(params, 1e-6, rng);
        for (const auto& a : k.atoms()) {
            CHECK(a.weight > 0.0);
            CHECK(w->is_valid(a.loc));
        }
    }
}

TEST_CASE("Gamma measure places mass proportionally to rho") {
    const auto w = sites(2);
    const ReferenceMeasure rho(w, {1.0, 3.0});
    const PolyaParams params(0.5, rho);
    const auto split = replicate(20000, RngSeed{48, 0}, [&](std::size_t, Rng& r) {
        return zeta(sample_gamma_measure(params, 1e-6, r), TestFunction(w, {0.0, 1.0}));
    });
    CHECK(within(estimate(split), 3.0, 1e-6));
}

TEST_CASE("log-series sampler matches its pmf") {
    for (double z : {0.1, 0.5, 0.9, 0.99}) {
        const auto xs = counts(100000, 49, [&](Rng& r) { return sample_logseries(z, r); });
        CHECK(*std::min_element(xs.begin(), xs.end()) >= 1);
        CAPTURE(z);
        CHECK(chi_square_p_value(xs, [&](std::uint64_t k) { return logseries_pmf(k, z); }, 1) > 0.001);
    }
    auto rng = make_rng({49, 1});
    CHECK_THROWS_AS(sample_logseries(0.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_logseries(1.0, rng), ParameterError);
}

TEST_CASE("direct Polya sampler examples") {
    const auto w = line(2);
    auto rng = make_rng({50, 0});
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_polya_direct(PolyaParams(0.0, ReferenceMeasure::uniform(w, 5.0)), rng).empty());
    }
    const PolyaParams unit(0.5, ReferenceMeasure::uniform(w, 1.0));
    const auto empty = counts(100000, 51, [&](Rng& r) { return std::uint64_t{sample_polya_direct(unit, r).empty() ? 1u : 0u}; });
    CHECK(within(estimate_u64(empty), 0.5));
}

TEST_CASE("three routes share the negative binomial count law") {
    const auto w = line(4);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    const auto direct = counts(100000, 52, [&](Rng& r) { return sample_polya_direct(params, r).total_count(); });
    const auto cox = counts(100000, 53, [&](Rng& r) { return sample_polya_cox(params, 1e-6, r).total_count(); });
    CHECK(nb_tv(direct, 2.0, 0.5) < 0.01);
    CHECK(nb_tv(cox, 2.0, 0.5) < 0.015);
    CHECK(total_variation(empirical_pmf(direct), empirical_pmf(cox)) < 0.015);

    const auto ed = estimate_u64(direct);
    CHECK(within(ed, 2.0));
    CHECK(within(estimate_u64(cox), 2.0));
    RunningStats s;
    for (auto c : direct) {
        s.push(static_cast<double>(c));
    }
    CHECK(s.variance() == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("distinct counts are Poisson under the direct route") {
    const auto w = line(4);
    const double z = 0.5;
    const double m = 2.0;
    const PolyaParams params(z, ReferenceMeasure::uniform(w, m));
    const std::size_t n = 100000;
    const auto xs = counts(n, 54, [&](Rng& r) { return sample_polya_direct(params, r).distinct_size(); });

    const double lambda = -std::log1p(-z) * m;
    const auto poisson = [&](std::uint64_t k) {
        return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(k + 1.0));
    };
    CHECK(chi_square_p_value(xs, poisson, 0) > 0.001);
}

TEST_CASE("Cox route distinct-count mean") {
    const auto w = line(4);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    const auto xs = counts(100000, 55, [&](Rng& r) { return sample_polya_cox(params, 1e-6, r).distinct_size(); });
    CHECK(within(estimate_u64(xs), -std::log(0.5) * 2.0, 1e-6));
}

TEST_CASE("empirical Laplace functional of each route") {
    const auto w = line(5);
    for (std::uint64_t i = 0; i < 20; ++i) {
        auto gen = make_rng({56, i});
        const auto rho = random_rho(gen, w, 1.0, true);
        const auto g = random_function(gen, w, 2.0, 0.05);
        const double z = uniform(gen, 0.1, 0.8);
        const PolyaParams params(z, rho);
        const double exact = laplace_polya(g, z, rho).value;
        for (auto route : {PolyaRoute::direct, PolyaRoute::cox}) {
            const auto samples = replicate(10000, RngSeed{57 + i, static_cast<std::uint64_t>(route)},
                                           [&](std::size_t, Rng& r) { return sample_polya(params, route, 1e-6, r); });
            const auto e = empirical_laplace(samples, g);
            CAPTURE(i);
            CAPTURE(static_cast<int>(route));
            CHECK(within(e, exact, route == PolyaRoute::cox ? 1e-6 * (1.0 + g.max()) : 0.0));
        }
    }
}

TEST_CASE("same seed reproduces bit for bit") {
    const auto w = line(3);
    const PolyaParams params(0.6, ReferenceMeasure::uniform(w, 4.0));
    for (auto route : {PolyaRoute::direct, PolyaRoute::cox}) {
        auto a = make_rng({58, 3});
        auto b = make_rng({58, 3});
        for (int i = 0; i < 50; ++i) {
            CHECK(sample_polya(params, route, 1e-6, a) == sample_polya(params, route, 1e-6, b));
        }
    }
    auto c = make_rng({58, 4});
    auto d = make_rng({58, 4});
    CHECK(sample_gamma_measure(params, 1e-6, c) == sample_gamma_measure(params, 1e-6, d));
    auto e = make_rng({58, 5});
    CHECK_FALSE(sample_gamma_measure(params, 1e-6, e) == sample_gamma_measure(params, 1e-6, c));
}

TEST_CASE("replicate does not depend on thread count") {
    const auto w = line(3);
    const PolyaParams params(0.6, ReferenceMeasure::uniform(w, 4.0));
    auto draw = [&](std::size_t, Rng& r) { return sample_polya_cox(params, 1e-6, r); };
    const auto one = replicate(500, RngSeed{59, 0}, draw, 1);
    const auto four = replicate(500, RngSeed{59, 0}, draw, 4);
    CHECK(one == four);
}

TEST_CASE("counts on disjoint sets are uncorrelated") {
    const auto w = line(4);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 4.0));
    const std::vector<std::size_t> left{0, 1};
    const auto a = CellSet::of(*w, left);
    const auto b = a.complement();
    const std::size_t n = 100000;
    const auto pairs = replicate(n, RngSeed{60, 0}, [&](std::size_t, Rng& r) {
        const auto mu = sample_polya_direct(params, r);
        return std::pair{static_cast<double>(count(mu, a)), static_cast<double>(count(mu, b))};
    });
    RunningStats sa, sb, sab;
    for (const auto& [x, y] : pairs) {
        sa.push(x);
        sb.push(y);
    }
    for (const auto& [x, y] : pairs) {
        sab.push((x - sa.mean()) * (y - sb.mean()));
    }
    const double corr = sab.mean() / std::sqrt(sa.variance() * sb.variance());
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("posterior sampler examples") {
    const auto w = line(2);
    const auto x = w->locate({0.25});
    const ReferenceMeasure rho(w, {1.0, 2.0});
    const PolyaParams params(0.5, rho);
    const PointConfiguration mu(w, {{x, 3}});
    const AtomicMeasure at_x(w, {{x, 1.0}});
    const double eps = 1e-6;

    const auto draws = replicate(100000, RngSeed{61, 0},
                                 [&](std::size_t, Rng& r) { return sample_posterior(mu, params, eps, r); });
    std::vector<double> weight_at_x, cell0, cell1;
    for (const auto& k : draws) {
        double wx = 0.0;
        double c0 = 0.0;
        double c1 = 0.0;
        for (const auto& a : k.atoms()) {
            if (a.loc == x) {
                wx += a.weight;
            } else if (a.loc.cell == 0) {
                c0 += a.weight;
            } else {
                c1 += a.weight;
            }
        }
        weight_at_x.push_back(wx);
        cell0.push_back(c0);
        cell1.push_back(c1);
    }
    CHECK(within(estimate(weight_at_x), 1.5));
    CHECK(within(estimate(cell0), 0.5 * 1.0, eps));
    CHECK(within(estimate(cell1), 0.5 * 2.0, eps));

    // empty observation: exactly a GP_{z/(1+z), rho} draw
    const PolyaParams post(0.5 / 1.5, rho);
    auto r1 = make_rng({62, 0});
    auto r2 = make_rng({62, 0});
    CHECK(sample_posterior(PointConfiguration(w), params, eps, r1) == sample_gamma_measure(post, eps, r2));
    CHECK_THROWS_AS(sample_posterior(mu, PolyaParams(0.0, rho), eps, r1), ParameterError);
}

TEST_CASE("mixing measure validation") {
    const auto w = line(2);
    const auto base = ReferenceMeasure::uniform(w, 1.0);
    CHECK_THROWS_AS(MixingMeasure({}, base), ParameterError);
    CHECK_THROWS_AS(MixingMeasure({{0.3, 1.0, 0.5}, {0.6, 1.0, 0.4}}, base), ParameterError);
    CHECK_THROWS_AS(MixingMeasure({{1.0, 1.0, 1.0}}, base), ParameterError);
    CHECK_THROWS_AS(MixingMeasure({{0.3, -1.0, 1.0}}, base), ParameterError);
    CHECK_NOTHROW(MixingMeasure({{0.3, 1.0, 0.5}, {0.0, 0.0, 0.5}}, base));
    CHECK(MixingMeasure({{0.3, 1.0, 0.5}, {0.0, 0.0, 0.5}}, base).is_identifiable_family());
    CHECK_FALSE(MixingMeasure({{0.3, 0.0, 1.0}}, base).is_identifiable_family());
}

TEST_CASE("mixed sampler examples") {
    const auto w = line(3);
    const auto base = ReferenceMeasure::uniform(w, 2.0);

    // degenerate mixture has the plain Polya law
    const MixingMeasure single({{0.5, 1.5, 1.0}}, base);
    const auto mixed = counts(100000, 63, [&](Rng& r) {
        const auto s = sample_mixed(single, PolyaRoute::direct, 1e-6, r);
        CHECK(s.component == 0);
        return s.config.total_count();
    });
    CHECK(nb_tv(mixed, 3.0, 0.5) < 0.01);

    // Laplace functional is the mixture of the component transforms
    const MixingMeasure two({{0.3, 1.0, 0.5}, {0.6, 1.0, 0.5}}, base);
    const TestFunction g(w, {0.2, 1.0, 0.0});
    const double exact = 0.5 * laplace_polya(g, 0.3, base).value + 0.5 * laplace_polya(g, 0.6, base).value;
    for (auto route : {PolyaRoute::direct, PolyaRoute::cox}) {
        const auto samples = replicate(50000, RngSeed{64, static_cast<std::uint64_t>(route)},
                                       [&](std::size_t, Rng& r) { return sample_mixed(two, route, 1e-6, r).config; });
        CHECK(within(empirical_laplace(samples, g), exact, route == PolyaRoute::cox ? 2e-6 : 0.0));
    }

    // the (0,0) branch is always empty and reported as such
    const MixingMeasure with_void({{0.5, 1.0, 0.5}, {0.0, 0.0, 0.5}}, base);
    auto rng = make_rng({65, 0});
    std::size_t voids = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto s = sample_mixed(with_void, PolyaRoute::direct, 1e-6, rng);
        if (s.component == 1) {
            ++voids;
            CHECK(s.config.empty());
            CHECK(s.z == 0.0);
            CHECK(s.w == 0.0);
        }
    }
    CHECK(voids > 850);
    CHECK(voids < 1150);
}
