// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Seeds are fixed.

#include "polya/bayes.hpp"
#include "polya/estimators.hpp"
#include "polya/samplers.hpp"
#include "polya/statistics.hpp"
#include "polya/transforms.hpp"
#include "polya/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace polya;

namespace {

constexpr std::uint64_t kSeed = 20261014;
constexpr double kEps = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel_err(double a, double b) {
    if (a == b) {
        return 0.0;
    }
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

WindowPtr line(std::size_t cells, double length = 1.0) {
    return make_window(Window::box({{0.0, length}}, {cells}));
}

TestFunction random_function(Rng& rng, const WindowPtr& w, double max_value, double p_inf = 0.0) {
    std::vector<double> v(w->cell_count());
    for (auto& x : v) {
        const double u = uniform(rng, 0.0, 1.0);
        x = u < p_inf ? kInf : (u < p_inf + 0.2 ? 0.0 : uniform(rng, 0.0, max_value));
    }
    return TestFunction(w, std::move(v));
}

ReferenceMeasure random_rho(Rng& rng, const WindowPtr& w, double max_mass) {
    std::vector<double> m(w->cell_count());
    for (auto& x : m) {
        x = uniform(rng, 0.0, max_mass);
    }
    return ReferenceMeasure(w, std::move(m));
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// 1. Both closed forms of the joint transform agree.
Outcome joint_transform_identity() {
    const auto start = std::chrono::steady_clock::now();
    double worst_gp = 0.0;
    double worst_route = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto rng = make_rng({kSeed + 1, i});
        const auto w = line(pick(rng, 1, 8));
        const auto rho = random_rho(rng, w, 4.0);
        const auto g = random_function(rng, w, 3.0, 0.1);
        const auto h = random_function(rng, w, 3.0);
        const double z = uniform(rng, 0.01, 0.99);
        std::vector<double> eff(w->cell_count());
        for (std::size_t c = 0; c < eff.size(); ++c) {
            eff[c] = -std::expm1(-g(c)) + h(c);
        }
        const double joint = joint_laplace(g, h, z, rho).value;
        worst_gp = std::max(worst_gp, rel_err(joint, laplace_gp(TestFunction(w, eff), z, rho).value));
        worst_route = std::max(worst_route, rel_err(joint, posterior_route_laplace(g, h, z, rho).value));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst_gp < 1e-12 && worst_route < 1e-12 && secs < 1.0,
            fmt("max rel err %.2e (GP form), %.2e (posterior route), %.3f s", worst_gp, worst_route, secs)};
}

// 2. Forward, backward and exact joint transforms agree.
Outcome conjugacy() {
    const auto w = line(4);
    const ReferenceMeasure rho(w, {0.5, 1.0, 0.25, 0.75});
    int passed = 0;
    int total = 0;
    double worst = 0.0;
    for (double z : {0.3, 0.5, 0.7}) {
        for (std::uint64_t j = 0; j < 4; ++j) {
            auto rng = make_rng({kSeed + 2, static_cast<std::uint64_t>(z * 10) * 10 + j});
            const auto g = random_function(rng, w, 2.0, 0.1);
            const auto h = random_function(rng, w, 2.0);
            const auto r = check_conjugacy(PolyaParams(z, rho), g, h, kEps, 100000, RngSeed{kSeed + 2, 0}.derive(total));
            passed += r.pass;
            worst = std::max(worst, r.z_score);
            ++total;
        }
    }
    return {passed == total, fmt("%d/%d checks pass at n=1e5, max |z| %.2f", passed, total, worst)};
}

// 3. Count law of both Polya routes.
Outcome count_law() {
    const auto w = line(4);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    auto totals = [&](PolyaRoute route, std::uint64_t seed) {
        return replicate(100000, RngSeed{seed, 0},
                         [&](std::size_t, Rng& r) { return sample_polya(params, route, kEps, r).total_count(); });
    };
    const auto direct = totals(PolyaRoute::direct, kSeed + 3);
    const auto cox = totals(PolyaRoute::cox, kSeed + 13);
    auto tv = [&](const std::vector<std::uint64_t>& xs) {
        return total_variation(empirical_pmf(xs), [](std::uint64_t k) { return nb_pmf(k, 2.0, 0.5); },
                               nb_truncation_point(2.0, 0.5) + 1);
    };
    RunningStats s;
    for (auto c : direct) {
        s.push(static_cast<double>(c));
    }
    const double tv_d = tv(direct);
    const double tv_c = tv(cox);
    return {tv_d < 0.01 && tv_c < 0.015,
            fmt("TV direct %.4f, cox %.4f; direct mean %.3f var %.3f", tv_d, tv_c, s.mean(), s.variance())};
}

// 4. Posterior first moment is the Bayes estimator.
Outcome bayes_estimator_check() {
    const auto w = line(3);
    const auto x = w->locate({0.1});
    const auto y = w->locate({0.8});
    const ReferenceMeasure rho(w, {1.0, 0.5, 2.0});
    const PointConfiguration mu(w, {{x, 3}, {y, 1}});
    const double z = 0.5;
    const PolyaParams params(z, rho);
    const auto b = bayes_estimator(z, rho, mu);

    const auto draws = replicate(100000, RngSeed{kSeed + 4, 0},
                                 [&](std::size_t, Rng& r) { return sample_posterior(mu, params, kEps, r); });
    // cells (diffuse part) then the two observed atoms
    std::vector<RunningStats> stats(5);
    for (const auto& k : draws) {
        std::vector<double> v(5, 0.0);
        for (const auto& a : k.atoms()) {
            if (a.loc == x) {
                v[3] += a.weight;
            } else if (a.loc == y) {
                v[4] += a.weight;
            } else {
                v[a.loc.cell] += a.weight;
            }
        }
        for (std::size_t i = 0; i < 5; ++i) {
            stats[i].push(v[i]);
        }
    }
    std::vector<double> target{b.cell_masses()[0], b.cell_masses()[1], b.cell_masses()[2], 0.0, 0.0};
    for (const auto& a : b.atoms()) {
        target[a.loc == x ? 3 : 4] = a.weight;
    }
    bool mc_ok = true;
    double worst_z = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto e = stats[i].estimate();
        const double excess = std::max(0.0, std::abs(e.mean - target[i]) - kEps);
        worst_z = std::max(worst_z, excess / e.std_error);
        mc_ok = mc_ok && excess <= 3.0 * e.std_error;
    }

    double worst_rel = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto rng = make_rng({kSeed + 14, i});
        const auto wi = line(pick(rng, 1, 8));
        const auto ri = random_rho(rng, wi, 3.0);
        std::vector<Point> pts;
        for (std::size_t k = pick(rng, 0, 5); k > 0; --k) {
            pts.push_back({wi->locate({uniform(rng, 0.0, 1.0)}), pick(rng, 1, 4)});
        }
        const auto mi = PointConfiguration::merged(wi, pts);
        const double zi = uniform(rng, 0.01, 0.99);
        const auto lhs = bayes_estimator(zi, ri, mi);
        const auto rhs = posterior_intensity(posterior_params(zi, ri, mi));
        for (std::size_t c = 0; c < lhs.cell_masses().size(); ++c) {
            worst_rel = std::max(worst_rel, rel_err(lhs.cell_masses()[c], rhs.cell_masses()[c]));
        }
        for (std::size_t a = 0; a < lhs.atoms().size(); ++a) {
            worst_rel = std::max(worst_rel, rel_err(lhs.atoms()[a].weight, rhs.atoms()[a].weight));
        }
    }
    return {mc_ok && worst_rel <= 1e-15,
            fmt("max excess %.2f sigma over 5 cells/atoms at n=1e5; identity max rel err %.1e over 100 inputs",
                worst_z, worst_rel)};
}

// 5. Rate update a -> a + 1.
Outcome rate_update() {
    const auto w = line(1);
    const auto rho = ReferenceMeasure::uniform(w, 1.0);
    double worst = 0.0;
    double worst_abs = 0.0;
    double worst_stored = 0.0;
    for (int k = 1; k <= 99; ++k) {
        const double z = k / 100.0;
        const double a = (1.0 - z) / z;
        const auto spec = posterior_params(z, rho, PointConfiguration(w));
        const double zp = spec.z_post();
        worst = std::max(worst, rel_err((1.0 - zp) / zp, a + 1.0));
        worst_abs = std::max(worst_abs, std::abs((1.0 - zp) / zp - (a + 1.0)));
        worst_stored = std::max(worst_stored, std::abs(spec.a_post() - (a + 1.0)));
    }
    return {worst < 1e-14 && worst_abs < 1e-14 && worst_stored < 1e-14,
            fmt("stored a_post abs err %.1e; (1-z')/z' vs a+1 rel err %.1e (abs %.1e)", worst_stored, worst,
                worst_abs)};
}

// 6. Integration by parts for the Polya sum process, and its power.
Outcome polya_ibp() {
    const auto w = line(4);
    const PolyaParams params(0.5, ReferenceMeasure::uniform(w, 2.0));
    int passed = 0;
    int rejected = 0;
    double worst = 0.0;
    double weakest = kInf;
    for (std::uint64_t i = 0; i < 10; ++i) {
        auto rng = make_rng({kSeed + 6, i});
        const auto f = random_function(rng, w, 2.0);
        const auto g = random_function(rng, w, 2.0);
        const RngSeed seed = RngSeed{kSeed + 6, 0}.derive(i);
        const auto ok = check_polya_ibp(params, f, g, 100000, seed);
        const auto bad = check_polya_ibp(params, f, g, 100000, seed, {.kernel_z = 0.25});
        passed += ok.pass;
        worst = std::max(worst, ok.z_score);
        rejected += !bad.pass && bad.z_score > 5.0;
        weakest = std::min(weakest, bad.z_score);
    }
    return {passed == 10 && rejected == 10,
            fmt("%d/10 pass (max |z| %.2f); wrong kernel rejected %d/10 (min |z| %.1f)", passed, worst, rejected,
                weakest)};
}

// 7. (z, w) solver round trip and single-sample recovery.
Outcome zw_solver() {
    double worst = 0.0;
    int points = 0;
    for (int k = 1; k <= 9; ++k) {
        const double z = 0.1 * k;
        for (double w : {0.5, 1.0, 2.0, 5.0}) {
            const auto e = solve_zw(w * z / (1.0 - z), -w * std::log1p(-z));
            worst = std::max({worst, std::abs(e.z_hat - z), std::abs(e.w_hat - w)});
            ++points;
        }
    }
    const auto win = line(10, 1e4);
    const auto rho0 = ReferenceMeasure::uniform(win, 1e4);
    const PolyaParams params(0.5, rho0);
    const auto all = CellSet::all(*win);
    const auto errs = replicate(100, RngSeed{kSeed + 7, 0}, [&](std::size_t, Rng& r) {
        const auto s = density_stats(sample_polya_direct(params, r), rho0, all);
        const auto e = solve_zw(s.u, s.v);
        return std::pair{std::abs(e.z_hat - 0.5), std::abs(e.w_hat - 1.0)};
    });
    std::vector<double> ez, ew;
    for (const auto& [a, b] : errs) {
        ez.push_back(a);
        ew.push_back(b);
    }
    const double mz = median(ez);
    const double mw = median(ew);
    return {worst < 1e-10 && points == 36 && mz < 0.02 && mw < 0.05,
            fmt("round trip max err %.1e over %d points; median abs err z %.4f, w %.4f", worst, points, mz, mw)};
}

// 8. Mixed Papangelou kernel needs per-sample coefficients.
Outcome mixed_papangelou() {
    const auto w = line(10, 10.0);
    const auto rho0 = ReferenceMeasure::uniform(w, 1000.0);
    const MixingMeasure v({{0.3, 1.0, 0.5}, {0.7, 1.0, 0.5}}, rho0);
    std::vector<double> fv(10, 0.0), gv(10, 0.0);
    fv[0] = 1.0;
    gv[0] = 0.01;
    const TestFunction f(w, fv);
    const TestFunction g(w, gv);
    const TestFunction one = TestFunction::constant(w, 1.0);
    const TestFunction zero = TestFunction::constant(w, 0.0);
    const RngSeed seed{kSeed + 8, 0};
    const MixedCheckOptions whole{.estimation_cells = CellSet::all(*w)};
    const MixedCheckOptions fixed{.fixed_kernel = std::pair{0.5, 1.0}};

    const auto local = check_mixed_ibp(v, f, g, 10000, seed.derive(0));
    const auto global = check_mixed_ibp(v, one, zero, 10000, seed.derive(1), whole);
    const auto local_fixed = check_mixed_ibp(v, f, g, 10000, seed.derive(0), fixed);
    const auto global_fixed = check_mixed_ibp(v, one, zero, 10000, seed.derive(1), fixed);
    return {local.pass && global.pass && !local_fixed.pass && !global_fixed.pass,
            fmt("plug-in |z| %.2f (f on one cell), %.2f (f = 1, g = 0); fixed kernel |z| %.1f, %.1f; "
                "infeasible fraction %.3f",
                local.z_score, global.z_score, local_fixed.z_score, global_fixed.z_score,
                local.failure_fraction.value_or(0.0))};
}

// 9. A single observation identifies the mixture component.
Outcome classification() {
    const auto w = line(10, 1e4);
    const auto rho0 = ReferenceMeasure::uniform(w, 1e4);
    const MixingMeasure v({{0.3, 1.0, 0.5}, {0.7, 1.0, 0.5}}, rho0);
    const auto all = CellSet::all(*w);
    const auto hits = replicate(200, RngSeed{kSeed + 9, 0}, [&](std::size_t, Rng& r) {
        const auto s = sample_mixed(v, PolyaRoute::direct, kEps, r);
        const auto d = density_stats(s.config, rho0, all);
        const auto e = solve_zw(d.u, d.v);
        const std::size_t nearest = std::abs(e.z_hat - 0.3) < std::abs(e.z_hat - 0.7) ? 0 : 1;
        return nearest == s.component ? 1.0 : 0.0;
    });
    const double acc = estimate(hits).mean;
    return {acc > 0.95, fmt("accuracy %.3f over 200 replicas", acc)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"joint transform closed forms agree", joint_transform_identity},
        {"forward/backward conjugacy", conjugacy},
        {"negative binomial count law", count_law},
        {"posterior mean is the Bayes estimator", bayes_estimator_check},
        {"rate update a' = a + 1", rate_update},
        {"integration by parts and power", polya_ibp},
        {"(z, w) solver", zw_solver},
        {"mixed Papangelou kernel", mixed_papangelou},
        {"mixture component classification", classification},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
