// SPDX-License-Identifier: Apache-2.0
#include "polya/verify.hpp"

#include "polya/errors.hpp"
#include "polya/estimators.hpp"
#include "polya/transforms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace polya {

namespace {

using Clock = std::chrono::steady_clock;

void require_replicas(std::size_t n) {
    if (n < 100) {
        throw ParameterError("checks need at least 100 replicas");
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Linear truncation slack for Cox-route samples: the truncated measure
// differs from the exact one by an expected mass below eps, so a functional
// with sensitivity `scale` moves by at most ~2 eps scale.
double truncation_allowance(PolyaRoute route, double eps, double scale) {
    return route == PolyaRoute::cox ? 2.0 * eps * scale : 0.0;
}

std::vector<double> column(const std::vector<std::pair<double, double>>& rows, bool second) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i] = second ? rows[i].second : rows[i].first;
    }
    return out;
}

double campbell_term(const PointConfiguration& mu, const TestFunction& f, const TestFunction& g) {
    const double fv = zeta(mu, f);
    return fv == 0.0 ? 0.0 : fv * std::exp(-zeta(mu, g));
}

// Paired (lhs, rhs) rows plus the exact value: lhs-rhs paired, then each
// side against the exact value.
void compare_three(CheckReport& r, const std::vector<double>& lhs, const std::vector<double>& rhs, double exact,
                   double allowance) {
    r.lhs = estimate(lhs);
    r.rhs = estimate(rhs);
    r.exact = exact;
    const double scale = std::max({1.0, std::fabs(exact), std::fabs(r.lhs.mean)});
    const auto diff = paired_difference(lhs, rhs);
    r.comparisons.push_back(Comparison::make("lhs-rhs", diff.mean, diff.std_error, allowance, scale));
    r.comparisons.push_back(Comparison::make("lhs-exact", r.lhs.mean - exact, r.lhs.std_error, allowance, scale));
    r.comparisons.push_back(Comparison::make("rhs-exact", r.rhs.mean - exact, r.rhs.std_error, allowance, scale));
}

} // namespace

Comparison Comparison::make(std::string label, double difference, double std_error, double allowance, double scale) {
    Comparison c;
    c.label = std::move(label);
    c.difference = difference;
    c.std_error = std_error;
    c.allowance = allowance;
    const double excess = std::max(0.0, std::fabs(difference) - allowance);
    if (std_error > 0.0) {
        c.z_score = std::copysign(excess / std_error, difference);
        c.pass = std::fabs(c.z_score) <= kPassSigma;
    } else {
        // Degenerate statistic: equality up to rounding.
        c.pass = excess <= 1e-12 * scale;
        c.z_score = c.pass ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), difference);
    }
    return c;
}

void CheckReport::finalize() {
    z_score = 0.0;
    pass = !comparisons.empty();
    for (const auto& c : comparisons) {
        z_score = std::max(z_score, std::fabs(c.z_score));
        pass = pass && c.pass;
    }
}

Estimate campbell_estimate(std::span<const PointConfiguration> samples, const TestFunction& f, const TestFunction& g) {
    if (samples.size() < 2) {
        throw ParameterError("campbell_estimate: need at least two samples");
    }
    if (!f.is_finite()) {
        throw ParameterError("campbell_estimate: f must be finite");
    }
    RunningStats s;
    for (const auto& mu : samples) {
        s.push(campbell_term(mu, f, g));
    }
    return s.estimate();
}

CheckReport check_mecke(const ReferenceMeasure& rho, const TestFunction& f, const TestFunction& g, std::size_t n,
                        RngSeed seed) {
    require_replicas(n);
    const auto start = Clock::now();
    const double shifted = zeta(rho, damped(f, g));
    const auto rows = replicate(n, seed, [&](std::size_t, Rng& rng) {
        const auto mu = sample_poisson(rho, rng);
        const double damp = std::exp(-zeta(mu, g));
        return std::pair{campbell_term(mu, f, g), shifted == 0.0 ? 0.0 : shifted * damp};
    });
    CheckReport r;
    r.name = "mecke";
    r.n = n;
    compare_three(r, column(rows, false), column(rows, true), shifted * laplace_poisson(g, rho).value, 0.0);
    r.runtime_seconds = seconds_since(start);
    r.finalize();
    return r;
}

CheckReport check_polya_ibp(const PolyaParams& params, const TestFunction& f, const TestFunction& g, std::size_t n,
                            RngSeed seed, const PolyaCheckOptions& options) {
    require_replicas(n);
    const auto start = Clock::now();
    const auto& rho = params.rho();
    const double z = params.z();
    const double kernel_z = options.kernel_z.value_or(z);
    const auto fg = damped(f, g);
    const double rho_part = zeta(rho, fg);

    const auto rows = replicate(n, seed, [&](std::size_t, Rng& rng) {
        const auto mu = sample_polya(params, options.route, options.eps, rng);
        const double damp = std::exp(-zeta(mu, g));
        const double kernel = kernel_z * (rho_part + zeta(mu, fg));
        return std::pair{campbell_term(mu, f, g), kernel == 0.0 ? 0.0 : kernel * damp};
    });

    const double mean_count = z == 0.0 ? 0.0 : rho.total_mass() * z / (1.0 - z);
    CheckReport r;
    r.name = "polya-ibp";
    r.n = n;
    compare_three(r, column(rows, false), column(rows, true), polya_campbell_exact(f, g, z, rho),
                  truncation_allowance(options.route, options.eps, (1.0 + f.max()) * (1.0 + mean_count)));
    r.runtime_seconds = seconds_since(start);
    r.finalize();
    return r;
}

CheckReport check_conjugacy(const PolyaParams& params, const TestFunction& g, const TestFunction& h, double eps,
                            std::size_t n, RngSeed seed) {
    require_replicas(n);
    if (!h.is_finite()) {
        throw ParameterError("check_conjugacy: h must be finite");
    }
    const auto start = Clock::now();
    const auto value = [&](const PointConfiguration& mu, const AtomicMeasure& kappa) {
        return std::exp(-zeta(mu, g) - zeta(kappa, h));
    };
    const auto forward = replicate(n, seed.derive(1), [&](std::size_t, Rng& rng) {
        const auto kappa = sample_gamma_measure(params, eps, rng);
        const auto mu = sample_poisson(kappa, rng);
        return value(mu, kappa);
    });
    const auto backward = replicate(n, seed.derive(2), [&](std::size_t, Rng& rng) {
        const auto mu = sample_polya_direct(params, rng);
        const auto kappa = sample_posterior(mu, params, eps, rng);
        return value(mu, kappa);
    });
    const double exact = joint_laplace(g, h, params.z(), params.rho()).value;
    const double allowance = truncation_allowance(PolyaRoute::cox, eps, 1.0 + h.max());

    CheckReport r;
    r.name = "conjugacy";
    r.n = n;
    r.lhs = estimate(forward);
    r.rhs = estimate(backward);
    r.exact = exact;
    const double se = std::hypot(r.lhs.std_error, r.rhs.std_error);
    r.comparisons.push_back(Comparison::make("forward-backward", r.lhs.mean - r.rhs.mean, se, 2.0 * allowance));
    r.comparisons.push_back(Comparison::make("forward-exact", r.lhs.mean - exact, r.lhs.std_error, allowance));
    r.comparisons.push_back(Comparison::make("backward-exact", r.rhs.mean - exact, r.rhs.std_error, allowance));
    r.runtime_seconds = seconds_since(start);
    r.finalize();
    return r;
}

CheckReport check_mixed_ibp(const MixingMeasure& v, const TestFunction& f, const TestFunction& g, std::size_t n,
                            RngSeed seed, const MixedCheckOptions& options) {
    require_replicas(n);
    if (!v.is_identifiable_family()) {
        throw ParameterError("check_mixed_ibp: every component must be (0,0) or have z in (0,1), w > 0");
    }
    const auto start = Clock::now();
    const auto& rho0 = v.base();
    const auto& window = *rho0.window();

    CellSet cells = CellSet::all(window);
    if (options.estimation_cells) {
        cells = *options.estimation_cells;
    } else {
        std::vector<std::size_t> outside;
        const auto fs = f.support();
        const auto gs = g.support();
        for (std::size_t c = 0; c < window.cell_count(); ++c) {
            if (!fs.contains(c) && !gs.contains(c)) {
                outside.push_back(c);
            }
        }
        auto candidate = CellSet::of(window, outside);
        if (rho0.mass(candidate) > 0.0) {
            cells = std::move(candidate);
        }
    }
    const auto fg = damped(f, g);

    struct Row {
        bool ok = false;
        std::size_t component = 0;
        double lhs = 0.0;
        double rhs = 0.0;
    };
    const auto rows = replicate(n, seed, [&](std::size_t, Rng& rng) {
        const auto s = sample_mixed(v, options.route, options.eps, rng);
        Row row;
        row.component = s.component;
        ReferenceMeasure kernel = ReferenceMeasure::zero(rho0.window());
        if (options.fixed_kernel) {
            kernel = papangelou_kernel(s.config, rho0, options.fixed_kernel->first, options.fixed_kernel->second);
        } else {
            try {
                kernel = papangelou_kernel(s.config, rho0, cells);
            } catch (const InfeasibleStatistics&) {
                return row;
            }
        }
        row.ok = true;
        row.lhs = campbell_term(s.config, f, g);
        const double k = zeta(kernel, fg);
        row.rhs = k == 0.0 ? 0.0 : k * std::exp(-zeta(s.config, g));
        return row;
    });

    std::vector<double> lhs;
    std::vector<double> rhs;
    std::map<std::size_t, std::pair<RunningStats, RunningStats>> per_branch;
    std::size_t failures = 0;
    for (const auto& row : rows) {
        if (!row.ok) {
            ++failures;
            continue;
        }
        lhs.push_back(row.lhs);
        rhs.push_back(row.rhs);
        auto& b = per_branch[row.component];
        b.first.push(row.lhs);
        b.second.push(row.rhs);
    }
    if (lhs.size() < 2) {
        throw ParameterError("check_mixed_ibp: (Z, W) could not be estimated on enough replicas");
    }

    double exact = 0.0;
    double mean_count = 0.0;
    for (const auto& c : v.components()) {
        if (c.z > 0.0) {
            const auto rho = rho0.scaled(c.w);
            exact += c.p * polya_campbell_exact(f, g, c.z, rho);
            mean_count += c.p * rho.total_mass() * c.z / (1.0 - c.z);
        }
    }

    CheckReport r;
    r.name = options.fixed_kernel ? "mixed-ibp-fixed" : "mixed-ibp";
    r.n = n;
    compare_three(r, lhs, rhs, exact,
                  truncation_allowance(options.route, options.eps, (1.0 + f.max()) * (1.0 + mean_count)));
    r.failure_fraction = static_cast<double>(failures) / static_cast<double>(n);
    for (const auto& [index, stats] : per_branch) {
        const auto& c = v.components()[index];
        r.branches.push_back({index, c.z, c.w, stats.first.count(), stats.first.estimate(), stats.second.estimate()});
    }
    r.runtime_seconds = seconds_since(start);
    r.finalize();
    return r;
}

namespace {
json estimate_json(const Estimate& e) {
    return {{"estimate", e.mean}, {"stderr", e.std_error}};
}

json finite_or_string(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return x > 0 ? "inf" : "-inf";
}
} // namespace

json to_json(const CheckReport& report) {
    json j;
    j["name"] = report.name;
    j["n"] = report.n;
    j["lhs"] = estimate_json(report.lhs);
    j["rhs"] = estimate_json(report.rhs);
    if (report.exact) {
        j["exact"] = {{"value", *report.exact}, {"exact", true}};
    }
    json comps = json::array();
    for (const auto& c : report.comparisons) {
        comps.push_back({{"label", c.label},
                         {"difference", c.difference},
                         {"stderr", c.std_error},
                         {"allowance", c.allowance},
                         {"z_score", finite_or_string(c.z_score)},
                         {"pass", c.pass}});
    }
    j["comparisons"] = std::move(comps);
    j["z_score"] = finite_or_string(report.z_score);
    j["pass"] = report.pass;
    if (report.failure_fraction) {
        j["failure_fraction"] = *report.failure_fraction;
    }
    if (!report.branches.empty()) {
        json branches = json::array();
        for (const auto& b : report.branches) {
            branches.push_back({{"component", b.component},
                                {"z", b.z},
                                {"w", b.w},
                                {"n", b.n},
                                {"lhs", estimate_json(b.lhs)},
                                {"rhs", estimate_json(b.rhs)}});
        }
        j["branches"] = std::move(branches);
    }
    return j;
}

std::string format_reports(std::span<const CheckReport> reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %8s %14s %12s %14s %12s %14s %8s %5s\n", "check", "n", "lhs", "+-",
                  "rhs", "+-", "exact", "max|z|", "pass");
    out << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-16s %8zu %14.6g %12.3g %14.6g %12.3g %14.6g %8.3g %5s\n",
                      r.name.c_str(), r.n, r.lhs.mean, r.lhs.std_error, r.rhs.mean, r.rhs.std_error,
                      r.exact.value_or(std::nan("")), r.z_score, r.pass ? "yes" : "NO");
        out << line;
    }
    return out.str();
}

} // namespace polya
