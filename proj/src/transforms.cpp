// SPDX-License-Identifier: Apache-2.0
#include "polya/transforms.hpp"

#include "polya/errors.hpp"

#include <cmath>
#include <limits>

namespace polya {

namespace {

void require_open_unit(double z, const char* what) {
    if (!(z > 0.0 && z < 1.0)) {
        throw ParameterError(std::string(what) + ": z must lie in (0,1)");
    }
}

void require_half_open_unit(double z, const char* what) {
    if (!(z >= 0.0 && z < 1.0)) {
        throw ParameterError(std::string(what) + ": z must lie in [0,1)");
    }
}

// -int log(1 + phi(c)) d rho, where phi is evaluated on the test-function
// value(s) of each cell. 0 * inf = 0 for massless cells.
template <typename Phi>
double log_integral(const ReferenceMeasure& rho, Phi phi) {
    double s = 0.0;
    const auto masses = rho.cell_masses();
    for (std::size_t c = 0; c < masses.size(); ++c) {
        if (masses[c] != 0.0) {
            s += masses[c] * std::log1p(phi(c));
        }
    }
    for (const auto& a : rho.atoms()) {
        if (a.weight != 0.0) {
            s += a.weight * std::log1p(phi(a.loc.cell));
        }
    }
    return -s;
}

// 1 - e^{-g}, exact for small g and equal to 1 at g = inf.
inline double one_minus_exp_neg(double g) {
    return -std::expm1(-g);
}

} // namespace

TransformResult TransformResult::from_log(double log_value) {
    return {log_value, std::exp(log_value)};
}

TransformResult laplace_poisson(const TestFunction& g, const ReferenceMeasure& rho) {
    require_same_window(g.window(), rho.window());
    std::vector<double> v(g.values().size());
    for (std::size_t c = 0; c < v.size(); ++c) {
        v[c] = one_minus_exp_neg(g(c));
    }
    return TransformResult::from_log(-zeta(rho, TestFunction(g.window(), std::move(v))));
}

TransformResult laplace_gp(const TestFunction& h, double z, const ReferenceMeasure& rho) {
    require_open_unit(z, "laplace_gp");
    require_same_window(h.window(), rho.window());
    const double ratio = z / (1.0 - z);
    return TransformResult::from_log(log_integral(rho, [&](std::size_t c) { return ratio * h(c); }));
}

TransformResult laplace_polya(const TestFunction& g, double z, const ReferenceMeasure& rho) {
    require_half_open_unit(z, "laplace_polya");
    require_same_window(g.window(), rho.window());
    if (z == 0.0) {
        return TransformResult::from_log(0.0);
    }
    const double ratio = z / (1.0 - z);
    return TransformResult::from_log(
        log_integral(rho, [&](std::size_t c) { return ratio * one_minus_exp_neg(g(c)); }));
}

TransformResult joint_laplace(const TestFunction& g, const TestFunction& h, double z, const ReferenceMeasure& rho) {
    require_open_unit(z, "joint_laplace");
    require_same_window(g.window(), rho.window());
    require_same_window(h.window(), rho.window());
    const double ratio = z / (1.0 - z);
    return TransformResult::from_log(
        log_integral(rho, [&](std::size_t c) { return ratio * (one_minus_exp_neg(g(c)) + h(c)); }));
}

TransformResult posterior_route_laplace(const TestFunction& g, const TestFunction& h, double z,
                                        const ReferenceMeasure& rho) {
    require_open_unit(z, "posterior_route_laplace");
    require_same_window(g.window(), rho.window());
    require_same_window(h.window(), rho.window());
    const double z_post = z / (1.0 + z);
    const auto posterior_part = laplace_gp(h, z_post, rho);

    std::vector<double> shifted(g.values().size());
    for (std::size_t c = 0; c < shifted.size(); ++c) {
        shifted[c] = g(c) + std::log1p(z * h(c));
    }
    const auto polya_part = laplace_polya(TestFunction(g.window(), std::move(shifted)), z, rho);
    return TransformResult::from_log(posterior_part.log_value + polya_part.log_value);
}

double nb_pmf(std::uint64_t k, double m, double z) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw ParameterError("nb_pmf: m must be positive and finite");
    }
    require_half_open_unit(z, "nb_pmf");
    if (z == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    const double kd = static_cast<double>(k);
    const double log_p = std::lgamma(m + kd) - std::lgamma(m) - std::lgamma(kd + 1.0) + m * std::log1p(-z) +
                         (k == 0 ? 0.0 : kd * std::log(z));
    return std::exp(log_p);
}

double logseries_pmf(std::uint64_t k, double z) {
    if (k == 0) {
        throw ParameterError("logseries_pmf: k must be at least 1");
    }
    require_open_unit(z, "logseries_pmf");
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(z) - std::log(kd) - std::log(-std::log1p(-z)));
}

double logseries_mean(double z) {
    require_open_unit(z, "logseries_mean");
    return z / ((1.0 - z) * -std::log1p(-z));
}

std::uint64_t nb_truncation_point(double m, double z, double tol) {
    require_half_open_unit(z, "nb_truncation_point");
    if (z == 0.0) {
        return 0;
    }
    // p_{k+1}/p_k = z (m + k) / (k + 1); once that ratio r < 1 the tail past
    // k is at most p_k r / (1 - r).
    for (std::uint64_t k = 0;; ++k) {
        const double r = z * (m + static_cast<double>(k)) / static_cast<double>(k + 1);
        if (r < 1.0 && nb_pmf(k, m, z) * r / (1.0 - r) < tol) {
            return k;
        }
    }
}

std::uint64_t logseries_truncation_point(double z, double tol) {
    require_open_unit(z, "logseries_truncation_point");
    // p_{k+1}/p_k = z k / (k + 1) < z
    for (std::uint64_t k = 1;; ++k) {
        if (logseries_pmf(k, z) * z / (1.0 - z) < tol) {
            return k;
        }
    }
}

double polya_campbell_exact(const TestFunction& f, const TestFunction& g, double z, const ReferenceMeasure& rho) {
    require_half_open_unit(z, "polya_campbell_exact");
    require_same_window(f.window(), rho.window());
    require_same_window(g.window(), rho.window());
    if (!f.is_finite()) {
        throw ParameterError("polya_campbell_exact: f must be finite");
    }
    if (z == 0.0) {
        return 0.0;
    }
    std::vector<double> kernel(f.values().size());
    for (std::size_t c = 0; c < kernel.size(); ++c) {
        const double damp = std::exp(-g(c));
        kernel[c] = z * f(c) * damp / (1.0 - z * damp);
    }
    const double integral = zeta(rho, TestFunction(f.window(), std::move(kernel)));
    return laplace_polya(g, z, rho).value * integral;
}

namespace {
template <typename Sample>
Estimate empirical_laplace_impl(std::span<const Sample> samples, const TestFunction& f) {
    if (samples.size() < 2) {
        throw ParameterError("empirical_laplace: need at least two samples");
    }
    RunningStats s;
    for (const auto& x : samples) {
        s.push(std::exp(-zeta(x, f)));
    }
    return s.estimate();
}
} // namespace

Estimate empirical_laplace(std::span<const PointConfiguration> samples, const TestFunction& f) {
    return empirical_laplace_impl(samples, f);
}

Estimate empirical_laplace(std::span<const AtomicMeasure> samples, const TestFunction& f) {
    return empirical_laplace_impl(samples, f);
}

} // namespace polya
