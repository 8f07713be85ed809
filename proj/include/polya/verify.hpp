// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo checks of the Campbell-measure identities. Test functions are
// restricted to h(x, mu) = f(x) exp(-mu(g)), for which every identity has a
// closed-form value. Both sides of an identity are evaluated on the same
// samples, so the paired difference has far smaller variance than either
// side alone.
#pragma once

#include "polya/random.hpp"
#include "polya/samplers.hpp"
#include "polya/serialization.hpp"
#include "polya/state_space.hpp"
#include "polya/statistics.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace polya {

inline constexpr double kPassSigma = 3.0;

/// One pairwise comparison. Passes iff |difference| <= 3 std_error + allowance.
struct Comparison {
    std::string label;
    double difference = 0.0;
    double std_error = 0.0;
    /// Deterministic slack (the O(eps) truncation bias of Cox-route samples).
    double allowance = 0.0;
    double z_score = 0.0;
    bool pass = false;

    static Comparison make(std::string label, double difference, double std_error, double allowance = 0.0,
                           double scale = 1.0);
};

struct BranchSummary {
    std::size_t component = 0;
    double z = 0.0;
    double w = 0.0;
    std::size_t n = 0;
    Estimate lhs;
    Estimate rhs;
};

struct CheckReport {
    std::string name;
    std::size_t n = 0;
    Estimate lhs;
    Estimate rhs;
    std::optional<double> exact;
    std::vector<Comparison> comparisons;
    /// Largest |z| over the comparisons.
    double z_score = 0.0;
    bool pass = false;
    double runtime_seconds = 0.0;

    // check_mixed_ibp only
    std::optional<double> failure_fraction;
    std::vector<BranchSummary> branches;

    void finalize();
};

/// mean over samples of mu(f) exp(-mu(g)).
Estimate campbell_estimate(std::span<const PointConfiguration> samples, const TestFunction& f, const TestFunction& g);

/// C_Poi(f e^{-zeta_g}) against the Mecke shift: rho(f e^{-g}) E[e^{-mu(g)}].
CheckReport check_mecke(const ReferenceMeasure& rho, const TestFunction& f, const TestFunction& g, std::size_t n,
                        RngSeed seed);

struct PolyaCheckOptions {
    PolyaRoute route = PolyaRoute::direct;
    double eps = 1e-6;
    /// Evaluates the right-hand side with this z instead of the sampling z
    /// (used to show the check rejects a wrong kernel).
    std::optional<double> kernel_z;
};

/// Integration by parts for Poy_{z,rho}: E[mu(f) e^{-mu(g)}] against
/// E[z (rho + mu)(f e^{-g}) e^{-mu(g)}] and polya_campbell_exact.
CheckReport check_polya_ibp(const PolyaParams& params, const TestFunction& f, const TestFunction& g, std::size_t n,
                            RngSeed seed, const PolyaCheckOptions& options = {});

/// Joint law of (mu, kappa) sampled forwards (kappa ~ GP, mu ~ Poi_kappa) and
/// backwards (mu ~ Poy, kappa ~ posterior), against joint_laplace(g, h).
/// h must be finite.
CheckReport check_conjugacy(const PolyaParams& params, const TestFunction& g, const TestFunction& h, double eps,
                            std::size_t n, RngSeed seed);

struct MixedCheckOptions {
    PolyaRoute route = PolyaRoute::direct;
    double eps = 1e-6;
    /// Cells from which (Z, W) are estimated. Defaults to the cells outside
    /// the support of f and g (all cells if that set has no mass), so the
    /// estimate does not see the points the test function weighs.
    std::optional<CellSet> estimation_cells;
    /// A single global (z, w) in place of the per-sample estimates.
    std::optional<std::pair<double, double>> fixed_kernel;
};

/// Integration by parts for Poy_V with the plug-in kernel Z(mu)(W(mu) rho_0 + mu).
CheckReport check_mixed_ibp(const MixingMeasure& v, const TestFunction& f, const TestFunction& g, std::size_t n,
                            RngSeed seed, const MixedCheckOptions& options = {});

json to_json(const CheckReport& report);
/// Human-readable table, one row per report.
std::string format_reports(std::span<const CheckReport> reports);

} // namespace polya
