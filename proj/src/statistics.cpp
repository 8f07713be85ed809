// SPDX-License-Identifier: Apache-2.0
#include "polya/statistics.hpp"

#include "polya/errors.hpp"

#include <algorithm>
#include <cmath>

namespace polya {

Estimate RunningStats::estimate() const {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0};
}

Estimate estimate(std::span<const double> xs) {
    RunningStats s;
    for (auto x : xs) {
        s.push(x);
    }
    return s.estimate();
}

Estimate paired_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ParameterError("paired_difference: samples differ in length");
    }
    RunningStats s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.push(a[i] - b[i]);
    }
    return s.estimate();
}

std::vector<double> empirical_pmf(std::span<const std::uint64_t> xs) {
    std::vector<double> pmf;
    if (xs.empty()) {
        return pmf;
    }
    pmf.assign(*std::max_element(xs.begin(), xs.end()) + 1, 0.0);
    for (auto x : xs) {
        pmf[x] += 1.0;
    }
    for (auto& p : pmf) {
        p /= static_cast<double>(xs.size());
    }
    return pmf;
}

double total_variation(std::span<const double> empirical, const std::function<double(std::uint64_t)>& pmf,
                       std::size_t support) {
    support = std::max(support, empirical.size());
    double l1 = 0.0;
    double covered = 0.0;
    for (std::size_t k = 0; k < support; ++k) {
        const double p = pmf(k);
        const double e = k < empirical.size() ? empirical[k] : 0.0;
        l1 += std::fabs(e - p);
        covered += p;
    }
    l1 += std::max(0.0, 1.0 - covered);
    return 0.5 * l1;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    const auto n = std::max(p.size(), q.size());
    double l1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        l1 += std::fabs((k < p.size() ? p[k] : 0.0) - (k < q.size() ? q[k] : 0.0));
    }
    return 0.5 * l1;
}

} // namespace polya
