// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace polya {

/// Sample mean with its standard error.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Welford accumulator.
class RunningStats {
public:
    void push(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    Estimate estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

Estimate estimate(std::span<const double> xs);
/// Mean and stderr of a - b, element by element.
Estimate paired_difference(std::span<const double> a, std::span<const double> b);

/// Empirical pmf of nonnegative integer data, indexed by value.
std::vector<double> empirical_pmf(std::span<const std::uint64_t> xs);
/// Half the l1 distance between an empirical pmf and `pmf` (evaluated on
/// 0..support-1, remaining reference mass counted as missed).
double total_variation(std::span<const double> empirical, const std::function<double(std::uint64_t)>& pmf,
                       std::size_t support);
double total_variation(std::span<const double> p, std::span<const double> q);

} // namespace polya
