// SPDX-License-Identifier: Apache-2.0
#include "polya/special_functions.hpp"

#include "polya/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polya {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 500;

double e1_series(double x) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::fabs(add) < std::fabs(sum) * kEps) {
            break;
        }
    }
    return -kEulerGamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
    // Modified Lentz evaluation of e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            break;
        }
    }
    return h * std::exp(-x);
}

} // namespace

double expint_e1(double x) {
    if (!(x > 0.0)) {
        throw ParameterError("expint_e1: argument must be positive");
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double expint_e1_inverse(double y) {
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw ParameterError("expint_e1_inverse: argument must be positive and finite");
    }
    // Starting point from the small- and large-x asymptotics.
    double x;
    if (y > 0.5) {
        x = std::exp(-y - kEulerGamma);
    } else {
        const double l = -std::log(y);
        x = l > 1.0 ? l - std::log(l) : 0.5;
    }
    if (x <= 0.0) {
        x = std::numeric_limits<double>::min();
    }

    // Bracket in u = log x such that E1(e^lo) >= y >= E1(e^hi).
    double u = std::log(x);
    double lo = u;
    double hi = u;
    while (expint_e1(std::exp(lo)) < y) {
        lo -= 1.0;
    }
    while (expint_e1(std::exp(hi)) > y) {
        hi += 1.0;
    }
    u = std::clamp(u, lo, hi);

    for (int it = 0; it < 200; ++it) {
        const double xu = std::exp(u);
        const double residual = expint_e1(xu) - y;
        if (residual == 0.0) {
            return xu;
        }
        if (residual > 0.0) {
            lo = u;
        } else {
            hi = u;
        }
        // dE1/du = -e^{-x}
        double next = u + residual * std::exp(xu);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::fabs(next - u) <= 1e-15 * std::max(1.0, std::fabs(u)) || hi - lo <= 1e-15 * std::max(1.0, std::fabs(u))) {
            return std::exp(next);
        }
        u = next;
    }
    return std::exp(u);
}

} // namespace polya
