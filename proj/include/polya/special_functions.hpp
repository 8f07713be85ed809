// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace polya {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
/// Power series for x <= 1, continued fraction above.
double expint_e1(double x);

/// The x > 0 with E1(x) = y, for y > 0. E1 is strictly decreasing, so the
/// root is bracketed and refined with Newton steps in log x, falling back to
/// bisection whenever a step leaves the bracket. Relative accuracy ~1e-14.
double expint_e1_inverse(double y);

} // namespace polya
