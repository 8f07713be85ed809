// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace polya {

/// A parameter lies outside the domain an operation accepts.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two objects that must live on the same window do not.
class WindowMismatch : public std::invalid_argument {
public:
    WindowMismatch() : std::invalid_argument("objects are defined on different windows") {}
    using std::invalid_argument::invalid_argument;
};

/// A serialized document does not match the expected schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Density statistics that no (z, w) in the model can produce.
class InfeasibleStatistics : public std::domain_error {
public:
    InfeasibleStatistics(const std::string& what, double ratio)
        : std::domain_error(what), ratio_(ratio) {}

    /// The raw u/v ratio (infinite when v == 0).
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

} // namespace polya
