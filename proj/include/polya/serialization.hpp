// SPDX-License-Identifier: Apache-2.0
//
// JSON schema (schema_version 1):
//
//   window:        {"mode": "continuous-box", "bounds": [[lo, hi], ...], "cells": [n, ...]}
//                  {"mode": "discrete-sites", "sites": ["a", "b", ...]}
//   location:      array of coordinates (box) or site id string (sites)
//   reference:     {"schema_version": 1, "kind": "reference-measure", "window": ...,
//                   "masses": [per-cell mass], "atoms": [{"loc": ..., "weight": w}]}
//   configuration: {"schema_version": 1, "kind": "point-configuration", "window": ...,
//                   "points": [{"loc": ..., "mult": k}]}
//   atomic:        {"schema_version": 1, "kind": "atomic-measure", "window": ...,
//                   "atoms": [{"loc": ..., "weight": w}]}
//
// Readers accept documents without "window" when the caller supplies one,
// and accept the string "inf" for infinite test-function values.
#pragma once

#include "polya/state_space.hpp"

#include "json.hpp"

#include <string>

namespace polya {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

json to_json(const Window& w);
json to_json(const Location& loc, const Window& w);
json to_json(const ReferenceMeasure& rho);
json to_json(const PointConfiguration& mu);
json to_json(const AtomicMeasure& kappa);

Window window_from_json(const json& j);
Location location_from_json(const json& j, const Window& w);
ReferenceMeasure reference_from_json(const json& j, WindowPtr window = nullptr);
PointConfiguration configuration_from_json(const json& j, WindowPtr window = nullptr);
AtomicMeasure atomic_from_json(const json& j, WindowPtr window = nullptr);
/// A bare array of per-cell values, or a single number for a constant.
TestFunction test_function_from_json(const json& j, WindowPtr window);
/// Cell indices (array of integers) or site ids for discrete windows.
CellSet cell_set_from_json(const json& j, const Window& w);

} // namespace polya
