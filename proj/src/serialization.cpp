// SPDX-License-Identifier: Apache-2.0
#include "polya/serialization.hpp"

#include "polya/errors.hpp"

#include <limits>

namespace polya {

namespace {

constexpr const char* kBox = "continuous-box";
constexpr const char* kSites = "discrete-sites";

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) {
        throw SchemaError(std::string("missing field '") + name + "'");
    }
    return j.at(name);
}

template <typename T>
T get_as(const json& j, const char* name) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("field '") + name + "': " + e.what());
    }
}

void check_header(const json& j, const char* kind) {
    if (!j.is_object()) {
        throw SchemaError(std::string("expected a ") + kind + " object");
    }
    if (j.contains("schema_version") && get_as<int>(j.at("schema_version"), "schema_version") != kSchemaVersion) {
        throw SchemaError("field 'schema_version': unsupported version " + j.at("schema_version").dump());
    }
    if (j.contains("kind") && get_as<std::string>(j.at("kind"), "kind") != kind) {
        throw SchemaError(std::string("field 'kind': expected '") + kind + "', got " + j.at("kind").dump());
    }
}

WindowPtr resolve_window(const json& j, WindowPtr window) {
    if (j.contains("window")) {
        auto parsed = make_window(window_from_json(j.at("window")));
        if (window && !same_window(parsed, window)) {
            throw SchemaError("field 'window': does not match the configured window");
        }
        return window ? window : parsed;
    }
    if (!window) {
        throw SchemaError("missing field 'window'");
    }
    return window;
}

json header(const char* kind, const Window& w) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["window"] = to_json(w);
    return j;
}

std::vector<Atom> atoms_from_json(const json& j, const Window& w) {
    std::vector<Atom> atoms;
    if (!j.is_array()) {
        throw SchemaError("field 'atoms': expected an array");
    }
    for (const auto& a : j) {
        atoms.push_back({location_from_json(field(a, "loc"), w), get_as<double>(field(a, "weight"), "weight")});
    }
    return atoms;
}

json atoms_to_json(std::span<const Atom> atoms, const Window& w) {
    json arr = json::array();
    for (const auto& a : atoms) {
        arr.push_back({{"loc", to_json(a.loc, w)}, {"weight", a.weight}});
    }
    return arr;
}

} // namespace

json to_json(const Window& w) {
    if (w.is_discrete()) {
        return {{"mode", kSites}, {"sites", w.site_ids()}};
    }
    json bounds = json::array();
    for (const auto& b : w.bounds()) {
        bounds.push_back({b.lo, b.hi});
    }
    return {{"mode", kBox}, {"bounds", bounds}, {"cells", w.cells_per_axis()}};
}

json to_json(const Location& loc, const Window& w) {
    if (w.is_discrete()) {
        return w.site_ids().at(loc.cell);
    }
    return loc.coords;
}

json to_json(const ReferenceMeasure& rho) {
    auto j = header("reference-measure", *rho.window());
    j["masses"] = std::vector<double>(rho.cell_masses().begin(), rho.cell_masses().end());
    j["atoms"] = atoms_to_json(rho.atoms(), *rho.window());
    return j;
}

json to_json(const PointConfiguration& mu) {
    auto j = header("point-configuration", *mu.window());
    json pts = json::array();
    for (const auto& p : mu.points()) {
        pts.push_back({{"loc", to_json(p.loc, *mu.window())}, {"mult", p.multiplicity}});
    }
    j["points"] = std::move(pts);
    return j;
}

json to_json(const AtomicMeasure& kappa) {
    auto j = header("atomic-measure", *kappa.window());
    j["atoms"] = atoms_to_json(kappa.atoms(), *kappa.window());
    return j;
}

Window window_from_json(const json& j) {
    const auto mode = get_as<std::string>(field(j, "mode"), "mode");
    try {
        if (mode == kSites) {
            return Window::sites(get_as<std::vector<std::string>>(field(j, "sites"), "sites"));
        }
        if (mode == kBox) {
            std::vector<Interval> bounds;
            for (const auto& b : field(j, "bounds")) {
                const auto pair = get_as<std::vector<double>>(b, "bounds");
                if (pair.size() != 2) {
                    throw SchemaError("field 'bounds': each axis needs [lo, hi]");
                }
                bounds.push_back({pair[0], pair[1]});
            }
            return Window::box(std::move(bounds), get_as<std::vector<std::size_t>>(field(j, "cells"), "cells"));
        }
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("field 'window': ") + e.what());
    }
    throw SchemaError("field 'mode': expected 'continuous-box' or 'discrete-sites', got '" + mode + "'");
}

Location location_from_json(const json& j, const Window& w) {
    try {
        if (w.is_discrete()) {
            return w.site(w.site_index(get_as<std::string>(j, "loc")));
        }
        return w.locate(get_as<std::vector<double>>(j, "loc"));
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("field 'loc': ") + e.what());
    }
}

ReferenceMeasure reference_from_json(const json& j, WindowPtr window) {
    check_header(j, "reference-measure");
    window = resolve_window(j, std::move(window));
    try {
        auto masses = get_as<std::vector<double>>(field(j, "masses"), "masses");
        std::vector<Atom> atoms;
        if (j.contains("atoms")) {
            atoms = atoms_from_json(j.at("atoms"), *window);
        }
        return ReferenceMeasure(window, std::move(masses), std::move(atoms));
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("reference measure: ") + e.what());
    }
}

PointConfiguration configuration_from_json(const json& j, WindowPtr window) {
    check_header(j, "point-configuration");
    window = resolve_window(j, std::move(window));
    std::vector<Point> points;
    const auto& arr = field(j, "points");
    if (!arr.is_array()) {
        throw SchemaError("field 'points': expected an array");
    }
    for (const auto& p : arr) {
        points.push_back({location_from_json(field(p, "loc"), *window),
                          get_as<std::uint64_t>(field(p, "mult"), "mult")});
    }
    try {
        return PointConfiguration(window, std::move(points));
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("field 'points': ") + e.what());
    }
}

AtomicMeasure atomic_from_json(const json& j, WindowPtr window) {
    check_header(j, "atomic-measure");
    window = resolve_window(j, std::move(window));
    try {
        return AtomicMeasure(window, atoms_from_json(field(j, "atoms"), *window));
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("field 'atoms': ") + e.what());
    }
}

TestFunction test_function_from_json(const json& j, WindowPtr window) {
    auto value = [](const json& v) {
        if (v.is_string() && v.get<std::string>() == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        return get_as<double>(v, "test function");
    };
    try {
        if (j.is_array()) {
            std::vector<double> values;
            for (const auto& v : j) {
                values.push_back(value(v));
            }
            return TestFunction(std::move(window), std::move(values));
        }
        return TestFunction::constant(std::move(window), value(j));
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("test function: ") + e.what());
    }
}

CellSet cell_set_from_json(const json& j, const Window& w) {
    if (!j.is_array()) {
        throw SchemaError("cell set: expected an array");
    }
    std::vector<std::size_t> cells;
    for (const auto& c : j) {
        if (c.is_string()) {
            try {
                cells.push_back(w.site_index(c.get<std::string>()));
            } catch (const ParameterError& e) {
                throw SchemaError(std::string("cell set: ") + e.what());
            }
        } else {
            cells.push_back(get_as<std::size_t>(c, "cells"));
        }
    }
    try {
        return CellSet::of(w, cells);
    } catch (const ParameterError& e) {
        throw SchemaError(std::string("cell set: ") + e.what());
    }
}

} // namespace polya
