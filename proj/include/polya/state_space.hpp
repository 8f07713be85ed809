// SPDX-License-Identifier: Apache-2.0
//
// Windows, cells, measures and point configurations.
//
// A window is either a d-dimensional box cut into a regular grid of cells, or
// a finite list of named sites (each site is its own cell). Every function a
// caller integrates is constant on cells, so every integral against a stored
// measure reduces to a finite sum.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polya {

enum class WindowMode { continuous_box, discrete_sites };

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const Interval&) const = default;
};

/// A point of the window: the cell it falls in plus its coordinates.
/// Coordinates are empty for discrete windows. Two locations coincide iff
/// both the cell and all coordinates compare equal.
struct Location {
    std::size_t cell = 0;
    std::vector<double> coords;

    bool operator==(const Location&) const = default;
    auto operator<=>(const Location&) const = default;
};

class Window {
public:
    /// Box with a regular grid; `cells_per_axis[i]` cells along axis i.
    static Window box(std::vector<Interval> bounds, std::vector<std::size_t> cells_per_axis);
    /// Finite site set; site ids must be unique and non-empty.
    static Window sites(std::vector<std::string> ids);

    WindowMode mode() const noexcept { return mode_; }
    bool is_discrete() const noexcept { return mode_ == WindowMode::discrete_sites; }
    std::size_t dimension() const noexcept { return bounds_.size(); }
    std::size_t cell_count() const noexcept { return cell_count_; }

    const std::vector<Interval>& bounds() const noexcept { return bounds_; }
    const std::vector<std::size_t>& cells_per_axis() const noexcept { return cells_per_axis_; }
    const std::vector<std::string>& site_ids() const noexcept { return site_ids_; }

    bool contains(std::span<const double> coords) const;
    /// Row-major cell index (last axis fastest). Points on the upper boundary
    /// of the box belong to the last cell along that axis.
    std::size_t cell_of(std::span<const double> coords) const;
    /// Extent of a cell along one axis (continuous windows only).
    Interval cell_extent(std::size_t cell, std::size_t axis) const;
    /// Lebesgue volume of a cell; 1 for discrete sites.
    double cell_volume(std::size_t cell) const;

    std::size_t site_index(std::string_view id) const;

    Location locate(std::vector<double> coords) const;
    Location site(std::size_t index) const;
    /// True when `loc` is consistent with this window.
    bool is_valid(const Location& loc) const;

    bool operator==(const Window&) const = default;

private:
    WindowMode mode_ = WindowMode::continuous_box;
    std::vector<Interval> bounds_;
    std::vector<std::size_t> cells_per_axis_;
    std::vector<std::string> site_ids_;
    std::size_t cell_count_ = 0;
};

using WindowPtr = std::shared_ptr<const Window>;

WindowPtr make_window(Window w);
bool same_window(const WindowPtr& a, const WindowPtr& b);
void require_same_window(const WindowPtr& a, const WindowPtr& b);

/// A finite union of cells.
class CellSet {
public:
    static CellSet all(const Window& w);
    static CellSet none(const Window& w);
    static CellSet of(const Window& w, std::span<const std::size_t> cells);

    bool contains(std::size_t cell) const { return cell < mask_.size() && mask_[cell]; }
    std::size_t universe_size() const noexcept { return mask_.size(); }
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::vector<std::size_t> indices() const;
    CellSet complement() const;

    bool operator==(const CellSet&) const = default;

private:
    explicit CellSet(std::vector<bool> mask) : mask_(std::move(mask)) {}
    std::vector<bool> mask_;
};

/// Nonnegative function constant on every cell; values may be +infinity
/// (e^{-inf} = 0 in every transform).
class TestFunction {
public:
    TestFunction(WindowPtr window, std::vector<double> values);
    static TestFunction constant(WindowPtr window, double value);
    static TestFunction indicator(WindowPtr window, const CellSet& cells, double value = 1.0);

    const WindowPtr& window() const noexcept { return window_; }
    double operator()(std::size_t cell) const { return values_[cell]; }
    std::span<const double> values() const noexcept { return values_; }
    bool is_finite() const;
    double max() const;
    /// Cells where the function is nonzero.
    CellSet support() const;

    TestFunction operator+(const TestFunction& other) const;
    TestFunction scaled(double c) const;

private:
    WindowPtr window_;
    std::vector<double> values_;
};

/// f * exp(-g), cellwise; f must be finite.
TestFunction damped(const TestFunction& f, const TestFunction& g);

struct Point {
    Location loc;
    std::uint64_t multiplicity = 1;
    bool operator==(const Point&) const = default;
};

struct Atom {
    Location loc;
    double weight = 0.0;
    bool operator==(const Atom&) const = default;
};

/// Finite multiset of points with integer multiplicities, stored in
/// ascending location order with pairwise distinct locations.
class PointConfiguration {
public:
    explicit PointConfiguration(WindowPtr window);
    /// Rejects duplicate locations.
    PointConfiguration(WindowPtr window, std::vector<Point> points);
    /// Combines coinciding locations by adding multiplicities.
    static PointConfiguration merged(WindowPtr window, std::vector<Point> points);

    const WindowPtr& window() const noexcept { return window_; }
    std::span<const Point> points() const noexcept { return points_; }
    bool empty() const noexcept { return points_.empty(); }
    std::size_t distinct_size() const noexcept { return points_.size(); }
    std::uint64_t total_count() const;

    bool operator==(const PointConfiguration& o) const {
        return same_window(window_, o.window_) && points_ == o.points_;
    }

private:
    WindowPtr window_;
    std::vector<Point> points_;
};

/// Finite list of weighted atoms: a truncated realization of a random
/// measure. Locations are pairwise distinct and weights strictly positive.
class AtomicMeasure {
public:
    explicit AtomicMeasure(WindowPtr window);
    AtomicMeasure(WindowPtr window, std::vector<Atom> atoms);
    static AtomicMeasure merged(WindowPtr window, std::vector<Atom> atoms);

    const WindowPtr& window() const noexcept { return window_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }
    double total_mass() const;

    bool operator==(const AtomicMeasure& o) const {
        return same_window(window_, o.window_) && atoms_ == o.atoms_;
    }

private:
    WindowPtr window_;
    std::vector<Atom> atoms_;
};

/// Parameter measure: a diffuse mass per cell (spread uniformly over the
/// cell) plus an optional atomic part with nonnegative weights.
class ReferenceMeasure {
public:
    ReferenceMeasure(WindowPtr window, std::vector<double> cell_masses, std::vector<Atom> atoms = {});
    static ReferenceMeasure uniform(WindowPtr window, double total_mass);
    static ReferenceMeasure zero(WindowPtr window);

    const WindowPtr& window() const noexcept { return window_; }
    std::span<const double> cell_masses() const noexcept { return masses_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    bool is_diffuse() const noexcept { return atoms_.empty(); }

    double diffuse_mass() const;
    double total_mass() const;
    double mass(const CellSet& cells) const;

    ReferenceMeasure scaled(double c) const;
    /// Measure sum; atoms at equal locations are combined.
    ReferenceMeasure operator+(const ReferenceMeasure& other) const;

    bool operator==(const ReferenceMeasure& o) const {
        return same_window(window_, o.window_) && masses_ == o.masses_ && atoms_ == o.atoms_;
    }

private:
    WindowPtr window_;
    std::vector<double> masses_;
    std::vector<Atom> atoms_;
};

/// Integral of f against the measure. 0 * inf is taken as 0.
double zeta(const PointConfiguration& mu, const TestFunction& f);
double zeta(const AtomicMeasure& kappa, const TestFunction& f);
double zeta(const ReferenceMeasure& rho, const TestFunction& f);

/// Points in `cells`, counted with multiplicity.
std::uint64_t count(const PointConfiguration& mu, const CellSet& cells);
/// Distinct locations in `cells`.
std::uint64_t distinct_count(const PointConfiguration& mu, const CellSet& cells);

/// rho + mu: the diffuse part of rho plus one atom per observed point with
/// weight equal to its multiplicity.
ReferenceMeasure superpose(const ReferenceMeasure& rho, const PointConfiguration& mu);

/// The configuration seen as a purely atomic reference measure.
ReferenceMeasure as_reference(const PointConfiguration& mu);

} // namespace polya
