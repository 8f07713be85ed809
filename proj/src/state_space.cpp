// SPDX-License-Identifier: Apache-2.0
#include "polya/state_space.hpp"

#include "polya/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace polya {

namespace {

// 0 * inf = 0, the measure-theoretic convention.
inline double weighted(double weight, double value) {
    return weight == 0.0 ? 0.0 : weight * value;
}

template <typename Item, typename Combine>
std::vector<Item> sort_and_merge(std::vector<Item> items, Combine combine) {
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.loc < b.loc; });
    std::vector<Item> out;
    out.reserve(items.size());
    for (auto& item : items) {
        if (!out.empty() && out.back().loc == item.loc) {
            combine(out.back(), item);
        } else {
            out.push_back(std::move(item));
        }
    }
    return out;
}

template <typename Item>
void require_distinct_sorted(std::vector<Item>& items, const char* what) {
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.loc < b.loc; });
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i - 1].loc == items[i].loc) {
            throw ParameterError(std::string(what) + ": duplicate location");
        }
    }
}

void require_valid_location(const Window& w, const Location& loc, const char* what) {
    if (!w.is_valid(loc)) {
        throw ParameterError(std::string(what) + ": location outside the window");
    }
}

} // namespace

// -- Window ------------------------------------------------------------------

Window Window::box(std::vector<Interval> bounds, std::vector<std::size_t> cells_per_axis) {
    if (bounds.empty()) {
        throw ParameterError("box window needs at least one axis");
    }
    if (bounds.size() != cells_per_axis.size()) {
        throw ParameterError("box window: bounds and cell counts differ in dimension");
    }
    Window w;
    w.mode_ = WindowMode::continuous_box;
    std::size_t n = 1;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& b = bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
            throw ParameterError("box window: axis " + std::to_string(i) + " has an empty or non-finite interval");
        }
        if (cells_per_axis[i] == 0) {
            throw ParameterError("box window: axis " + std::to_string(i) + " has zero cells");
        }
        n *= cells_per_axis[i];
    }
    w.bounds_ = std::move(bounds);
    w.cells_per_axis_ = std::move(cells_per_axis);
    w.cell_count_ = n;
    return w;
}

Window Window::sites(std::vector<std::string> ids) {
    if (ids.empty()) {
        throw ParameterError("site window needs at least one site");
    }
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (id.empty() || !seen.insert(id).second) {
            throw ParameterError("site window: site ids must be unique and non-empty");
        }
    }
    Window w;
    w.mode_ = WindowMode::discrete_sites;
    w.cell_count_ = ids.size();
    w.site_ids_ = std::move(ids);
    return w;
}

bool Window::contains(std::span<const double> coords) const {
    if (is_discrete() || coords.size() != dimension()) {
        return false;
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!(coords[i] >= bounds_[i].lo && coords[i] <= bounds_[i].hi)) {
            return false;
        }
    }
    return true;
}

std::size_t Window::cell_of(std::span<const double> coords) const {
    if (!contains(coords)) {
        throw ParameterError("coordinates outside the window");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto& b = bounds_[i];
        const auto n = cells_per_axis_[i];
        auto k = static_cast<std::size_t>(std::floor((coords[i] - b.lo) / (b.hi - b.lo) * static_cast<double>(n)));
        k = std::min(k, n - 1);
        index = index * n + k;
    }
    return index;
}

Interval Window::cell_extent(std::size_t cell, std::size_t axis) const {
    if (is_discrete() || axis >= dimension() || cell >= cell_count_) {
        throw ParameterError("cell_extent: invalid cell or axis");
    }
    std::size_t stride = 1;
    for (std::size_t i = dimension(); i-- > axis + 1;) {
        stride *= cells_per_axis_[i];
    }
    const auto n = cells_per_axis_[axis];
    const auto k = (cell / stride) % n;
    const auto& b = bounds_[axis];
    const double width = (b.hi - b.lo) / static_cast<double>(n);
    return {b.lo + width * static_cast<double>(k),
            k + 1 == n ? b.hi : b.lo + width * static_cast<double>(k + 1)};
}

double Window::cell_volume(std::size_t cell) const {
    if (is_discrete()) {
        return 1.0;
    }
    double v = 1.0;
    for (std::size_t axis = 0; axis < dimension(); ++axis) {
        const auto e = cell_extent(cell, axis);
        v *= e.hi - e.lo;
    }
    return v;
}

std::size_t Window::site_index(std::string_view id) const {
    const auto it = std::find(site_ids_.begin(), site_ids_.end(), id);
    if (it == site_ids_.end()) {
        throw ParameterError("unknown site '" + std::string(id) + "'");
    }
    return static_cast<std::size_t>(it - site_ids_.begin());
}

Location Window::locate(std::vector<double> coords) const {
    if (is_discrete()) {
        throw ParameterError("locate: coordinates given for a discrete window");
    }
    const auto cell = cell_of(coords);
    return {cell, std::move(coords)};
}

Location Window::site(std::size_t index) const {
    if (!is_discrete() || index >= cell_count_) {
        throw ParameterError("site: invalid site index");
    }
    return {index, {}};
}

bool Window::is_valid(const Location& loc) const {
    if (loc.cell >= cell_count_) {
        return false;
    }
    if (is_discrete()) {
        return loc.coords.empty();
    }
    return contains(loc.coords) && cell_of(loc.coords) == loc.cell;
}

WindowPtr make_window(Window w) {
    return std::make_shared<const Window>(std::move(w));
}

bool same_window(const WindowPtr& a, const WindowPtr& b) {
    return a == b || (a && b && *a == *b);
}

void require_same_window(const WindowPtr& a, const WindowPtr& b) {
    if (!same_window(a, b)) {
        throw WindowMismatch();
    }
}

// -- CellSet -----------------------------------------------------------------

CellSet CellSet::all(const Window& w) {
    return CellSet(std::vector<bool>(w.cell_count(), true));
}

CellSet CellSet::none(const Window& w) {
    return CellSet(std::vector<bool>(w.cell_count(), false));
}

CellSet CellSet::of(const Window& w, std::span<const std::size_t> cells) {
    std::vector<bool> mask(w.cell_count(), false);
    for (auto c : cells) {
        if (c >= mask.size()) {
            throw ParameterError("cell set: cell index " + std::to_string(c) + " out of range");
        }
        mask[c] = true;
    }
    return CellSet(std::move(mask));
}

std::size_t CellSet::size() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<std::size_t> CellSet::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        if (mask_[i]) {
            out.push_back(i);
        }
    }
    return out;
}

CellSet CellSet::complement() const {
    auto mask = mask_;
    mask.flip();
    return CellSet(std::move(mask));
}

// -- TestFunction ------------------------------------------------------------

TestFunction::TestFunction(WindowPtr window, std::vector<double> values)
    : window_(std::move(window)), values_(std::move(values)) {
    if (!window_) {
        throw ParameterError("test function without a window");
    }
    if (values_.size() != window_->cell_count()) {
        throw ParameterError("test function: expected " + std::to_string(window_->cell_count()) +
                             " cell values, got " + std::to_string(values_.size()));
    }
    for (auto v : values_) {
        if (std::isnan(v) || v < 0.0) {
            throw ParameterError("test function values must be nonnegative");
        }
    }
}

TestFunction TestFunction::constant(WindowPtr window, double value) {
    const auto n = window->cell_count();
    return TestFunction(std::move(window), std::vector<double>(n, value));
}

TestFunction TestFunction::indicator(WindowPtr window, const CellSet& cells, double value) {
    std::vector<double> v(window->cell_count(), 0.0);
    for (auto c : cells.indices()) {
        v.at(c) = value;
    }
    return TestFunction(std::move(window), std::move(v));
}

bool TestFunction::is_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double TestFunction::max() const {
    return *std::max_element(values_.begin(), values_.end());
}

CellSet TestFunction::support() const {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] != 0.0) {
            cells.push_back(i);
        }
    }
    return CellSet::of(*window_, cells);
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
    require_same_window(window_, other.window_);
    auto v = values_;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += other.values_[i];
    }
    return TestFunction(window_, std::move(v));
}

TestFunction TestFunction::scaled(double c) const {
    auto v = values_;
    for (auto& x : v) {
        x = weighted(c, x);
    }
    return TestFunction(window_, std::move(v));
}

TestFunction damped(const TestFunction& f, const TestFunction& g) {
    require_same_window(f.window(), g.window());
    if (!f.is_finite()) {
        throw ParameterError("damped: f must be finite");
    }
    std::vector<double> v(f.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(i) * std::exp(-g(i));
    }
    return TestFunction(f.window(), std::move(v));
}

// -- PointConfiguration ------------------------------------------------------

PointConfiguration::PointConfiguration(WindowPtr window) : window_(std::move(window)) {
    if (!window_) {
        throw ParameterError("configuration without a window");
    }
}

PointConfiguration::PointConfiguration(WindowPtr window, std::vector<Point> points)
    : PointConfiguration(std::move(window)) {
    for (const auto& p : points) {
        require_valid_location(*window_, p.loc, "configuration");
        if (p.multiplicity == 0) {
            throw ParameterError("configuration: multiplicity must be at least 1");
        }
    }
    require_distinct_sorted(points, "configuration");
    points_ = std::move(points);
}

PointConfiguration PointConfiguration::merged(WindowPtr window, std::vector<Point> points) {
    PointConfiguration out(std::move(window));
    for (const auto& p : points) {
        require_valid_location(*out.window_, p.loc, "configuration");
        if (p.multiplicity == 0) {
            throw ParameterError("configuration: multiplicity must be at least 1");
        }
    }
    out.points_ = sort_and_merge(std::move(points), [](Point& acc, const Point& p) {
        acc.multiplicity += p.multiplicity;
    });
    return out;
}

std::uint64_t PointConfiguration::total_count() const {
    std::uint64_t n = 0;
    for (const auto& p : points_) {
        n += p.multiplicity;
    }
    return n;
}

// -- AtomicMeasure -----------------------------------------------------------

namespace {
void require_positive_atoms(const Window& w, const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        require_valid_location(w, a.loc, "atomic measure");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
            throw ParameterError("atomic measure: weights must be positive and finite");
        }
    }
}
} // namespace

AtomicMeasure::AtomicMeasure(WindowPtr window) : window_(std::move(window)) {
    if (!window_) {
        throw ParameterError("atomic measure without a window");
    }
}

AtomicMeasure::AtomicMeasure(WindowPtr window, std::vector<Atom> atoms)
    : AtomicMeasure(std::move(window)) {
    require_positive_atoms(*window_, atoms);
    require_distinct_sorted(atoms, "atomic measure");
    atoms_ = std::move(atoms);
}

AtomicMeasure AtomicMeasure::merged(WindowPtr window, std::vector<Atom> atoms) {
    AtomicMeasure out(std::move(window));
    require_positive_atoms(*out.window_, atoms);
    out.atoms_ = sort_and_merge(std::move(atoms), [](Atom& acc, const Atom& a) { acc.weight += a.weight; });
    return out;
}

double AtomicMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) {
        m += a.weight;
    }
    return m;
}

// -- ReferenceMeasure --------------------------------------------------------

ReferenceMeasure::ReferenceMeasure(WindowPtr window, std::vector<double> cell_masses, std::vector<Atom> atoms)
    : window_(std::move(window)), masses_(std::move(cell_masses)) {
    if (!window_) {
        throw ParameterError("reference measure without a window");
    }
    if (masses_.size() != window_->cell_count()) {
        throw ParameterError("reference measure: expected " + std::to_string(window_->cell_count()) +
                             " cell masses, got " + std::to_string(masses_.size()));
    }
    for (auto m : masses_) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw ParameterError("reference measure: cell masses must be nonnegative and finite");
        }
    }
    for (const auto& a : atoms) {
        require_valid_location(*window_, a.loc, "reference measure");
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
            throw ParameterError("reference measure: atom weights must be nonnegative and finite");
        }
    }
    atoms_ = sort_and_merge(std::move(atoms), [](Atom& acc, const Atom& a) { acc.weight += a.weight; });
}

ReferenceMeasure ReferenceMeasure::uniform(WindowPtr window, double total_mass) {
    const auto n = window->cell_count();
    std::vector<double> masses(n);
    if (window->is_discrete()) {
        std::fill(masses.begin(), masses.end(), total_mass / static_cast<double>(n));
    } else {
        double volume = 1.0;
        for (const auto& b : window->bounds()) {
            volume *= b.hi - b.lo;
        }
        for (std::size_t c = 0; c < n; ++c) {
            masses[c] = total_mass * window->cell_volume(c) / volume;
        }
    }
    return ReferenceMeasure(std::move(window), std::move(masses));
}

ReferenceMeasure ReferenceMeasure::zero(WindowPtr window) {
    const auto n = window->cell_count();
    return ReferenceMeasure(std::move(window), std::vector<double>(n, 0.0));
}

double ReferenceMeasure::diffuse_mass() const {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double ReferenceMeasure::total_mass() const {
    double m = diffuse_mass();
    for (const auto& a : atoms_) {
        m += a.weight;
    }
    return m;
}

double ReferenceMeasure::mass(const CellSet& cells) const {
    if (cells.universe_size() != masses_.size()) {
        throw WindowMismatch("cell set belongs to a different window");
    }
    double m = 0.0;
    for (std::size_t c = 0; c < masses_.size(); ++c) {
        if (cells.contains(c)) {
            m += masses_[c];
        }
    }
    for (const auto& a : atoms_) {
        if (cells.contains(a.loc.cell)) {
            m += a.weight;
        }
    }
    return m;
}

ReferenceMeasure ReferenceMeasure::scaled(double c) const {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ParameterError("reference measure: scale factor must be nonnegative and finite");
    }
    auto masses = masses_;
    for (auto& m : masses) {
        m *= c;
    }
    auto atoms = atoms_;
    for (auto& a : atoms) {
        a.weight *= c;
    }
    return ReferenceMeasure(window_, std::move(masses), std::move(atoms));
}

ReferenceMeasure ReferenceMeasure::operator+(const ReferenceMeasure& other) const {
    require_same_window(window_, other.window_);
    auto masses = masses_;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        masses[i] += other.masses_[i];
    }
    auto atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    return ReferenceMeasure(window_, std::move(masses), std::move(atoms));
}

// -- integrals and counts ----------------------------------------------------

double zeta(const PointConfiguration& mu, const TestFunction& f) {
    require_same_window(mu.window(), f.window());
    double s = 0.0;
    for (const auto& p : mu.points()) {
        s += static_cast<double>(p.multiplicity) * f(p.loc.cell);
    }
    return s;
}

double zeta(const AtomicMeasure& kappa, const TestFunction& f) {
    require_same_window(kappa.window(), f.window());
    double s = 0.0;
    for (const auto& a : kappa.atoms()) {
        s += a.weight * f(a.loc.cell);
    }
    return s;
}

double zeta(const ReferenceMeasure& rho, const TestFunction& f) {
    require_same_window(rho.window(), f.window());
    double s = 0.0;
    const auto masses = rho.cell_masses();
    for (std::size_t c = 0; c < masses.size(); ++c) {
        s += weighted(masses[c], f(c));
    }
    for (const auto& a : rho.atoms()) {
        s += weighted(a.weight, f(a.loc.cell));
    }
    return s;
}

std::uint64_t count(const PointConfiguration& mu, const CellSet& cells) {
    if (cells.universe_size() != mu.window()->cell_count()) {
        throw WindowMismatch("cell set belongs to a different window");
    }
    std::uint64_t n = 0;
    for (const auto& p : mu.points()) {
        if (cells.contains(p.loc.cell)) {
            n += p.multiplicity;
        }
    }
    return n;
}

std::uint64_t distinct_count(const PointConfiguration& mu, const CellSet& cells) {
    if (cells.universe_size() != mu.window()->cell_count()) {
        throw WindowMismatch("cell set belongs to a different window");
    }
    std::uint64_t n = 0;
    for (const auto& p : mu.points()) {
        if (cells.contains(p.loc.cell)) {
            ++n;
        }
    }
    return n;
}

ReferenceMeasure superpose(const ReferenceMeasure& rho, const PointConfiguration& mu) {
    require_same_window(rho.window(), mu.window());
    std::vector<Atom> atoms(rho.atoms().begin(), rho.atoms().end());
    for (const auto& p : mu.points()) {
        atoms.push_back({p.loc, static_cast<double>(p.multiplicity)});
    }
    std::vector<double> masses(rho.cell_masses().begin(), rho.cell_masses().end());
    return ReferenceMeasure(rho.window(), std::move(masses), std::move(atoms));
}

ReferenceMeasure as_reference(const PointConfiguration& mu) {
    return superpose(ReferenceMeasure::zero(mu.window()), mu);
}

} // namespace polya
