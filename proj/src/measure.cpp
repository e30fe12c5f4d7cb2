#include "mokit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mokit/errors.hpp"

namespace mokit {

MeasureSpace::MeasureSpace(std::vector<Cell> cells, std::vector<Atom> atoms)
    : cells_(std::move(cells)), atoms_(std::move(atoms)) {
    for (const auto& c : cells_) {
        if (!(c.mass > 0.0) || !std::isfinite(c.mass)) throw DomainError("cell mass must be finite and > 0");
        if (!std::isfinite(c.t)) throw DomainError("cell representative must be finite");
    }
    std::set<double> seen;
    for (const auto& a : atoms_) {
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw DomainError("atom mass must be finite and > 0");
        if (!std::isfinite(a.point)) throw DomainError("atom point must be finite");
        if (!seen.insert(a.point).second) throw DomainError("atoms must be pairwise distinct");
    }
    for (const auto& c : cells_) {
        if (seen.count(c.t)) throw DomainError("atom point coincides with a cell representative");
    }
}

MeasureSpace MeasureSpace::uniform(double lo, double hi, std::size_t n_cells) {
    if (!(hi > lo) || n_cells == 0) throw DomainError("uniform: need lo < hi and n_cells > 0");
    std::vector<Cell> cells;
    cells.reserve(n_cells);
    const double h = (hi - lo) / static_cast<double>(n_cells);
    for (std::size_t j = 0; j < n_cells; ++j) {
        cells.push_back({lo + (static_cast<double>(j) + 0.5) * h, h});
    }
    return MeasureSpace(std::move(cells));
}

double MeasureSpace::point(std::size_t i) const {
    if (i < cells_.size()) return cells_[i].t;
    if (i < size()) return atoms_[i - cells_.size()].point;
    throw DomainError("point index out of range");
}

double MeasureSpace::mass(std::size_t i) const {
    if (i < cells_.size()) return cells_[i].mass;
    if (i < size()) return atoms_[i - cells_.size()].mass;
    throw DomainError("point index out of range");
}

double MeasureSpace::total_mass() const noexcept {
    double s = 0.0;
    for (const auto& c : cells_) s += c.mass;
    for (const auto& a : atoms_) s += a.mass;
    return s;
}

MeasureSpace MeasureSpace::split_cells(std::span<const std::size_t> pieces, std::vector<std::size_t>& parent) const {
    if (pieces.size() != cells_.size()) throw DomainError("split_cells: one piece count per cell required");
    std::vector<Cell> out;
    parent.clear();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const std::size_t m = pieces[i];
        if (m == 0) throw DomainError("split_cells: piece count must be >= 1");
        const double piece_mass = cells_[i].mass / static_cast<double>(m);
        for (std::size_t k = 0; k < m; ++k) {
            out.push_back({cells_[i].t, piece_mass});
            parent.push_back(i);
        }
    }
    for (std::size_t j = 0; j < atoms_.size(); ++j) parent.push_back(cells_.size() + j);
    return MeasureSpace(std::move(out), atoms_);
}

bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
    auto cell_eq = [](const Cell& x, const Cell& y) { return x.t == y.t && x.mass == y.mass; };
    auto atom_eq = [](const Atom& x, const Atom& y) { return x.point == y.point && x.mass == y.mass; };
    return std::equal(a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end(), cell_eq) &&
           std::equal(a.atoms_.begin(), a.atoms_.end(), b.atoms_.begin(), b.atoms_.end(), atom_eq);
}

void check_aligned(const MeasureSpace& space, const PointSet& set) {
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] >= space.size()) throw DomainError("point set not aligned to space: index out of range");
        if (k > 0 && set[k] <= set[k - 1]) throw DomainError("point set must be sorted and duplicate-free");
    }
}

PointSet all_points(const MeasureSpace& space) {
    PointSet s(space.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
}

PointSet all_cells(const MeasureSpace& space) {
    PointSet s(space.n_cells());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
}

// ----------------------------------------------------------------------------

SimpleFunction::SimpleFunction(SpacePtr space, std::vector<double> values, bool allow_signed)
    : space_(std::move(space)), values_(std::move(values)), signed_(allow_signed) {
    if (!space_) throw DomainError("simple function without a space");
    if (values_.size() != space_->size()) {
        throw DomainError("simple function has " + std::to_string(values_.size()) + " values for a space of " +
                          std::to_string(space_->size()) + " points");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("simple function values must be finite");
        if (!signed_ && v < 0.0) throw DomainError("negative value in a nonnegative simple function");
    }
}

SimpleFunction SimpleFunction::zero(SpacePtr space) {
    const std::size_t n = space->size();
    return SimpleFunction(std::move(space), std::vector<double>(n, 0.0));
}

SimpleFunction SimpleFunction::constant(SpacePtr space, double c) {
    const std::size_t n = space->size();
    return SimpleFunction(std::move(space), std::vector<double>(n, c), c < 0.0);
}

bool SimpleFunction::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

PointSet SimpleFunction::support() const {
    PointSet s;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] != 0.0) s.push_back(i);
    }
    return s;
}

SimpleFunction SimpleFunction::abs() const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [](double x) { return std::abs(x); });
    return SimpleFunction(space_, std::move(v));
}

SimpleFunction SimpleFunction::scaled(double c) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [c](double x) { return c * x; });
    return SimpleFunction(space_, std::move(v), signed_ || c < 0.0);
}

void check_same_space(const SimpleFunction& a, const SimpleFunction& b) {
    if (a.space_ptr() != b.space_ptr() && !(a.space() == b.space())) {
        throw DomainError("simple functions live on different spaces");
    }
}

SimpleFunction operator*(const SimpleFunction& a, const SimpleFunction& b) {
    check_same_space(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return SimpleFunction(a.space_ptr(), std::move(v), a.is_signed() || b.is_signed());
}

SimpleFunction indicator(const SpacePtr& space, const PointSet& set) {
    check_aligned(*space, set);
    std::vector<double> v(space->size(), 0.0);
    for (std::size_t i : set) v[i] = 1.0;
    return SimpleFunction(space, std::move(v));
}

SimpleFunction restrict(const SimpleFunction& x, const PointSet& set) {
    check_aligned(x.space(), set);
    std::vector<double> v(x.size(), 0.0);
    for (std::size_t i : set) v[i] = x[i];
    return SimpleFunction(x.space_ptr(), std::move(v), x.is_signed());
}

// ----------------------------------------------------------------------------

std::string_view region_name(Region r) noexcept {
    switch (r) {
        case Region::Omega00: return "omega_0_0";
        case Region::Omega0Inf: return "omega_0_inf";
        case Region::OmegaInf0: return "omega_inf_0";
        case Region::OmegaInfInf: return "omega_inf_inf";
        case Region::Atom: return "atom";
    }
    return "?";
}

std::size_t DomainClassification::count(Region r) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r));
}

DomainClassification classify(const MeasureSpace& space, const MOFunction& phi, const MOFunction& phi1) {
    DomainClassification dc;
    dc.labels.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double t = space.point(i);
        const ExtReal b1 = phi1.b_param(t);
        const ExtReal b = phi.b_param(t);
        if (b1.is_zero()) {
            throw PreconditionError("supp L^phi1 is not the whole space: b_phi1 = 0 at point " + std::to_string(i) +
                                    " (t=" + std::to_string(t) + ")");
        }
        dc.b_phi.push_back(b);
        dc.b_phi1.push_back(b1);
        if (space.is_atom(i)) {
            dc.labels.push_back(Region::Atom);
        } else if (b1.is_infinite()) {
            dc.labels.push_back(b.is_infinite() ? Region::Omega00 : Region::Omega0Inf);
        } else {
            dc.labels.push_back(b.is_infinite() ? Region::OmegaInf0 : Region::OmegaInfInf);
        }
    }
    return dc;
}

}  // namespace mokit
