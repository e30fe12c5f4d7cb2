#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mokit/young.hpp"

namespace mokit {

/// A non-atomic cell: representative point and mass.
struct Cell {
    double t;
    double mass;
};

/// A singleton atom {point} with positive mass.
struct Atom {
    double point;
    double mass;
};

/// Discretized sigma-finite measure space. Points are indexed 0..size()-1:
/// cells first, then atoms. Integrals over it are exact finite sums.
///
/// Cells may share a representative (a cell split into equal-mass copies
/// models the non-atomic part); atoms are pairwise distinct.
class MeasureSpace {
public:
    MeasureSpace(std::vector<Cell> cells, std::vector<Atom> atoms = {});

    /// n equal cells on [lo, hi) represented by their midpoints.
    static MeasureSpace uniform(double lo, double hi, std::size_t n_cells);

    std::size_t size() const noexcept { return cells_.size() + atoms_.size(); }
    std::size_t n_cells() const noexcept { return cells_.size(); }
    std::size_t n_atoms() const noexcept { return atoms_.size(); }
    bool is_atom(std::size_t i) const noexcept { return i >= cells_.size(); }
    double point(std::size_t i) const;
    double mass(std::size_t i) const;
    double total_mass() const noexcept;

    std::span<const Cell> cells() const noexcept { return cells_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }

    /// Replaces cell i by pieces[i] equal-mass copies (pieces.size() == n_cells()).
    /// `parent` receives, for every point of the result, its index here.
    MeasureSpace split_cells(std::span<const std::size_t> pieces, std::vector<std::size_t>& parent) const;

    friend bool operator==(const MeasureSpace& a, const MeasureSpace& b);

private:
    std::vector<Cell> cells_;
    std::vector<Atom> atoms_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

inline SpacePtr make_space(MeasureSpace s) { return std::make_shared<const MeasureSpace>(std::move(s)); }

/// Sorted, duplicate-free point indices of one space.
using PointSet = std::vector<std::size_t>;

/// Throws DomainError unless `set` is sorted, duplicate-free and inside `space`.
void check_aligned(const MeasureSpace& space, const PointSet& set);

PointSet all_points(const MeasureSpace& space);
PointSet all_cells(const MeasureSpace& space);

/// Step function on a space: one finite value per cell and atom.
class SimpleFunction {
public:
    SimpleFunction(SpacePtr space, std::vector<double> values, bool allow_signed = false);

    static SimpleFunction zero(SpacePtr space);
    static SimpleFunction constant(SpacePtr space, double c);

    const MeasureSpace& space() const noexcept { return *space_; }
    const SpacePtr& space_ptr() const noexcept { return space_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    bool is_signed() const noexcept { return signed_; }
    bool is_zero() const noexcept;

    PointSet support() const;
    SimpleFunction abs() const;
    SimpleFunction scaled(double c) const;

    /// Pointwise product; both factors must live on the same space.
    friend SimpleFunction operator*(const SimpleFunction& a, const SimpleFunction& b);

private:
    SpacePtr space_;
    std::vector<double> values_;
    bool signed_;
};

/// Throws DomainError unless a and b are defined on the same space.
void check_same_space(const SimpleFunction& a, const SimpleFunction& b);

SimpleFunction indicator(const SpacePtr& space, const PointSet& set);
/// x * chi_F
SimpleFunction restrict(const SimpleFunction& x, const PointSet& set);

enum class Region { Omega00, Omega0Inf, OmegaInf0, OmegaInfInf, Atom };

std::string_view region_name(Region r) noexcept;

/// Labels of the four-way split of the non-atomic part by finiteness of
/// (b_{phi1}, b_phi); atoms carry Region::Atom.
struct DomainClassification {
    std::vector<Region> labels;
    std::vector<ExtReal> b_phi;
    std::vector<ExtReal> b_phi1;

    bool in_omega_inf(std::size_t i) const {
        return labels[i] == Region::OmegaInf0 || labels[i] == Region::OmegaInfInf;
    }
    std::size_t count(Region r) const;
};

/// Classifies every point. Throws PreconditionError when b_{phi1} = 0 at some
/// point (supp L^{phi1} is then not the whole space).
DomainClassification classify(const MeasureSpace& space, const MOFunction& phi, const MOFunction& phi1);

}  // namespace mokit
