#pragma once

#include <cstddef>
#include <vector>

#include "mokit/measure.hpp"
#include "mokit/young.hpp"

namespace mokit {

/// Pairwise disjoint pieces of a set of cells, on a refinement of the input
/// space in which some cells were split into equal-mass copies.
struct Partition {
    SpacePtr refined;                  // every original point, split cells replaced by their copies
    std::vector<std::size_t> parent;   // refined index -> original index
    std::vector<PointSet> pieces;      // index sets in `refined`
    std::vector<double> bounds;        // norm bound claimed for each piece
    std::vector<double> norms;         // measured ||chi_A||_phi of each piece
};

/// Pieces A with ||chi_A||_phi <= 1/a, for cells with b_phi = inf.
///
/// Cells are grouped by n = floor(phi(t, a)) + 1 and split so that every piece
/// of group n has mass <= 1/n. Throws DomainError for a <= 0 and
/// PreconditionError for an input cell with finite b_phi or an atom.
Partition partition_unbounded(const SpacePtr& space, const PointSet& cells, const MOFunction& phi, double a);

/// Pieces A with ||chi_A||_phi <= 2 / max_A b_phi, for cells with 0 < b_phi < inf.
///
/// Cells are grouped by k with 2^(k-1) < b_phi <= 2^k and then by
/// n = floor(phi(t, 2^(k-1))) + 1, split to mass <= 1/n.
Partition partition_bounded(const SpacePtr& space, const PointSet& cells, const MOFunction& phi);

/// Refuses partitions needing more pieces than this.
inline constexpr std::size_t kMaxPartitionPieces = 10'000'000;

}  // namespace mokit
