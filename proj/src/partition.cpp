#include "mokit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mokit/errors.hpp"
#include "mokit/spaces.hpp"

namespace mokit {

namespace {

struct Layered {
    std::size_t cell;
    long long layer_k;     // dyadic layer (bounded case), 0 otherwise
    std::size_t n;         // pieces of this layer have mass <= 1/n
    double bound;          // norm bound of the cell's pieces before the max over b
};

void check_input(const MeasureSpace& space, const PointSet& cells) {
    check_aligned(space, cells);
    for (std::size_t i : cells) {
        if (space.is_atom(i)) throw PreconditionError("partition: input contains atom " + std::to_string(i));
    }
}

std::size_t layer_of(double phi_value) {
    const double n = std::floor(phi_value) + 1.0;
    if (!(n < 1e15)) throw DomainError("partition: phi value too large to index a layer");
    return static_cast<std::size_t>(n);
}

// Splits cells to mass <= 1/n and packs the copies of each (k, n) group first-fit
// into pieces of mass <= 1/n, in input order.
Partition build(const SpacePtr& space, const std::vector<Layered>& items, const MOFunction& phi,
                const std::vector<double>& b_of_cell) {
    const MeasureSpace& sp = *space;
    std::vector<std::size_t> counts(sp.n_cells(), 1);
    std::size_t total = 0;
    for (const Layered& it : items) {
        const double m = std::ceil(sp.mass(it.cell) * static_cast<double>(it.n));
        if (!(m < static_cast<double>(kMaxPartitionPieces))) throw DomainError("partition: too many pieces required");
        counts[it.cell] = std::max<std::size_t>(1, static_cast<std::size_t>(m));
        total += counts[it.cell];
        if (total > kMaxPartitionPieces) throw DomainError("partition: too many pieces required");
    }
    Partition out;
    out.refined = make_space(sp.split_cells(counts, out.parent));

    // first refined index of each original cell
    std::vector<std::size_t> first(sp.n_cells(), 0);
    for (std::size_t r = out.parent.size(); r-- > 0;) {
        if (out.parent[r] < sp.n_cells()) first[out.parent[r]] = r;
    }

    std::map<std::pair<long long, std::size_t>, std::vector<const Layered*>> groups;
    for (const Layered& it : items) groups[{it.layer_k, it.n}].push_back(&it);

    for (const auto& [key, members] : groups) {
        const double cap = 1.0 / static_cast<double>(key.second);
        PointSet cur;
        double mass = 0.0;
        double bmax = 0.0;
        double bound = 0.0;
        auto flush = [&] {
            if (cur.empty()) return;
            std::sort(cur.begin(), cur.end());
            out.pieces.push_back(cur);
            out.bounds.push_back(bmax > 0.0 ? 2.0 / bmax : bound);
            cur.clear();
            mass = 0.0;
            bmax = 0.0;
        };
        for (const Layered* it : members) {
            bound = it->bound;
            for (std::size_t k = 0; k < counts[it->cell]; ++k) {
                const std::size_t r = first[it->cell] + k;
                const double m = out.refined->mass(r);
                if (!cur.empty() && mass + m > cap) flush();
                cur.push_back(r);
                mass += m;
                bmax = std::max(bmax, b_of_cell[it->cell]);
            }
        }
        flush();
    }

    const BoundFunction f(phi, out.refined);
    out.norms.resize(out.pieces.size());
    for (std::size_t p = 0; p < out.pieces.size(); ++p) {
        out.norms[p] = luxemburg_norm(f, indicator(out.refined, out.pieces[p])).value;
    }
    return out;
}

}  // namespace

Partition partition_unbounded(const SpacePtr& space, const PointSet& cells, const MOFunction& phi, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("partition_unbounded: a must be finite and > 0");
    check_input(*space, cells);
    std::vector<Layered> items;
    std::vector<double> b(space->n_cells(), 0.0);
    for (std::size_t i : cells) {
        const double t = space->point(i);
        if (phi.b_param(t).is_finite()) {
            throw PreconditionError("partition_unbounded: b_phi is finite at cell " + std::to_string(i));
        }
        items.push_back({i, 0, layer_of(phi.eval(t, a).value()), 1.0 / a});
    }
    return build(space, items, phi, b);
}

Partition partition_bounded(const SpacePtr& space, const PointSet& cells, const MOFunction& phi) {
    check_input(*space, cells);
    std::vector<Layered> items;
    std::vector<double> b(space->n_cells(), 0.0);
    for (std::size_t i : cells) {
        const double t = space->point(i);
        const ExtReal bt = phi.b_param(t);
        if (bt.is_zero() || bt.is_infinite()) {
            throw PreconditionError("partition_bounded: b_phi must be finite and > 0 at cell " + std::to_string(i));
        }
        b[i] = bt.value();
        long long k = static_cast<long long>(std::ceil(std::log2(b[i])));
        // enforce 2^(k-1) < b <= 2^k against rounding in log2
        while (std::ldexp(1.0, static_cast<int>(k)) < b[i]) ++k;
        while (std::ldexp(1.0, static_cast<int>(k - 1)) >= b[i]) --k;
        const double half = std::ldexp(1.0, static_cast<int>(k - 1));
        items.push_back({i, k, layer_of(phi.eval(t, half).value()), 0.0});
    }
    return build(space, items, phi, b);
}

}  // namespace mokit
