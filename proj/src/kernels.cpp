#include "mokit/kernels.hpp"

#include <cmath>

namespace mokit::kernels {

void modular_terms(const YoungField& phi, std::span<const double> x, double scale, std::span<ExtReal> terms,
                   Exec exec) {
    const MeasureSpace& space = *phi.space();
    if (x.size() != space.size() || terms.size() != space.size()) {
        throw DomainError("modular: function not aligned to the space of phi");
    }
    for_each_index(
        x.size(),
        [&](std::size_t i) {
            const double v = std::abs(x[i]) * scale;
            terms[i] = v == 0.0 ? ExtReal::zero() : phi.value(i, v) * ExtReal(space.mass(i));
        },
        exec);
}

ExtReal modular_sum(const YoungField& phi, std::span<const double> x, double scale, Exec exec) {
    std::vector<ExtReal> terms(x.size());
    modular_terms(phi, x, scale, terms, exec);
    ExtReal s;
    for (const ExtReal& v : terms) s += v;
    return s;
}

std::vector<ExtReal> tabulate(const YoungField& f, std::span<const std::size_t> points, std::span<const double> u_grid,
                              Exec exec) {
    const std::size_t nu = u_grid.size();
    std::vector<ExtReal> out(points.size() * nu);
    for_each_index(
        out.size(), [&](std::size_t k) { out[k] = f.value(points[k / nu], u_grid[k % nu]); }, exec);
    return out;
}

}  // namespace mokit::kernels
