#pragma once

// Loop kernels with a serial reference and an OpenMP version. Both orders of
// evaluation produce bit-identical results: parallel loops only fill
// per-index slots, and every reduction runs serially in index order.

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include <omp.h>

#include "mokit/ext_real.hpp"
#include "mokit/field.hpp"
#include "mokit/measure.hpp"

namespace mokit::kernels {

enum class Exec { Serial, Parallel };

/// Loops shorter than this run serially even under Exec::Parallel.
inline constexpr std::size_t kParallelThreshold = 64;

/// Calls fn(i) for i in [0, n). Under Exec::Parallel the iterations run on the
/// OpenMP team; an exception thrown by any iteration is rethrown after the
/// loop, choosing the lowest failing index so both modes report the same error.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, Exec exec = Exec::Parallel) {
    if (exec == Exec::Serial || n < kParallelThreshold || omp_in_parallel()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex m;
    std::size_t first_bad = n;
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            fn(i);
        } catch (...) {
            std::lock_guard lock(m);
            if (i < first_bad) {
                first_bad = i;
                err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

/// terms[i] = phi(t_i, |x_i| * scale) * mass_i, with 0 * inf = 0.
void modular_terms(const YoungField& phi, std::span<const double> x, double scale, std::span<ExtReal> terms,
                   Exec exec);

/// Sum of modular_terms in index order.
ExtReal modular_sum(const YoungField& phi, std::span<const double> x, double scale, Exec exec);

/// Values f(point, u) over points x u_grid, row-major by point.
std::vector<ExtReal> tabulate(const YoungField& f, std::span<const std::size_t> points, std::span<const double> u_grid,
                              Exec exec);

}  // namespace mokit::kernels
