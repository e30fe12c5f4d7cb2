#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mokit {

/// Controls the one-dimensional supremum search behind every conjugate value.
struct SupSolverConfig {
    std::size_t coarse_grid = 512;    // samples of the coarse scan (half linear, half log)
    std::size_t refine_rounds = 40;   // golden-section rounds per kept local maximum
    double rel_tol = 1e-9;            // stop width of a refinement, relative to s
    double endpoint_margin = 1e-12;   // open right endpoint b is sampled at (1 - margin) b
    double overflow_cap = 1e30;       // unbounded-range values beyond this count as divergence
    double equality_tol = 1e-8;       // relative residual accepted by the maximizer's equality scan
    std::size_t keep_best = 5;        // local maxima refined per scan

    /// Throws DomainError on non-positive fields or coarse_grid < 8.
    void validate() const;
};

namespace detail {

/// Objective of a supremum search. Returns +inf where the first term is
/// infinite (the supremum is then infinite) and -inf where s is not admissible.
using Objective = std::function<double(double)>;

struct SupResult {
    double value = 0.0;
    double argmax = 0.0;
    bool infinite = false;
    std::vector<double> maxima;  // refined local maximizers, best first
};

/// sup of g over [0, S], S finite.
SupResult sup_compact(const Objective& g, double S, const SupSolverConfig& cfg);

/// sup of g over [0, inf): compact sup on [0, 1], then doubling segments
/// [A, 2A]; divergence once the running sup exceeds the overflow cap on two
/// consecutive doublings. After 40 doublings without improvement, a ladder of
/// probes at A * 10^(10 j) decides whether to continue or stop.
SupResult sup_unbounded(const Objective& g, const SupSolverConfig& cfg);

/// Coarse scan points used by sup_compact: 0, a linear grid, and a log grid
/// from S * 1e-12 to S.
std::vector<double> scan_grid(double S, std::size_t n);

}  // namespace detail

}  // namespace mokit
