#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mokit/conjugate.hpp"
#include "mokit/field.hpp"
#include "mokit/measure.hpp"
#include "mokit/spaces.hpp"

namespace mokit {

/// One grid point of an inverse comparison. R = phi^{-1}(t, u),
/// L = phi1^{-1}(t, u) * phi0^{-1}(t, u), ratio = R / L (0 or +inf allowed).
struct ComparisonPoint {
    std::size_t point = 0;
    double t = 0.0;
    double u = 0.0;
    ExtReal R;
    ExtReal L;
    double ratio = 0.0;
};

/// Outcome of scanning C * L <= R (prec) and D * L >= R (succ) on a grid.
struct ComparisonReport {
    double best_C_lower = 0.0;        // min ratio: largest C with C L <= R on the grid
    double best_C_upper = kInf;       // max ratio: smallest D with D L >= R on the grid
    bool prec_holds = false;          // best_C_lower > 0
    bool succ_holds = false;          // best_C_upper < inf
    bool approx_holds() const { return prec_holds && succ_holds; }
    std::optional<ComparisonPoint> prec_witness;   // where the minimum ratio is attained
    std::optional<ComparisonPoint> succ_witness;   // where the maximum ratio is attained
    std::size_t evaluated = 0;
    std::size_t skipped_zero = 0;       // R = L = 0
    std::size_t skipped_infinite = 0;   // R = L = inf
    std::vector<double> u_grid;
};

/// 0 plus 121 log-spaced points 1e-6 .. 1e6.
std::vector<double> default_u_grid();

/// Scans every point of the space against u_grid. Throws DomainError when
/// no grid point has a determinate ratio.
ComparisonReport compare_inverses(const YoungField& phi, const YoungField& phi0, const YoungField& phi1,
                                  std::span<const double> u_grid);

/// Evaluates the ratio R / L at one (point, u); used to replay witnesses.
ComparisonPoint comparison_at(const YoungField& phi, const YoungField& phi0, const YoungField& phi1, std::size_t i,
                              double u);

/// z = z0 * z1 with modular bounds for the factors.
struct FactorPair {
    SimpleFunction z0;
    SimpleFunction z1;
    double D_given = 0.0;       // constant passed in (0: none)
    double D_attained = 0.0;    // max of z / (phi0^{-1} phi1^{-1})(phi(z)) on the scaled z
    double D_used = 0.0;        // constant of the modular check
    double prescale = 1.0;      // kappa: the construction ran on kappa * z
    double c = 1.0;             // inclusion constant used by the prescaling
    double modular_z = 0.0;     // I_phi(kappa z)
    double modular_0 = 0.0;     // I_phi0(kappa z0 / sqrt(D_used))
    double modular_1 = 0.0;     // I_phi1(z1 / sqrt(D_used))
    bool modular_ok = false;
    double norm_0 = 0.0;        // ||z0||_phi0
    double norm_1 = 0.0;        // ||z1||_phi1
};

/// Splits z >= 0 as z0 * z1 from y = phi(kappa z): z_i = phi_i^{-1}(y) *
/// sqrt(kappa z / (phi0^{-1}(y) phi1^{-1}(y))), then z0 is divided by kappa,
/// where kappa scales z to norm 2 / (3c). D <= 0 selects the attained value.
/// Throws SolverFailure listing the points where phi0^{-1} phi1^{-1} vanishes
/// or is infinite on supp z.
FactorPair factor_split(const YoungField& phi, const YoungField& phi0, const YoungField& phi1, const SimpleFunction& z,
                        double D = 0.0);

struct VerifyOptions {
    std::size_t samples = 200;
    std::uint64_t seed = 0;
    double holder_constant = 2.0;   // (subset) direction: ||xy|| <= 2 ||x|| ||y||
    double k_limit = 4.0;           // (superset) direction: product bound <= k_limit ||z||
    double tolerance = 1e-9;
};

struct VerifySample {
    std::size_t index = 0;
    double ratio = 0.0;
    std::vector<double> a;   // x (subset) or z (superset)
    std::vector<double> b;   // y (subset) or empty
};

struct VerifyReport {
    bool subset_pass = false;
    bool superset_pass = false;
    bool passed() const { return subset_pass && superset_pass; }
    double worst_subset_ratio = 0.0;
    double worst_K = 0.0;
    std::size_t subset_samples = 0;
    std::size_t superset_samples = 0;
    std::size_t split_fallbacks = 0;   // samples where only the exponent heuristic applied
    std::optional<VerifySample> subset_witness;
    std::optional<VerifySample> superset_witness;
    ComparisonReport comparison;       // conjugate against phi, phi1
    double c = 1.0;
    std::optional<double> k_bound;     // 1.5 c D when succ holds on the grid
    std::uint64_t seed = 0;
};

/// Sampled check of L^{phi ominus phi1} . L^{phi1} = L^phi in both directions.
VerifyReport factorization_verify(const MOFunction& phi1, const MOFunction& phi, const SpacePtr& space,
                                  const VerifyOptions& opts = {});

}  // namespace mokit
