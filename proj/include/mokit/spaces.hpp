#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mokit/conjugate.hpp"
#include "mokit/ext_real.hpp"
#include "mokit/field.hpp"
#include "mokit/kernels.hpp"
#include "mokit/measure.hpp"

namespace mokit {

/// I_phi(x): exact finite sum of phi(t, |x|) * mass over cells and atoms.
ExtReal modular(const YoungField& phi, const SimpleFunction& x, kernels::Exec exec = kernels::Exec::Parallel);
ExtReal modular(const MOFunction& phi, const SimpleFunction& x, kernels::Exec exec = kernels::Exec::Parallel);

struct NormResult {
    double value = 0.0;   // upper end of the final bracket; +inf when no finite lambda works
    double lo = 0.0;      // I(x / lo) > 1 (or lo = 0)
    double hi = 0.0;      // I(x / hi) <= 1
    std::size_t iterations = 0;
    bool infinite = false;
};

/// Luxemburg norm inf{lambda > 0 : I_phi(x / lambda) <= 1}: doubling or
/// halving from lambda = 1 to a bracket, then bisection down to
/// hi - lo <= rel_tol * hi.
NormResult luxemburg_norm(const YoungField& phi, const SimpleFunction& x, double rel_tol = 1e-10,
                          kernels::Exec exec = kernels::Exec::Parallel);
NormResult luxemburg_norm(const MOFunction& phi, const SimpleFunction& x, double rel_tol = 1e-10,
                          kernels::Exec exec = kernels::Exec::Parallel);

/// max |x_i| * v_i. Weights may be +inf; they must be > 0 on supp x.
ExtReal weighted_sup_norm(const SimpleFunction& x, std::span<const double> weights);

/// Smallest c >= 1 with |x| <= c * b_phi for every x in the unit ball, over the
/// points with finite b_phi. On a discretized space the extreme x are the
/// normalized single-point indicators, so the value is exact.
double inclusion_constant(const YoungField& phi);

struct MultiplierOptions {
    std::size_t budget = 64;                      // random candidates
    std::uint64_t seed = 0;
    std::vector<double> truncations{2.0, 8.0, 64.0};
    std::vector<double> witness_scales{0.25, 0.5, 1.0, 2.0, 4.0};
    std::size_t max_indicators = 256;             // single-point candidates
};

struct MultiplierWitness {
    std::string kind;        // "construction", "indicator" or "random"
    double ratio = 0.0;
    std::vector<double> x;
};

/// Interval [lower, upper] for the multiplier norm of y from L^phi1 into L^phi.
struct MultiplierEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double conj_norm = 0.0;
    bool upper_certified = true;   // false when the support of y contains atoms
    MultiplierWitness witness;
    std::size_t candidates = 0;
    std::uint64_t seed = 0;
};

MultiplierEstimate multiplier_norm(const MOFunction& phi1, const MOFunction& phi, const SimpleFunction& y,
                                   const MultiplierOptions& opts = {});

struct ProductBound {
    double value = 0.0;
    std::string via;              // "split", "exponent" or "zero"
    double split_value = kInf;    // +inf when the split was not available
    double exponent_value = kInf;
    double best_theta = 0.0;
    bool split_ok = false;
    std::string split_error;
};

/// Upper bound on inf{ ||x||_phi0 ||y||_phi1 : z = x y }: the better of the
/// constructive split (needs the target phi) and z0 = z^theta, z1 = z / z0
/// for theta in {0, 0.1, ..., 1}.
ProductBound product_quasinorm_upper(const YoungField& phi0, const YoungField& phi1, const SimpleFunction& z,
                                     const YoungField* phi = nullptr);

}  // namespace mokit
