#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mokit/ext_real.hpp"
#include "mokit/field.hpp"
#include "mokit/measure.hpp"
#include "mokit/sup_solver.hpp"
#include "mokit/young.hpp"

namespace mokit {

/// Automatic uses the exact infinity test and the closed-form routes where the
/// families allow; Generic forces the sampled supremum (for cross-checks).
enum class Route { Automatic, Generic };

/// The pair (phi, phi1) on a space, optionally truncated at level a.
///
/// Evaluates the conjugate  sup{ phi(t, s u) - phi1(t, s) : s in range(t) }.
/// Construction classifies the space and fails with PreconditionError when
/// b_{phi1} vanishes somewhere.
class ConjugateSpec {
public:
    ConjugateSpec(MOFunction phi, MOFunction phi1, SpacePtr space, std::optional<double> truncation = std::nullopt,
                  SupSolverConfig solver = {});

    ConjugateSpec truncated(double a) const;
    ConjugateSpec untruncated() const;
    ConjugateSpec with_solver(SupSolverConfig solver) const;

    const MOFunction& phi() const noexcept { return phi_; }
    const MOFunction& phi1() const noexcept { return phi1_; }
    const SpacePtr& space() const noexcept { return space_; }
    const DomainClassification& classification() const noexcept { return cls_; }
    const SupSolverConfig& solver() const noexcept { return solver_; }
    bool is_truncated() const noexcept { return truncation_.has_value(); }
    /// Truncation level; throws PreconditionError when untruncated.
    double truncation() const;

    std::string describe() const;

private:
    MOFunction phi_;
    MOFunction phi1_;
    SpacePtr space_;
    std::optional<double> truncation_;
    SupSolverConfig solver_;
    DomainClassification cls_;
};

/// s-interval [0, hi] (closed) or [0, hi) (open) of the supremum at one point.
struct SRange {
    double hi;
    bool closed;
};

SRange s_range(const ConjugateSpec& spec, std::size_t i);

/// Conjugate value with the location of the best s found.
struct ConjugatePoint {
    ExtReal value;
    double argmax = 0.0;
    std::vector<double> maxima;
    bool analytic = false;   // closed-form route taken
};

ConjugatePoint ominus_detail(const ConjugateSpec& spec, std::size_t i, double u, Route route = Route::Automatic);

/// Conjugate at point i; truncated when spec is truncated.
ExtReal ominus(const ConjugateSpec& spec, std::size_t i, double u, Route route = Route::Automatic);

/// Truncated conjugate; throws PreconditionError when spec carries no truncation.
ExtReal ominus_trunc(const ConjugateSpec& spec, std::size_t i, double u, Route route = Route::Automatic);

/// (a + 1) b_phi / (a b_phi1) on omega_inf_inf, +inf on omega_inf_0.
/// Throws PreconditionError for untruncated specs or points outside omega_inf.
ExtReal b_of_trunc(const ConjugateSpec& spec, std::size_t i);

/// Threshold in u where the sampled truncated supremum turns infinite.
/// Independent of b_of_trunc's formula; used to cross-check it.
ExtReal b_of_trunc_scan(const ConjugateSpec& spec, std::size_t i);

/// Relative residual of phi1(t, v) + M = phi(t, u v):
/// |phi1(v) + M - phi(u v)| / max(1, phi(u v)); +inf when phi(u v) = inf.
double equality_residual(const ConjugateSpec& spec, std::size_t i, double u, double v, double M);

/// Largest v in [0, min{a, a b_phi1 / (a + 1)}] with equality_residual <= equality_tol.
///
/// Requires a truncation level a > 1, a non-atomic point outside omega_inf_0,
/// u > 0, and a finite truncated conjugate at 3u/2 (PreconditionError
/// otherwise). The returned v is the right edge of the tolerance set.
/// Throws SolverFailure when no point satisfies the equality.
double maximizer(const ConjugateSpec& spec, std::size_t i, double u);

/// Points of (omega_0_0 u omega_inf u atoms) with b_phi > 0.
PointSet conjugate_support(const ConjugateSpec& spec);

/// The conjugate as a Young field, so norms and comparisons accept it.
class ConjugateField final : public YoungField {
public:
    explicit ConjugateField(ConjugateSpec spec, Route route = Route::Automatic)
        : spec_(std::move(spec)), route_(route) {}

    const SpacePtr& space() const override { return spec_.space(); }
    ExtReal value(std::size_t i, double u) const override { return ominus(spec_, i, u, route_); }
    ExtReal inverse(std::size_t i, double w) const override;
    ExtReal a_param(std::size_t i) const override;
    ExtReal b_param(std::size_t i) const override;
    std::string describe() const override { return spec_.describe(); }

    const ConjugateSpec& spec() const noexcept { return spec_; }

private:
    ConjugateSpec spec_;
    Route route_;
};

}  // namespace mokit
