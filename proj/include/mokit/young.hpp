#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mokit/expr.hpp"
#include "mokit/ext_real.hpp"

namespace mokit {

/// Tolerances shared by every search on Young slices.
struct YoungTolerances {
    double root = 1e-10;       // relative bracket width of all bisections
    double convexity = 1e-9;   // slack of the sampled convexity check, scaled by max(1, |phi|)
};

enum class Family { Nakano, Power, Hinge, Linear, Indicator, Table, Custom };

std::string_view family_name(Family f) noexcept;

/// phi(t, u) = coeff * u^exponent at a fixed t.
struct Monomial {
    double coeff;
    double exponent;
};

/// One tabulated slice: piecewise linear through `points` (sorted by u, starting
/// at (0, 0)), extrapolated with the last slope, and +inf for u > infinite_above.
struct TableSlice {
    double t = 0.0;
    std::vector<std::pair<double, double>> points;
    double infinite_above = kInf;
};

struct TableData {
    std::vector<TableSlice> slices;  // sorted by t
    std::string source;              // file name for describe(), may be empty
};

/// Reads `t,u,value` rows (value may be `inf`; `#` starts a comment).
TableData load_table_csv(const std::filesystem::path& path);

namespace detail {
struct FamilyImpl;
}

class MOFunction;

/// phi(t, .) for one fixed t.
class YoungSlice {
public:
    YoungSlice(std::shared_ptr<const detail::FamilyImpl> impl, double t, YoungTolerances tol)
        : impl_(std::move(impl)), t_(t), tol_(tol) {}

    ExtReal eval(double u) const;
    ExtReal a_param() const;
    ExtReal b_param() const;
    ExtReal inverse(double w) const;

    double point() const noexcept { return t_; }
    Family family() const noexcept;
    std::string describe() const;

private:
    std::shared_ptr<const detail::FamilyImpl> impl_;
    double t_;
    YoungTolerances tol_;
};

/// A Musielak-Orlicz function: a Young function phi(t, .) for each point t.
///
/// Immutable and cheap to copy; safe to share between threads. Built-in
/// families evaluate a, b and the right-continuous inverse in closed form;
/// tabulated and custom families fall back to monotone bisection on eval.
///
/// Every family accepts an optional cap map c(t): the capped function equals
/// phi(t, u) for u <= c(t) and +inf above it, so b(t) <= c(t).
class MOFunction {
public:
    /// u^{p(t)}, or u^{p(t)}/p(t) when normalized. Requires p(t) >= 1.
    static MOFunction nakano(Expr p, bool normalized, std::optional<Expr> cap = std::nullopt);
    /// scale * u^p with constant p >= 1 and scale > 0.
    static MOFunction power(double p, double scale = 1.0, std::optional<Expr> cap = std::nullopt);
    /// max{u - shift(t), 0} with shift(t) >= 0.
    static MOFunction hinge(Expr shift, std::optional<Expr> cap = std::nullopt);
    /// weight(t) * u with weight(t) > 0.
    static MOFunction linear(Expr weight, std::optional<Expr> cap = std::nullopt);
    /// 0 for u <= level(t), +inf above.
    static MOFunction indicator(Expr level);
    static MOFunction table(TableData data, std::optional<Expr> cap = std::nullopt);
    /// Arbitrary expression in (t, u), checked for the Young invariants at every
    /// t in `validation_points` (rejects violators with DomainError).
    static MOFunction custom(Expr f, std::optional<Expr> cap = std::nullopt,
                             std::span<const double> validation_points = default_validation_points());

    static std::span<const double> default_validation_points();

    ExtReal eval(double t, double u) const;
    /// sup{u >= 0 : phi(t, u) = 0}
    ExtReal a_param(double t) const;
    /// inf{u >= 0 : phi(t, u) = inf}; +inf when phi(t, .) is finite everywhere.
    ExtReal b_param(double t) const;
    /// inf{v >= 0 : phi(t, v) > w}
    ExtReal inverse(double t, double w) const;

    YoungSlice slice_at(double t) const { return YoungSlice(impl_, t, tol_); }

    Family family() const noexcept;
    bool has_cap() const noexcept;
    /// Set when phi(t, .) is coeff * u^exponent (nakano, power, linear without cap).
    std::optional<Monomial> monomial_at(double t) const;
    /// Set when phi(t, .) is max{u - shift, 0} without cap.
    std::optional<double> hinge_shift_at(double t) const;

    /// Canonical text in the family grammar.
    std::string describe() const;

    const YoungTolerances& tolerances() const noexcept { return tol_; }
    MOFunction with_tolerances(YoungTolerances tol) const {
        MOFunction copy = *this;
        copy.tol_ = tol;
        return copy;
    }

    /// Checks the Young invariants of phi(t, .) on a sampled u-grid; throws
    /// DomainError naming the violated property.
    void validate_at(double t) const;

private:
    explicit MOFunction(std::shared_ptr<const detail::FamilyImpl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const detail::FamilyImpl> impl_;
    YoungTolerances tol_{};
};

/// Options for parsing a family expression such as `nakano(p = 2 + t)`.
struct FamilyParseOptions {
    std::size_t line = 0;
    std::size_t column_offset = 0;
    std::filesystem::path base_dir{};               // resolves relative table files
    std::vector<double> validation_points{};        // empty: default points
};

MOFunction parse_family(std::string_view text, const FamilyParseOptions& opts = {});

/// Returns a description of the first Young-invariant violation of `slice` on
/// `u_grid` (zero at zero, monotone, convex below b), or nullopt.
std::optional<std::string> find_young_violation(const std::function<ExtReal(double)>& slice,
                                                std::span<const double> u_grid, double convexity_tol);

/// Log-spaced grid used by the invariant checks: 0 plus 10^-6 .. 10^6.
std::vector<double> default_check_grid();

namespace detail {

/// Location of the switch of a monotone predicate (false ... false true ... true)
/// on [0, inf). pred(lo) is false (or lo = 0), pred(hi) is true (or hi = inf when
/// the predicate never turns true below 1e300).
struct Bracket {
    double lo;
    double hi;
};

Bracket monotone_threshold(const std::function<bool(double)>& pred, double rel_tol);

}  // namespace detail

}  // namespace mokit
