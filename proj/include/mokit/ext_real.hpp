#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "mokit/errors.hpp"

namespace mokit {

/// A value in [0, +inf]. NaN and negative values are rejected at construction.
///
/// Arithmetic follows the measure-theory conventions used by modular sums:
/// inf + x = inf and 0 * inf = 0.
class ExtReal {
public:
    constexpr ExtReal() noexcept = default;

    ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) throw DomainError("ExtReal: NaN");
        if (v < 0.0) throw DomainError("ExtReal: negative value " + std::to_string(v));
    }

    static constexpr ExtReal infinity() noexcept { return ExtReal(Raw{}, std::numeric_limits<double>::infinity()); }
    static constexpr ExtReal zero() noexcept { return ExtReal(); }

    constexpr double value() const noexcept { return v_; }
    constexpr bool is_finite() const noexcept { return v_ != std::numeric_limits<double>::infinity(); }
    constexpr bool is_infinite() const noexcept { return !is_finite(); }
    constexpr bool is_zero() const noexcept { return v_ == 0.0; }

    friend ExtReal operator+(ExtReal a, ExtReal b) noexcept { return ExtReal(Raw{}, a.v_ + b.v_); }

    friend ExtReal operator*(ExtReal a, ExtReal b) noexcept {
        if (a.v_ == 0.0 || b.v_ == 0.0) return ExtReal();
        return ExtReal(Raw{}, a.v_ * b.v_);
    }

    ExtReal& operator+=(ExtReal o) noexcept { v_ += o.v_; return *this; }

    // x - y, defined only for finite y. The result is a plain real and may be negative.
    friend double operator-(ExtReal a, ExtReal b) {
        if (b.is_infinite()) throw DomainError("ExtReal: subtraction of infinity");
        return a.v_ - b.v_;
    }

    friend constexpr auto operator<=>(ExtReal a, ExtReal b) noexcept {
        // total: no NaN ever stored
        return a.v_ < b.v_ ? std::strong_ordering::less
             : a.v_ > b.v_ ? std::strong_ordering::greater
                           : std::strong_ordering::equal;
    }
    friend constexpr bool operator==(ExtReal a, ExtReal b) noexcept { return a.v_ == b.v_; }

    std::string to_string() const;

private:
    struct Raw {};
    constexpr ExtReal(Raw, double v) noexcept : v_(v) {}

    double v_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace mokit
