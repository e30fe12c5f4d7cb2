#pragma once

#include <cstddef>
#include <string>

#include "mokit/ext_real.hpp"
#include "mokit/measure.hpp"
#include "mokit/young.hpp"

namespace mokit {

/// A Musielak-Orlicz function evaluated on the points of one space.
///
/// Norm, comparison and splitting code only needs point-indexed values, so the
/// same routines serve a plain MOFunction and a computed conjugate.
class YoungField {
public:
    virtual ~YoungField() = default;

    virtual const SpacePtr& space() const = 0;
    virtual ExtReal value(std::size_t i, double u) const = 0;
    virtual ExtReal inverse(std::size_t i, double w) const = 0;
    virtual ExtReal a_param(std::size_t i) const = 0;
    virtual ExtReal b_param(std::size_t i) const = 0;
    virtual std::string describe() const = 0;
};

class BoundFunction final : public YoungField {
public:
    BoundFunction(MOFunction f, SpacePtr space) : f_(std::move(f)), space_(std::move(space)) {
        if (!space_) throw DomainError("BoundFunction: null space");
    }

    const SpacePtr& space() const override { return space_; }
    ExtReal value(std::size_t i, double u) const override { return f_.eval(space_->point(i), u); }
    ExtReal inverse(std::size_t i, double w) const override { return f_.inverse(space_->point(i), w); }
    ExtReal a_param(std::size_t i) const override { return f_.a_param(space_->point(i)); }
    ExtReal b_param(std::size_t i) const override { return f_.b_param(space_->point(i)); }
    std::string describe() const override { return f_.describe(); }

    const MOFunction& function() const noexcept { return f_; }

private:
    MOFunction f_;
    SpacePtr space_;
};

}  // namespace mokit
