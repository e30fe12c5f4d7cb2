#include "mokit/young.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mokit/errors.hpp"

namespace mokit {

std::string_view family_name(Family f) noexcept {
    switch (f) {
        case Family::Nakano: return "nakano";
        case Family::Power: return "power";
        case Family::Hinge: return "hinge";
        case Family::Linear: return "linear";
        case Family::Indicator: return "indicator";
        case Family::Table: return "table";
        case Family::Custom: return "custom";
    }
    return "?";
}

namespace detail {

Bracket monotone_threshold(const std::function<bool(double)>& pred, double rel_tol) {
    constexpr double kFloor = 1e-300;
    constexpr double kCeil = 1e300;
    if (pred(0.0)) return {0.0, 0.0};
    double lo = 0.0;
    double hi = 1.0;
    if (pred(hi)) {
        double x = 0.5;
        while (pred(x)) {
            if (x < kFloor) return {0.0, 0.0};
            hi = x;
            x *= 0.5;
        }
        lo = x;
    } else {
        lo = hi;
        double x = 2.0;
        while (!pred(x)) {
            if (x > kCeil) return {x, kInf};
            lo = x;
            x *= 2.0;
        }
        hi = x;
    }
    for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid)) hi = mid;
        else lo = mid;
    }
    return {lo, hi};
}

struct FamilyImpl {
    Family family;
    std::optional<Expr> cap;

    FamilyImpl(Family f, std::optional<Expr> c) : family(f), cap(std::move(c)) {}
    virtual ~FamilyImpl() = default;

    // Uncapped value; may be +inf, never NaN or negative.
    virtual double raw(double t, double u) const = 0;
    virtual std::optional<double> a_closed(double) const { return std::nullopt; }
    virtual std::optional<double> b_closed(double) const { return std::nullopt; }
    virtual std::optional<double> inverse_closed(double, double) const { return std::nullopt; }
    virtual std::optional<Monomial> monomial(double) const { return std::nullopt; }
    virtual std::optional<double> hinge_shift(double) const { return std::nullopt; }
    virtual std::string args() const = 0;

    double cap_at(double t) const {
        if (!cap) return kInf;
        const double c = cap->eval(t, 0.0);
        if (!(c >= 0.0)) throw DomainError("cap(t) must be >= 0, got " + std::to_string(c) + " at t=" + std::to_string(t));
        return c;
    }

    ExtReal eval(double t, double u) const {
        if (!(u >= 0.0)) throw DomainError("phi(t,u): u must be >= 0, got " + std::to_string(u));
        if (u > cap_at(t)) return ExtReal::infinity();
        const double v = raw(t, u);
        if (std::isnan(v) || v < 0.0) {
            throw DomainError(std::string(family_name(family)) + ": invalid value at t=" + std::to_string(t) +
                              ", u=" + std::to_string(u));
        }
        return ExtReal(v);
    }

    std::string describe() const {
        std::string s = std::string(family_name(family)) + "(" + args();
        if (cap) s += ", cap = " + cap->to_string();
        return s + ")";
    }
};

}  // namespace detail

namespace {

using detail::FamilyImpl;

double param(const Expr& e, double t) { return e.eval(t, 0.0); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct NakanoImpl final : FamilyImpl {
    Expr p;
    bool normalized;
    NakanoImpl(Expr p_, bool n, std::optional<Expr> c) : FamilyImpl(Family::Nakano, std::move(c)), p(std::move(p_)), normalized(n) {}

    double exponent(double t) const {
        const double e = param(p, t);
        if (!(e >= 1.0) || !std::isfinite(e)) {
            throw DomainError("nakano: exponent p(t) must be finite and >= 1, got " + std::to_string(e) +
                              " at t=" + std::to_string(t));
        }
        return e;
    }
    double coeff(double e) const { return normalized ? 1.0 / e : 1.0; }
    double raw(double t, double u) const override {
        const double e = exponent(t);
        return coeff(e) * std::pow(u, e);
    }
    std::optional<double> a_closed(double) const override { return 0.0; }
    std::optional<double> b_closed(double) const override { return kInf; }
    std::optional<double> inverse_closed(double t, double w) const override {
        const double e = exponent(t);
        return std::pow(w / coeff(e), 1.0 / e);
    }
    std::optional<Monomial> monomial(double t) const override {
        const double e = exponent(t);
        return Monomial{coeff(e), e};
    }
    std::string args() const override {
        return "p = " + p.to_string() + (normalized ? ", normalized = 1" : "");
    }
};

struct PowerImpl final : FamilyImpl {
    double p;
    double scale;
    PowerImpl(double p_, double s, std::optional<Expr> c) : FamilyImpl(Family::Power, std::move(c)), p(p_), scale(s) {}
    double raw(double, double u) const override { return scale * std::pow(u, p); }
    std::optional<double> a_closed(double) const override { return 0.0; }
    std::optional<double> b_closed(double) const override { return kInf; }
    std::optional<double> inverse_closed(double, double w) const override { return std::pow(w / scale, 1.0 / p); }
    std::optional<Monomial> monomial(double) const override { return Monomial{scale, p}; }
    std::string args() const override { return "p = " + num(p) + ", scale = " + num(scale); }
};

struct HingeImpl final : FamilyImpl {
    Expr shift;
    HingeImpl(Expr s, std::optional<Expr> c) : FamilyImpl(Family::Hinge, std::move(c)), shift(std::move(s)) {}
    double shift_at(double t) const {
        const double s = param(shift, t);
        if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("hinge: shift(t) must be finite and >= 0 at t=" + std::to_string(t));
        return s;
    }
    double raw(double t, double u) const override { return std::max(u - shift_at(t), 0.0); }
    std::optional<double> a_closed(double t) const override { return shift_at(t); }
    std::optional<double> b_closed(double) const override { return kInf; }
    std::optional<double> inverse_closed(double t, double w) const override { return w + shift_at(t); }
    std::optional<double> hinge_shift(double t) const override { return shift_at(t); }
    std::string args() const override { return "shift = " + shift.to_string(); }
};

struct LinearImpl final : FamilyImpl {
    Expr weight;
    LinearImpl(Expr w, std::optional<Expr> c) : FamilyImpl(Family::Linear, std::move(c)), weight(std::move(w)) {}
    double weight_at(double t) const {
        const double w = param(weight, t);
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("linear: weight(t) must be finite and > 0 at t=" + std::to_string(t));
        return w;
    }
    double raw(double t, double u) const override { return weight_at(t) * u; }
    std::optional<double> a_closed(double) const override { return 0.0; }
    std::optional<double> b_closed(double) const override { return kInf; }
    std::optional<double> inverse_closed(double t, double w) const override { return w / weight_at(t); }
    std::optional<Monomial> monomial(double t) const override { return Monomial{weight_at(t), 1.0}; }
    std::string args() const override { return "weight = " + weight.to_string(); }
};

struct IndicatorImpl final : FamilyImpl {
    Expr level;
    explicit IndicatorImpl(Expr l) : FamilyImpl(Family::Indicator, std::nullopt), level(std::move(l)) {}
    double level_at(double t) const {
        const double l = param(level, t);
        if (!(l >= 0.0)) throw DomainError("indicator: level(t) must be >= 0 at t=" + std::to_string(t));
        return l;
    }
    double raw(double t, double u) const override { return u <= level_at(t) ? 0.0 : kInf; }
    std::optional<double> a_closed(double t) const override { return level_at(t); }
    std::optional<double> b_closed(double t) const override { return level_at(t); }
    std::optional<double> inverse_closed(double t, double) const override { return level_at(t); }
    std::string args() const override { return "level = " + level.to_string(); }
};

struct TableImpl final : FamilyImpl {
    TableData data;
    TableImpl(TableData d, std::optional<Expr> c) : FamilyImpl(Family::Table, std::move(c)), data(std::move(d)) {}

    const TableSlice& nearest(double t) const {
        const auto& s = data.slices;
        auto it = std::lower_bound(s.begin(), s.end(), t, [](const TableSlice& a, double v) { return a.t < v; });
        if (it == s.end()) return s.back();
        if (it == s.begin()) return *it;
        auto prev = std::prev(it);
        return (t - prev->t <= it->t - t) ? *prev : *it;
    }
    double raw(double t, double u) const override {
        const TableSlice& sl = nearest(t);
        if (u > sl.infinite_above) return kInf;
        const auto& pts = sl.points;
        if (pts.size() == 1) return 0.0;
        auto it = std::upper_bound(pts.begin(), pts.end(), u, [](double v, const auto& p) { return v < p.first; });
        std::size_t hi = static_cast<std::size_t>(it - pts.begin());
        if (hi == 0) hi = 1;
        if (hi >= pts.size()) hi = pts.size() - 1;
        const auto& [u0, f0] = pts[hi - 1];
        const auto& [u1, f1] = pts[hi];
        const double v = f0 + (f1 - f0) * (u - u0) / (u1 - u0);
        return std::max(v, 0.0);
    }
    std::string args() const override { return "file = \"" + data.source + "\""; }
};

struct CustomImpl final : FamilyImpl {
    Expr f;
    CustomImpl(Expr f_, std::optional<Expr> c) : FamilyImpl(Family::Custom, std::move(c)), f(std::move(f_)) {}
    double raw(double t, double u) const override {
        return f.eval(t, u);
    }
    // The grammar has no infinite literal, so any +inf is overflow: only a cap
    // makes a custom slice infinite.
    std::optional<double> b_closed(double) const override { return kInf; }
    std::string args() const override { return "f = " + f.to_string(); }
};

void validate_table(const TableData& d) {
    if (d.slices.empty()) throw DomainError("table: no rows");
    for (const auto& sl : d.slices) {
        const std::string where = " (table slice t=" + std::to_string(sl.t) + ")";
        const auto& pts = sl.points;
        if (pts.empty() || pts.front().first != 0.0 || pts.front().second != 0.0) {
            throw DomainError("table: slice must start at (0, 0)" + where);
        }
        double prev_slope = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double du = pts[i].first - pts[i - 1].first;
            if (!(du > 0.0)) throw DomainError("table: u values must be strictly increasing" + where);
            if (pts[i].second < 0.0 || !std::isfinite(pts[i].second)) throw DomainError("table: values must be finite and >= 0" + where);
            const double slope = (pts[i].second - pts[i - 1].second) / du;
            if (slope < 0.0) throw DomainError("table: slice is not nondecreasing" + where);
            if (slope < prev_slope * (1.0 - 1e-12)) throw DomainError("table: slice is not convex" + where);
            prev_slope = slope;
        }
        if (sl.infinite_above < pts.back().first) throw DomainError("table: inf row below a finite row" + where);
        if (!std::isfinite(sl.infinite_above) && !(prev_slope > 0.0)) {
            throw DomainError("table: slice does not tend to infinity" + where);
        }
    }
}

}  // namespace

TableData load_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("table: cannot open '" + path.string() + "'");
    std::vector<std::array<double, 3>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::array<double, 3> row{};
        std::stringstream ss(line);
        std::string cell;
        int k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= 3) throw ParseError("table: more than 3 columns", lineno, 1);
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            const std::string tok = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
            if (tok == "inf") {
                row[static_cast<std::size_t>(k)] = kInf;
            } else {
                char* end = nullptr;
                row[static_cast<std::size_t>(k)] = std::strtod(tok.c_str(), &end);
                if (tok.empty() || end != tok.c_str() + tok.size()) {
                    throw ParseError("table: malformed number '" + tok + "'", lineno, 1);
                }
            }
            ++k;
        }
        if (k != 3) throw ParseError("table: expected 't,u,value'", lineno, 1);
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end());
    TableData data;
    data.source = path.string();
    for (const auto& r : rows) {
        if (data.slices.empty() || data.slices.back().t != r[0]) {
            data.slices.push_back(TableSlice{r[0], {{0.0, 0.0}}, kInf});
        }
        TableSlice& sl = data.slices.back();
        if (std::isinf(r[2])) {
            sl.infinite_above = std::min(sl.infinite_above, r[1]);
        } else if (r[1] == 0.0) {
            if (r[2] != 0.0) throw DomainError("table: phi(t, 0) must be 0");
        } else {
            sl.points.emplace_back(r[1], r[2]);
        }
    }
    return data;
}

std::vector<double> default_check_grid() {
    std::vector<double> g{0.0};
    for (int k = -60; k <= 60; ++k) g.push_back(std::pow(10.0, k / 10.0));
    return g;
}

std::optional<std::string> find_young_violation(const std::function<ExtReal(double)>& slice,
                                                std::span<const double> u_grid, double convexity_tol) {
    if (!slice(0.0).is_zero()) return "phi(0) != 0";
    std::vector<double> us(u_grid.begin(), u_grid.end());
    std::sort(us.begin(), us.end());
    std::vector<ExtReal> vals;
    vals.reserve(us.size());
    for (double u : us) vals.push_back(slice(u));
    for (std::size_t i = 1; i < us.size(); ++i) {
        if (vals[i] < vals[i - 1]) return "not nondecreasing at u=" + std::to_string(us[i]);
    }
    // convexity on consecutive triples in the finite range
    for (std::size_t i = 2; i < us.size(); ++i) {
        if (vals[i].is_infinite()) break;
        const double u = us[i - 2], v = us[i - 1], w = us[i];
        const double fu = vals[i - 2].value(), fv = vals[i - 1].value(), fw = vals[i].value();
        const double chord = fu + (v - u) / (w - u) * (fw - fu);
        if (fv > chord + convexity_tol * std::max(1.0, std::abs(fw))) {
            return "not convex near u=" + std::to_string(v);
        }
    }
    if (vals.back().is_finite() && vals.size() >= 2 && !(vals.back() > vals[vals.size() - 2])) {
        return "does not tend to infinity";
    }
    return std::nullopt;
}

// ----------------------------------------------------------------------------

ExtReal YoungSlice::eval(double u) const { return impl_->eval(t_, u); }

Family YoungSlice::family() const noexcept { return impl_->family; }

std::string YoungSlice::describe() const { return impl_->describe() + " @ t=" + num(t_); }

ExtReal YoungSlice::a_param() const {
    const double c = impl_->cap_at(t_);
    if (auto a = impl_->a_closed(t_)) return ExtReal(std::min(*a, c));
    const auto br = detail::monotone_threshold([&](double u) { return !eval(u).is_zero(); }, tol_.root);
    return ExtReal(br.lo);
}

ExtReal YoungSlice::b_param() const {
    const double c = impl_->cap_at(t_);
    if (auto b = impl_->b_closed(t_)) return ExtReal(std::min(*b, c));
    const auto br = detail::monotone_threshold([&](double u) { return eval(u).is_infinite(); }, tol_.root);
    return ExtReal(br.hi);
}

ExtReal YoungSlice::inverse(double w) const {
    if (!(w >= 0.0)) throw DomainError("inverse: w must be >= 0");
    const double c = impl_->cap_at(t_);
    if (std::isinf(w)) return b_param();
    if (auto v = impl_->inverse_closed(t_, w)) return ExtReal(std::min(*v, c));
    const auto br = detail::monotone_threshold([&](double v) { return eval(v) > ExtReal(w); }, tol_.root);
    return ExtReal(br.hi);
}

// ----------------------------------------------------------------------------

std::span<const double> MOFunction::default_validation_points() {
    static constexpr std::array<double, 5> pts{0.0, 0.25, 0.5, 0.75, 1.0};
    return pts;
}

MOFunction MOFunction::nakano(Expr p, bool normalized, std::optional<Expr> cap) {
    if (p.uses_u()) throw DomainError("nakano: p may depend on t only");
    if (p.is_constant()) {
        const double e = p.eval(0.0, 0.0);
        if (!(e >= 1.0) || !std::isfinite(e)) throw DomainError("nakano: exponent p must be finite and >= 1");
    }
    return MOFunction(std::make_shared<NakanoImpl>(std::move(p), normalized, std::move(cap)));
}

MOFunction MOFunction::power(double p, double scale, std::optional<Expr> cap) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power: p must be finite and >= 1");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("power: scale must be finite and > 0");
    return MOFunction(std::make_shared<PowerImpl>(p, scale, std::move(cap)));
}

MOFunction MOFunction::hinge(Expr shift, std::optional<Expr> cap) {
    if (shift.uses_u()) throw DomainError("hinge: shift may depend on t only");
    return MOFunction(std::make_shared<HingeImpl>(std::move(shift), std::move(cap)));
}

MOFunction MOFunction::linear(Expr weight, std::optional<Expr> cap) {
    if (weight.uses_u()) throw DomainError("linear: weight may depend on t only");
    return MOFunction(std::make_shared<LinearImpl>(std::move(weight), std::move(cap)));
}

MOFunction MOFunction::indicator(Expr level) {
    if (level.uses_u()) throw DomainError("indicator: level may depend on t only");
    return MOFunction(std::make_shared<IndicatorImpl>(std::move(level)));
}

MOFunction MOFunction::table(TableData data, std::optional<Expr> cap) {
    validate_table(data);
    return MOFunction(std::make_shared<TableImpl>(std::move(data), std::move(cap)));
}

MOFunction MOFunction::custom(Expr f, std::optional<Expr> cap, std::span<const double> validation_points) {
    if (cap && cap->uses_u()) throw DomainError("cap may depend on t only");
    MOFunction fn(std::make_shared<CustomImpl>(std::move(f), std::move(cap)));
    for (double t : validation_points) fn.validate_at(t);
    return fn;
}

ExtReal MOFunction::eval(double t, double u) const { return impl_->eval(t, u); }
ExtReal MOFunction::a_param(double t) const { return slice_at(t).a_param(); }
ExtReal MOFunction::b_param(double t) const { return slice_at(t).b_param(); }
ExtReal MOFunction::inverse(double t, double w) const { return slice_at(t).inverse(w); }

Family MOFunction::family() const noexcept { return impl_->family; }
bool MOFunction::has_cap() const noexcept { return impl_->cap.has_value(); }

std::optional<Monomial> MOFunction::monomial_at(double t) const {
    if (has_cap()) return std::nullopt;
    return impl_->monomial(t);
}

std::optional<double> MOFunction::hinge_shift_at(double t) const {
    if (has_cap()) return std::nullopt;
    return impl_->hinge_shift(t);
}

std::string MOFunction::describe() const { return impl_->describe(); }

void MOFunction::validate_at(double t) const {
    const auto grid = default_check_grid();
    std::optional<std::string> bad;
    try {
        bad = find_young_violation([&](double u) { return eval(t, u); }, grid, tol_.convexity);
    } catch (const DomainError& e) {
        bad = e.what();
    }
    if (bad) throw DomainError(describe() + " is not a Young function at t=" + num(t) + ": " + *bad);
}

}  // namespace mokit
