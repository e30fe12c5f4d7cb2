#include "mokit/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mokit/errors.hpp"

namespace mokit {

namespace {

constexpr double kInfD = kInf;

// Objective s -> phi(t, s u) - phi1(t, s) with the conventions of detail::Objective.
detail::Objective objective(const MOFunction& phi, const MOFunction& phi1, double t, double u) {
    return [&phi, &phi1, t, u](double s) {
        const ExtReal f1 = phi1.eval(t, s);
        if (f1.is_infinite()) return -kInfD;
        const ExtReal f = phi.eval(t, s * u);
        if (f.is_infinite()) return kInfD;
        return f.value() - f1.value();
    };
}

struct Closed {
    double value;
    double argmax;
};

// Best of g over candidate points; the candidates contain the maximizer.
std::optional<Closed> best_of(const detail::Objective& g, std::initializer_list<double> cands) {
    Closed best{-kInfD, 0.0};
    for (double s : cands) {
        if (!(s >= 0.0) || !std::isfinite(s)) continue;
        const double v = g(s);
        if (std::isnan(v)) return std::nullopt;
        if (v > best.value || (v == best.value && s > best.argmax)) best = {v, s};
    }
    if (best.value == kInfD || best.value == -kInfD) return std::nullopt;
    return best;
}

// Closed-form supremum for monomial/monomial and hinge/monomial pairs.
// Returns nullopt when the pair has no closed form at this point.
std::optional<ConjugatePoint> analytic(const ConjugateSpec& spec, double t, double u, const SRange& r) {
    const auto m1 = spec.phi1().monomial_at(t);
    if (!m1) return std::nullopt;
    const double cp = m1->coeff, p = m1->exponent;
    const double S = r.hi;
    const bool unbounded = std::isinf(S);
    if (!unbounded && !r.closed) return std::nullopt;
    const auto g = objective(spec.phi(), spec.phi1(), t, u);

    auto finish = [&](std::optional<Closed> c) -> std::optional<ConjugatePoint> {
        if (!c) return std::nullopt;
        ConjugatePoint out;
        out.value = ExtReal(std::max(c->value, 0.0));
        out.argmax = c->value > 0.0 ? c->argmax : 0.0;
        out.maxima = {out.argmax};
        out.analytic = true;
        return out;
    };
    auto infinite = [] {
        ConjugatePoint out;
        out.value = ExtReal::infinity();
        out.argmax = kInfD;
        out.analytic = true;
        return std::optional<ConjugatePoint>(out);
    };

    if (const auto m = spec.phi().monomial_at(t)) {
        const double cq = m->coeff, q = m->exponent;
        if (q < p) {
            const double log_s = (std::log(cq * q) + q * std::log(u) - std::log(cp * p)) / (p - q);
            const double s_star = std::exp(log_s);
            if (!std::isfinite(s_star)) return std::nullopt;
            return finish(best_of(g, {0.0, std::min(s_star, S)}));
        }
        if (q == p) {
            if (cq * std::pow(u, q) <= cp) return finish(best_of(g, {0.0}));
            if (unbounded) return infinite();
            return finish(best_of(g, {0.0, S}));
        }
        if (unbounded) return infinite();
        return finish(best_of(g, {0.0, S}));
    }
    if (const auto h = spec.phi().hinge_shift_at(t)) {
        if (p == 1.0) {
            if (unbounded) {
                if (u > cp) return infinite();
                return finish(best_of(g, {0.0}));
            }
            return finish(best_of(g, {0.0, std::min(*h / u, S), S}));
        }
        const double s_star = std::pow(u / (cp * p), 1.0 / (p - 1.0));
        if (!std::isfinite(s_star)) return std::nullopt;
        const double cands_hi = unbounded ? s_star : std::min(s_star, S);
        return finish(best_of(g, {0.0, cands_hi, unbounded ? 0.0 : S}));
    }
    return std::nullopt;
}

}  // namespace

ConjugateSpec::ConjugateSpec(MOFunction phi, MOFunction phi1, SpacePtr space, std::optional<double> truncation,
                             SupSolverConfig solver)
    : phi_(std::move(phi)), phi1_(std::move(phi1)), space_(std::move(space)), truncation_(truncation),
      solver_(solver) {
    if (!space_) throw DomainError("conjugate: null space");
    if (truncation_ && (!(*truncation_ > 0.0) || !std::isfinite(*truncation_))) {
        throw DomainError("conjugate: truncation level must be finite and > 0");
    }
    solver_.validate();
    cls_ = classify(*space_, phi_, phi1_);
}

ConjugateSpec ConjugateSpec::truncated(double a) const {
    ConjugateSpec c = *this;
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("conjugate: truncation level must be finite and > 0");
    c.truncation_ = a;
    return c;
}

ConjugateSpec ConjugateSpec::untruncated() const {
    ConjugateSpec c = *this;
    c.truncation_.reset();
    return c;
}

ConjugateSpec ConjugateSpec::with_solver(SupSolverConfig solver) const {
    solver.validate();
    ConjugateSpec c = *this;
    c.solver_ = solver;
    return c;
}

double ConjugateSpec::truncation() const {
    if (!truncation_) throw PreconditionError("conjugate: no truncation level set");
    return *truncation_;
}

std::string ConjugateSpec::describe() const {
    std::ostringstream os;
    os << "(" << phi_.describe() << ") ominus";
    if (truncation_) os << "_" << ExtReal(*truncation_).to_string();
    os << " (" << phi1_.describe() << ")";
    return os.str();
}

SRange s_range(const ConjugateSpec& spec, std::size_t i) {
    const MeasureSpace& space = *spec.space();
    const auto& cls = spec.classification();
    if (i >= space.size()) throw DomainError("s_range: point index out of range");
    const double b1 = cls.b_phi1[i].value();
    if (space.is_atom(i)) {
        const ExtReal inv = spec.phi().inverse(space.point(i), 1.0 / space.mass(i));
        const double first = inv.is_zero() ? kInfD : 1.0 / inv.value();
        return {std::min(first, b1 / 2.0), true};
    }
    if (!spec.is_truncated()) return {b1, false};
    const double a = spec.truncation();
    if (cls.in_omega_inf(i)) return {a * b1 / (a + 1.0), true};
    return {a, true};
}

ConjugatePoint ominus_detail(const ConjugateSpec& spec, std::size_t i, double u, Route route) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("ominus: u must be finite and >= 0");
    const SRange r = s_range(spec, i);
    ConjugatePoint out;
    if (u == 0.0 || r.hi == 0.0) return out;

    const double t = spec.space()->point(i);
    if (route == Route::Automatic) {
        const ExtReal b = spec.classification().b_phi[i];
        bool inf = false;
        if (b.is_finite()) {
            const double reach = u * r.hi;
            if (std::isinf(r.hi) || reach > b.value()) {
                inf = true;
            } else if (r.closed && reach == b.value()) {
                inf = spec.phi().eval(t, b.value()).is_infinite();
            }
        }
        if (inf) {
            out.value = ExtReal::infinity();
            out.argmax = std::isinf(r.hi) ? kInfD : r.hi;
            return out;
        }
        if (!spec.phi().has_cap() && !spec.phi1().has_cap()) {
            if (auto a = analytic(spec, t, u, r)) return *a;
        }
    }

    const auto g = objective(spec.phi(), spec.phi1(), t, u);
    detail::SupResult res;
    if (std::isinf(r.hi)) {
        res = detail::sup_unbounded(g, spec.solver());
    } else {
        const double S = r.closed ? r.hi : r.hi * (1.0 - spec.solver().endpoint_margin);
        res = detail::sup_compact(g, S, spec.solver());
    }
    if (res.infinite) {
        out.value = ExtReal::infinity();
        out.argmax = res.argmax;
        return out;
    }
    out.value = ExtReal(std::max(res.value, 0.0));
    out.argmax = res.value > 0.0 ? res.argmax : 0.0;
    out.maxima = std::move(res.maxima);
    return out;
}

ExtReal ominus(const ConjugateSpec& spec, std::size_t i, double u, Route route) {
    return ominus_detail(spec, i, u, route).value;
}

ExtReal ominus_trunc(const ConjugateSpec& spec, std::size_t i, double u, Route route) {
    if (!spec.is_truncated()) throw PreconditionError("ominus_trunc: spec has no truncation level");
    return ominus(spec, i, u, route);
}

ExtReal b_of_trunc(const ConjugateSpec& spec, std::size_t i) {
    const double a = spec.truncation();
    const auto& cls = spec.classification();
    if (i >= cls.labels.size()) throw DomainError("b_of_trunc: point index out of range");
    switch (cls.labels[i]) {
        case Region::OmegaInfInf:
            return ExtReal((a + 1.0) * cls.b_phi[i].value() / (a * cls.b_phi1[i].value()));
        case Region::OmegaInf0:
            return ExtReal::infinity();
        default:
            throw PreconditionError("b_of_trunc: point " + std::to_string(i) + " is in " +
                                    std::string(region_name(cls.labels[i])) + ", not omega_inf");
    }
}

ExtReal b_of_trunc_scan(const ConjugateSpec& spec, std::size_t i) {
    spec.truncation();
    const auto br = detail::monotone_threshold(
        [&](double u) { return ominus(spec, i, u, Route::Generic).is_infinite(); }, spec.phi().tolerances().root);
    return ExtReal(br.hi);
}

double equality_residual(const ConjugateSpec& spec, std::size_t i, double u, double v, double M) {
    const double t = spec.space()->point(i);
    const ExtReal f = spec.phi().eval(t, u * v);
    const ExtReal f1 = spec.phi1().eval(t, v);
    if (f.is_infinite() || f1.is_infinite()) return kInfD;
    return std::abs(f1.value() + M - f.value()) / std::max(1.0, f.value());
}

double maximizer(const ConjugateSpec& spec, std::size_t i, double u) {
    const double a = spec.truncation();
    if (!(a > 1.0)) throw PreconditionError("maximizer: requires truncation level a > 1");
    const auto& cls = spec.classification();
    if (i >= cls.labels.size()) throw DomainError("maximizer: point index out of range");
    if (cls.labels[i] == Region::Atom || cls.labels[i] == Region::OmegaInf0) {
        throw PreconditionError("maximizer: point must be non-atomic and outside omega_inf_0");
    }
    if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("maximizer: u must be finite and > 0");
    if (ominus(spec, i, 1.5 * u).is_infinite()) {
        throw PreconditionError("maximizer: truncated conjugate is infinite at 3u/2");
    }
    const ConjugatePoint cp = ominus_detail(spec, i, u);
    const double M = cp.value.value();
    const double b1 = cls.b_phi1[i].value();
    const double vmax = std::min(a, a * b1 / (a + 1.0));
    const double tol = spec.solver().equality_tol;
    auto ok = [&](double v) { return equality_residual(spec, i, u, v, M) <= tol; };

    constexpr std::size_t kScan = 4096;
    std::vector<double> pts;
    pts.reserve(kScan + 1 + cp.maxima.size() + 1);
    for (std::size_t j = 0; j <= kScan; ++j) pts.push_back(vmax * static_cast<double>(j) / kScan);
    for (double s : cp.maxima) {
        if (s >= 0.0 && s <= vmax) pts.push_back(s);
    }
    if (cp.argmax >= 0.0 && cp.argmax <= vmax) pts.push_back(cp.argmax);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    for (std::size_t k = pts.size(); k-- > 0;) {
        if (!ok(pts[k])) continue;
        if (k + 1 == pts.size()) return pts[k];
        double lo = pts[k], hi = pts[k + 1];
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return lo;
    }
    throw SolverFailure("maximizer: no v in [0, " + ExtReal(vmax).to_string() + "] satisfies the equality at point " +
                        std::to_string(i) + ", u=" + ExtReal(u).to_string());
}

PointSet conjugate_support(const ConjugateSpec& spec) {
    const auto& cls = spec.classification();
    PointSet out;
    for (std::size_t i = 0; i < cls.labels.size(); ++i) {
        if (cls.labels[i] == Region::Omega0Inf) continue;
        if (cls.b_phi[i].is_zero()) continue;
        out.push_back(i);
    }
    return out;
}

ExtReal ConjugateField::inverse(std::size_t i, double w) const {
    if (!(w >= 0.0)) throw DomainError("inverse: w must be >= 0");
    if (std::isinf(w)) return b_param(i);
    const auto br = detail::monotone_threshold([&](double v) { return value(i, v) > ExtReal(w); },
                                               spec_.phi().tolerances().root);
    return ExtReal(br.hi);
}

ExtReal ConjugateField::a_param(std::size_t i) const {
    const auto br = detail::monotone_threshold([&](double v) { return !value(i, v).is_zero(); },
                                               spec_.phi().tolerances().root);
    return ExtReal(br.lo);
}

ExtReal ConjugateField::b_param(std::size_t i) const {
    const auto& cls = spec_.classification();
    if (spec_.is_truncated() && cls.in_omega_inf(i)) return b_of_trunc(spec_, i);
    if (!spec_.is_truncated()) {
        if (cls.labels[i] == Region::Omega0Inf) return ExtReal::zero();
        if (cls.labels[i] == Region::OmegaInf0) return ExtReal::infinity();
        if (cls.labels[i] == Region::OmegaInfInf) return ExtReal(cls.b_phi[i].value() / cls.b_phi1[i].value());
    }
    const auto br = detail::monotone_threshold([&](double v) { return value(i, v).is_infinite(); },
                                               spec_.phi().tolerances().root);
    return ExtReal(br.hi);
}

}  // namespace mokit
