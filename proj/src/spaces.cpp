#include "mokit/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "mokit/errors.hpp"
#include "mokit/factorization.hpp"
#include "mokit/rng.hpp"

namespace mokit {

namespace {

void check_on_space(const YoungField& phi, const SimpleFunction& x) {
    if (phi.space() != x.space_ptr() && !(*phi.space() == x.space())) {
        throw DomainError("function and Young field live on different spaces");
    }
}

}  // namespace

ExtReal modular(const YoungField& phi, const SimpleFunction& x, kernels::Exec exec) {
    check_on_space(phi, x);
    return kernels::modular_sum(phi, x.values(), 1.0, exec);
}

ExtReal modular(const MOFunction& phi, const SimpleFunction& x, kernels::Exec exec) {
    return modular(BoundFunction(phi, x.space_ptr()), x, exec);
}

NormResult luxemburg_norm(const YoungField& phi, const SimpleFunction& x, double rel_tol, kernels::Exec exec) {
    check_on_space(phi, x);
    NormResult r;
    if (x.is_zero()) return r;
    for (std::size_t i : x.support()) {
        if (phi.b_param(i).is_zero()) {
            r.value = r.hi = kInf;
            r.infinite = true;
            return r;
        }
    }
    auto fits = [&](double lambda) {
        ++r.iterations;
        return kernels::modular_sum(phi, x.values(), 1.0 / lambda, exec) <= ExtReal(1.0);
    };
    double lo = 1.0, hi = 1.0;
    if (fits(1.0)) {
        lo = 0.5;
        while (fits(lo)) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) throw SolverFailure("luxemburg_norm: no lower bracket above 1e-300");
        }
    } else {
        hi = 2.0;
        while (!fits(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) {
                r.value = r.hi = kInf;
                r.lo = lo;
                r.infinite = true;
                return r;
            }
        }
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (fits(mid) ? hi : lo) = mid;
    }
    r.lo = lo;
    r.hi = hi;
    r.value = hi;
    return r;
}

NormResult luxemburg_norm(const MOFunction& phi, const SimpleFunction& x, double rel_tol, kernels::Exec exec) {
    return luxemburg_norm(BoundFunction(phi, x.space_ptr()), x, rel_tol, exec);
}

ExtReal weighted_sup_norm(const SimpleFunction& x, std::span<const double> weights) {
    if (weights.size() != x.size()) throw DomainError("weighted_sup_norm: weights not aligned to the space");
    ExtReal best;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        if (!(weights[i] > 0.0)) throw DomainError("weighted_sup_norm: weight must be > 0 on supp x");
        best = std::max(best, ExtReal(std::abs(x[i])) * ExtReal(weights[i]));
    }
    return best;
}

double inclusion_constant(const YoungField& phi) {
    const SpacePtr& space = phi.space();
    double c = 1.0;
    for (std::size_t i = 0; i < space->size(); ++i) {
        const ExtReal b = phi.b_param(i);
        if (b.is_infinite() || b.is_zero()) continue;
        const NormResult n = luxemburg_norm(phi, indicator(space, {i}));
        if (n.infinite || n.value == 0.0) continue;
        c = std::max(c, 1.0 / (b.value() * n.value));
    }
    return c;
}

// ----------------------------------------------------------------------------

namespace {

struct Candidate {
    std::string kind;
    std::vector<double> x;
};

}  // namespace

MultiplierEstimate multiplier_norm(const MOFunction& phi1, const MOFunction& phi, const SimpleFunction& y,
                                   const MultiplierOptions& opts) {
    const SpacePtr& space = y.space_ptr();
    const ConjugateSpec spec(phi, phi1, space);
    MultiplierEstimate est;
    est.seed = opts.seed;
    if (y.is_zero()) return est;

    const SimpleFunction ay = y.abs();
    const PointSet supp = ay.support();
    for (std::size_t i : supp) {
        if (space->is_atom(i)) est.upper_certified = false;
    }
    const ConjugateField conj(spec);
    const NormResult cn = luxemburg_norm(conj, ay);
    est.conj_norm = cn.value;
    est.upper = 2.0 * cn.value;

    const BoundFunction f(phi, space);
    const BoundFunction f1(phi1, space);
    const auto& cls = spec.classification();
    const std::size_t n = space->size();

    std::vector<Candidate> cands;
    // the construction: x(t) = best s of phi(t, s y(t)/lambda) - phi1(t, s)
    if (cn.infinite || cn.value > 0.0) {
        const double base = cn.infinite ? 1.0 : cn.value;
        for (double a : opts.truncations) {
            const ConjugateSpec ta = spec.truncated(a);
            for (double scale : opts.witness_scales) {
                const double lambda = base * scale;
                std::vector<double> x(n, 0.0);
                bool any = false;
                for (std::size_t i : supp) {
                    const ConjugatePoint p = ominus_detail(ta, i, ay[i] / lambda);
                    if (p.value.is_infinite() || !std::isfinite(p.argmax)) continue;
                    x[i] = p.argmax;
                    any = any || x[i] > 0.0;
                }
                if (any) cands.push_back({"construction", std::move(x)});
            }
        }
    }
    // single-point indicators
    const std::size_t stride = std::max<std::size_t>(1, (supp.size() + opts.max_indicators - 1) / opts.max_indicators);
    for (std::size_t k = 0; k < supp.size(); k += stride) {
        std::vector<double> x(n, 0.0);
        x[supp[k]] = 1.0;
        cands.push_back({"indicator", std::move(x)});
    }
    // random candidates, log-uniform in [1e-3, 0.99 max(1, b_phi1)] on supp y
    Rng rng(opts.seed, 1);
    for (std::size_t k = 0; k < opts.budget; ++k) {
        std::vector<double> x(n, 0.0);
        for (std::size_t i : supp) {
            const double top = 0.99 * std::max(1.0, std::min(cls.b_phi1[i].value(), 1e300));
            x[i] = rng.log_uniform(1e-3, std::max(top, 2e-3));
        }
        cands.push_back({"random", std::move(x)});
    }

    std::vector<double> ratio(cands.size(), 0.0);
    kernels::for_each_index(cands.size(), [&](std::size_t k) {
        const SimpleFunction x(space, cands[k].x);
        const NormResult nx = luxemburg_norm(f1, x);
        if (nx.infinite || nx.value == 0.0) return;
        const NormResult nxy = luxemburg_norm(f, x * ay);
        ratio[k] = nxy.infinite ? kInf : nxy.value / nx.value;
    });
    for (std::size_t k = 0; k < cands.size(); ++k) {
        if (ratio[k] > est.lower) {
            est.lower = ratio[k];
            est.witness = {cands[k].kind, ratio[k], cands[k].x};
        }
    }
    est.candidates = cands.size();
    return est;
}

ProductBound product_quasinorm_upper(const YoungField& phi0, const YoungField& phi1, const SimpleFunction& z,
                                     const YoungField* phi) {
    check_on_space(phi0, z);
    check_on_space(phi1, z);
    ProductBound pb;
    if (z.is_zero()) {
        pb.via = "zero";
        pb.split_value = pb.exponent_value = 0.0;
        pb.split_ok = true;
        return pb;
    }
    const SimpleFunction az = z.abs();
    const PointSet supp = az.support();

    for (int k = 0; k <= 10; ++k) {
        const double theta = 0.1 * k;
        std::vector<double> v0(az.size(), 0.0), v1(az.size(), 0.0);
        for (std::size_t i : supp) {
            v0[i] = std::pow(az[i], theta);
            v1[i] = az[i] / v0[i];
        }
        const double n0 = luxemburg_norm(phi0, SimpleFunction(az.space_ptr(), v0)).value;
        const double n1 = luxemburg_norm(phi1, SimpleFunction(az.space_ptr(), v1)).value;
        const double prod = n0 * n1;
        if (prod < pb.exponent_value) {
            pb.exponent_value = prod;
            pb.best_theta = theta;
        }
    }
    if (phi) {
        try {
            const FactorPair fp = factor_split(*phi, phi0, phi1, az);
            pb.split_value = fp.norm_0 * fp.norm_1;
            pb.split_ok = true;
        } catch (const SolverFailure& e) {
            pb.split_error = e.what();
        }
    } else {
        pb.split_error = "no target function given";
    }
    if (pb.split_ok && pb.split_value <= pb.exponent_value) {
        pb.value = pb.split_value;
        pb.via = "split";
    } else {
        pb.value = pb.exponent_value;
        pb.via = "exponent";
    }
    return pb;
}

}  // namespace mokit
