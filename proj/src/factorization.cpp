#include "mokit/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mokit/errors.hpp"
#include "mokit/kernels.hpp"
#include "mokit/rng.hpp"

namespace mokit {

namespace {

void check_shared_space(const YoungField& a, const YoungField& b) {
    if (a.space() != b.space() && !(*a.space() == *b.space())) {
        throw DomainError("Young fields live on different spaces");
    }
}

}  // namespace

std::vector<double> default_u_grid() {
    std::vector<double> g{0.0};
    for (int k = 0; k <= 120; ++k) g.push_back(std::pow(10.0, -6.0 + 0.1 * k));
    return g;
}

ComparisonPoint comparison_at(const YoungField& phi, const YoungField& phi0, const YoungField& phi1, std::size_t i,
                              double u) {
    ComparisonPoint p;
    p.point = i;
    p.t = phi.space()->point(i);
    p.u = u;
    p.R = phi.inverse(i, u);
    p.L = phi1.inverse(i, u) * phi0.inverse(i, u);
    if (p.L.is_zero()) {
        p.ratio = p.R.is_zero() ? std::nan("") : kInf;
    } else if (p.L.is_infinite()) {
        p.ratio = p.R.is_infinite() ? std::nan("") : 0.0;
    } else {
        p.ratio = p.R.value() / p.L.value();
    }
    return p;
}

ComparisonReport compare_inverses(const YoungField& phi, const YoungField& phi0, const YoungField& phi1,
                                  std::span<const double> u_grid) {
    check_shared_space(phi, phi0);
    check_shared_space(phi, phi1);
    for (double u : u_grid) {
        if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("compare_inverses: grid values must be finite and >= 0");
    }
    const std::size_t np = phi.space()->size();
    const std::size_t nu = u_grid.size();
    std::vector<ComparisonPoint> pts(np * nu);
    kernels::for_each_index(pts.size(),
                            [&](std::size_t k) { pts[k] = comparison_at(phi, phi0, phi1, k / nu, u_grid[k % nu]); });

    ComparisonReport rep;
    rep.u_grid.assign(u_grid.begin(), u_grid.end());
    for (const ComparisonPoint& p : pts) {
        if (std::isnan(p.ratio)) {
            (p.L.is_zero() ? rep.skipped_zero : rep.skipped_infinite)++;
            continue;
        }
        ++rep.evaluated;
        if (!rep.prec_witness || p.ratio < rep.prec_witness->ratio) rep.prec_witness = p;
        if (!rep.succ_witness || p.ratio > rep.succ_witness->ratio) rep.succ_witness = p;
    }
    if (rep.evaluated == 0) throw DomainError("compare_inverses: no grid point with a determinate ratio");
    rep.best_C_lower = rep.prec_witness->ratio;
    rep.best_C_upper = rep.succ_witness->ratio;
    rep.prec_holds = rep.best_C_lower > 0.0;
    rep.succ_holds = std::isfinite(rep.best_C_upper);
    return rep;
}

FactorPair factor_split(const YoungField& phi, const YoungField& phi0, const YoungField& phi1, const SimpleFunction& z,
                        double D) {
    check_shared_space(phi, phi0);
    check_shared_space(phi, phi1);
    if (phi.space() != z.space_ptr() && !(*phi.space() == z.space())) {
        throw DomainError("factor_split: z lives on a different space");
    }
    for (double v : z.values()) {
        if (v < 0.0) throw DomainError("factor_split: z must be nonnegative");
    }
    if (!(D >= 0.0) || !std::isfinite(D)) throw DomainError("factor_split: D must be finite and >= 0");

    const SpacePtr& space = z.space_ptr();
    const std::size_t n = z.size();
    FactorPair fp{SimpleFunction::zero(space), SimpleFunction::zero(space)};
    fp.D_given = D;
    fp.D_used = D;
    fp.modular_ok = true;
    if (z.is_zero()) return fp;

    fp.c = inclusion_constant(phi);
    const NormResult nz = luxemburg_norm(phi, z);
    if (nz.infinite) throw DomainError("factor_split: z is not in L^phi");
    fp.prescale = (2.0 / (3.0 * fp.c)) / nz.value;

    const PointSet supp = z.support();
    std::vector<double> zs(n, 0.0), z0s(n, 0.0), z1s(n, 0.0);
    std::vector<std::size_t> bad;
    for (std::size_t i : supp) {
        zs[i] = fp.prescale * z[i];
        const ExtReal y = phi.value(i, zs[i]);
        if (y.is_infinite()) {
            bad.push_back(i);
            continue;
        }
        const ExtReal inv0 = phi0.inverse(i, y.value());
        const ExtReal inv1 = phi1.inverse(i, y.value());
        const ExtReal prod = inv0 * inv1;
        if (prod.is_zero() || prod.is_infinite()) {
            bad.push_back(i);
            continue;
        }
        const double root = std::sqrt(zs[i] / prod.value());
        z0s[i] = inv0.value() * root;
        z1s[i] = inv1.value() * root;
        fp.D_attained = std::max(fp.D_attained, zs[i] / prod.value());
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "factor_split: phi0^{-1} phi1^{-1} vanishes or is infinite at phi(t, z) on " << bad.size()
           << " point(s) of supp z:";
        for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 8); ++k) {
            os << " " << bad[k] << " (t=" << space->point(bad[k]) << ")";
        }
        if (bad.size() > 8) os << " ...";
        throw SolverFailure(os.str());
    }
    fp.D_used = std::max(D, fp.D_attained * (1.0 + 1e-9));

    // caller's scale: z0 carries 1/kappa, z1 is z / z0 so the product is z to rounding
    std::vector<double> v0(n, 0.0), v1(n, 0.0);
    for (std::size_t i : supp) {
        v0[i] = z0s[i] / fp.prescale;
        v1[i] = z[i] / v0[i];
    }
    fp.z0 = SimpleFunction(space, std::move(v0));
    fp.z1 = SimpleFunction(space, std::move(v1));

    const double root_d = std::sqrt(fp.D_used);
    std::vector<double> w0(n, 0.0), w1(n, 0.0);
    for (std::size_t i : supp) {
        w0[i] = z0s[i] / root_d;
        w1[i] = fp.z1[i] / root_d;
    }
    const ExtReal mz = modular(phi, SimpleFunction(space, zs));
    const ExtReal m0 = modular(phi0, SimpleFunction(space, std::move(w0)));
    const ExtReal m1 = modular(phi1, SimpleFunction(space, std::move(w1)));
    fp.modular_z = mz.value();
    fp.modular_0 = m0.value();
    fp.modular_1 = m1.value();
    const double slack = 1e-12 * std::max(1.0, mz.value());
    fp.modular_ok = m0.is_finite() && m1.is_finite() && fp.modular_0 <= fp.modular_z + slack &&
                    fp.modular_1 <= fp.modular_z + slack;
    fp.norm_0 = luxemburg_norm(phi0, fp.z0).value;
    fp.norm_1 = luxemburg_norm(phi1, fp.z1).value;
    return fp;
}

// ----------------------------------------------------------------------------

namespace {

// Nonnegative random function: each admissible point kept with probability
// 0.7, value log-uniform in [lo, hi].
std::vector<double> random_values(Rng& rng, const PointSet& admissible, std::size_t n, double lo, double hi) {
    std::vector<double> v(n, 0.0);
    for (std::size_t i : admissible) {
        const double keep = rng.uniform();
        const double val = rng.log_uniform(lo, hi);
        if (keep < 0.7) v[i] = val;
    }
    return v;
}

}  // namespace

VerifyReport factorization_verify(const MOFunction& phi1, const MOFunction& phi, const SpacePtr& space,
                                  const VerifyOptions& opts) {
    const ConjugateSpec spec(phi, phi1, space);
    const ConjugateField conj(spec);
    const BoundFunction f(phi, space);
    const BoundFunction f1(phi1, space);
    const std::size_t n = space->size();

    VerifyReport rep;
    rep.seed = opts.seed;
    rep.c = inclusion_constant(f);
    rep.comparison = compare_inverses(f, conj, f1, default_u_grid());
    if (rep.comparison.succ_holds) rep.k_bound = 1.5 * rep.c * rep.comparison.best_C_upper;

    PointSet conj_pts, phi1_pts, phi_pts;
    for (std::size_t i = 0; i < n; ++i) {
        if (!conj.b_param(i).is_zero()) conj_pts.push_back(i);
        phi1_pts.push_back(i);
        if (!f.b_param(i).is_zero()) phi_pts.push_back(i);
    }

    // samples are drawn serially so the streams do not depend on scheduling
    Rng rx(opts.seed, 10), rz(opts.seed, 11);
    std::vector<std::vector<double>> xs(opts.samples), ys(opts.samples), zs(opts.samples);
    for (std::size_t k = 0; k < opts.samples; ++k) {
        xs[k] = random_values(rx, conj_pts, n, 1e-3, 1e2);
        ys[k] = random_values(rx, phi1_pts, n, 1e-3, 1e2);
        zs[k] = random_values(rz, phi_pts, n, 1e-3, 1e2);
    }

    std::vector<double> sub_ratio(opts.samples, -1.0), K(opts.samples, -1.0);
    std::vector<char> fallback(opts.samples, 0);
    kernels::for_each_index(opts.samples, [&](std::size_t k) {
        const SimpleFunction x(space, xs[k]);
        const SimpleFunction y(space, ys[k]);
        if (!x.is_zero() && !y.is_zero()) {
            const double nx = luxemburg_norm(conj, x).value;
            const double ny = luxemburg_norm(f1, y).value;
            const double nxy = luxemburg_norm(f, x * y).value;
            sub_ratio[k] = nxy / (nx * ny);
        }
        const SimpleFunction z(space, zs[k]);
        if (!z.is_zero()) {
            const double nz = luxemburg_norm(f, z).value;
            // a point of the unit ball: scale to norm in [0.1, 1]
            const double target = 0.1 + 0.9 * static_cast<double>(k % 10) / 9.0;
            const SimpleFunction zb = z.scaled(target / nz);
            const ProductBound pb = product_quasinorm_upper(conj, f1, zb, &f);
            K[k] = pb.value / luxemburg_norm(f, zb).value;
            fallback[k] = pb.split_ok ? 0 : 1;
        }
    });

    rep.subset_pass = true;
    rep.superset_pass = true;
    for (std::size_t k = 0; k < opts.samples; ++k) {
        if (sub_ratio[k] >= 0.0) {
            ++rep.subset_samples;
            if (sub_ratio[k] > rep.worst_subset_ratio) {
                rep.worst_subset_ratio = sub_ratio[k];
                rep.subset_witness = VerifySample{k, sub_ratio[k], xs[k], ys[k]};
            }
        }
        if (K[k] >= 0.0) {
            ++rep.superset_samples;
            rep.split_fallbacks += static_cast<std::size_t>(fallback[k]);
            if (K[k] > rep.worst_K) {
                rep.worst_K = K[k];
                rep.superset_witness = VerifySample{k, K[k], zs[k], {}};
            }
        }
    }
    rep.subset_pass = rep.worst_subset_ratio <= opts.holder_constant * (1.0 + opts.tolerance);
    rep.superset_pass = rep.worst_K <= opts.k_limit * (1.0 + opts.tolerance);
    return rep;
}

}  // namespace mokit
