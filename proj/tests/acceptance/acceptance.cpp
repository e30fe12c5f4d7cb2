// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.
// Expected values come from closed forms and the brute-force oracles in
// tests/support, never from the routine under test.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mokit/conjugate.hpp"
#include "mokit/errors.hpp"
#include "mokit/factorization.hpp"
#include "mokit/partition.hpp"
#include "mokit/rng.hpp"
#include "mokit/spaces.hpp"
#include "oracles.hpp"

using namespace mokit;

namespace {

constexpr double kInfD = oracle::inf;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<oracle::Point> points_of(const MeasureSpace& s) {
    std::vector<oracle::Point> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back({s.point(i), s.mass(i)});
    return out;
}

oracle::Phi as_phi(const MOFunction& f) {
    return [f](double t, double u) { return f.eval(t, u).value(); };
}

bool within_ulp(double a, double b) {
    return a == b || std::nextafter(a, b) == b;
}

// 1. Nakano conjugate against its closed form, both routes.
Outcome nakano() {
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 64));
    const ConjugateSpec spec(parse_family("nakano(p = 1 + t/2, normalized = 1)"),
                             parse_family("nakano(p = 2 + t, normalized = 1)"), sp);
    double worst_auto = 0.0, worst_generic = 0.0;
    for (std::size_t i = 0; i < sp->size(); ++i) {
        const double t = sp->point(i);
        const double p = 2.0 + t, q = 1.0 + t / 2.0;
        const double r = 1.0 / (1.0 / q - 1.0 / p);
        for (int k = 0; k <= 40; ++k) {
            const double u = std::pow(10.0, -3.0 + 0.15 * k);
            const double want = std::pow(u, r) / r;
            worst_auto = std::max(worst_auto, oracle::rel_err(ominus(spec, i, u).value(), want));
            worst_generic = std::max(worst_generic, oracle::rel_err(ominus(spec, i, u, Route::Generic).value(), want));
        }
    }
    return {worst_auto <= 1e-6 && worst_generic <= 1e-6,
            fmt("max rel err auto %.3g, generic %.3g (tol 1e-6)", worst_auto, worst_generic)};
}

// 2. The hinge/linear counterexample.
Outcome example51() {
    const auto sp = make_space(MeasureSpace::uniform(0.0, 0.5, 64));
    const auto hinge = parse_family("hinge(shift = t)");
    const auto lin = parse_family("linear(weight = 1)");
    const ConjugateSpec spec(hinge, lin, sp);

    std::vector<double> grid{0.0, 1.0, std::nextafter(1.0, 2.0)};
    for (int k = 0; k <= 60; ++k) grid.push_back(std::pow(10.0, -3.0 + 0.1 * k));
    for (int k = 1; k <= 39; ++k) grid.push_back(0.05 * k);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < sp->size(); ++i) {
        for (double u : grid) {
            const ExtReal v = ominus(spec, i, u);
            const bool ok = u <= 1.0 ? v.is_zero() : v.is_infinite();
            wrong += ok ? 0 : 1;
        }
    }
    const bool a_ok = wrong == 0;

    const BoundFunction phi(hinge, sp), phi1(lin, sp);
    const ConjugateField phi0(spec);
    const auto cmp = compare_inverses(phi, phi0, phi1, default_u_grid());
    bool b_ok = !cmp.succ_holds && cmp.prec_holds && cmp.best_C_lower >= 1.0 - 1e-9 && cmp.succ_witness.has_value();
    double wt = 0.0, wu = 0.0;
    if (b_ok) {
        const auto& w = *cmp.succ_witness;
        wt = w.t;
        wu = w.u;
        const auto again = comparison_at(phi, phi0, phi1, w.point, w.u);
        b_ok = w.t > 0.0 && w.u <= 1e-3 && std::isinf(again.ratio);
    }

    VerifyOptions o;
    o.samples = 200;
    o.seed = 7;
    o.k_limit = 4.0;
    const auto ver = factorization_verify(lin, hinge, sp, o);
    const bool c_ok = ver.passed() && ver.worst_K <= 4.0 && ver.superset_samples == 200;

    return {a_ok && b_ok && c_ok,
            fmt("(a) %zu mismatches over %zu points; (b) succ witness t=%.6g u=%.3g, prec C=%.12g; "
                "(c) worst K %.4g, worst subset ratio %.4g over %zu samples",
                wrong, sp->size() * grid.size(), wt, wu, cmp.best_C_lower, ver.worst_K, ver.worst_subset_ratio,
                ver.superset_samples)};
}

struct Pair {
    const char* phi;
    const char* phi1;
};

// 3. phi(uv) <= phi1(v) + conjugate(u).
Outcome young_inequality() {
    const Pair pairs[] = {
        {"nakano(p = 1 + t/2, normalized = 1)", "nakano(p = 2 + t, normalized = 1)"},
        {"hinge(shift = t)", "linear(weight = 1)"},
        {"linear(weight = 1 + t)", "power(p = 2)"},
        {"power(p = 2, cap = 1 + t)", "power(p = 3)"},
        {"custom(f = u*u + u)", "indicator(level = 1 + t)"},
    };
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 64));
    Rng rng(2024, 0);
    std::size_t violations = 0, n = 0;
    for (const auto& pr : pairs) {
        const ConjugateSpec spec(parse_family(pr.phi), parse_family(pr.phi1), sp);
        for (int k = 0; k < 2000; ++k, ++n) {
            const std::size_t i = rng.index(sp->size());
            const double u = rng.log_uniform(1e-3, 1e3), v = rng.log_uniform(1e-3, 1e3);
            const double t = sp->point(i);
            const ExtReal lhs = spec.phi().eval(t, u * v);
            const ExtReal rhs = spec.phi1().eval(t, v) + ominus(spec, i, u);
            bool ok;
            if (rhs.is_infinite()) ok = true;
            else if (lhs.is_infinite()) ok = false;
            else ok = lhs.value() <= rhs.value() * (1.0 + 1e-9);
            violations += ok ? 0 : 1;
        }
    }
    return {violations == 0, fmt("%zu violations in %zu triples over 5 pairs", violations, n)};
}

// 4. Norm engine properties.
Outcome norm_engine() {
    const char* fams[] = {"nakano(p = 1 + t)", "hinge(shift = t)", "linear(weight = 1 + t)",
                          "power(p = 2, cap = 2 + t)", "indicator(level = 1 + t)", "custom(f = u*u*(1 + t) + u)"};
    std::vector<MOFunction> fs;
    for (const char* f : fams) fs.push_back(parse_family(f));
    std::vector<Cell> cells;
    for (int k = 0; k < 24; ++k) cells.push_back({(k + 0.5) / 24.0, 0.02 + 0.01 * (k % 5)});
    const auto sp = make_space(MeasureSpace(cells, {{1.5, 0.3}, {2.0, 0.05}}));
    Rng rng(99, 0);
    auto random_x = [&] {
        std::vector<double> x(sp->size());
        for (auto& v : x) v = rng.uniform() < 0.3 ? 0.0 : rng.log_uniform(1e-2, 1e2);
        if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) x[0] = 1.0;
        return x;
    };
    std::size_t bad_ball = 0, bad_hom = 0, bad_mono = 0, bad_ind = 0;
    double worst_hom = 0.0, worst_ind = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const MOFunction& f = fs[static_cast<std::size_t>(k) % fs.size()];
        const SimpleFunction x(sp, random_x());
        const double n = luxemburg_norm(f, x).value;

        // unit ball: I(x) <= ||x|| for ||x|| <= 1
        const auto xb = x.scaled(rng.uniform(0.01, 1.0) / n);
        const double nb = luxemburg_norm(f, xb).value;
        const ExtReal Ib = modular(f, xb);
        if (nb <= 1.0 && !(Ib.value() <= nb * (1 + 1e-9))) ++bad_ball;

        const double c = rng.log_uniform(1e-3, 1e3);
        const double e = oracle::rel_err(luxemburg_norm(f, x.scaled(c)).value, c * n);
        worst_hom = std::max(worst_hom, e);
        if (e > 1e-9) ++bad_hom;

        std::vector<double> smaller(x.values().begin(), x.values().end());
        for (auto& v : smaller) v *= rng.uniform();
        if (luxemburg_norm(f, SimpleFunction(sp, smaller)).value > n * (1 + 1e-9)) ++bad_mono;

        const std::size_t i = rng.index(sp->size());
        const double inv = f.inverse(sp->point(i), 1.0 / sp->mass(i)).value();
        const double prod = luxemburg_norm(f, indicator(sp, {i})).value * inv;
        worst_ind = std::max(worst_ind, std::abs(prod - 1.0));
        if (!(std::abs(prod - 1.0) <= 1e-8)) ++bad_ind;
    }
    const bool ok = bad_ball + bad_hom + bad_mono + bad_ind == 0;
    return {ok, fmt("1000 cases each: unit-ball %zu, homogeneity %zu (worst %.2g), monotonicity %zu, "
                    "indicator %zu (worst |dev| %.2g) failures",
                    bad_ball, bad_hom, worst_hom, bad_mono, bad_ind, worst_ind)};
}

// 5. Multiplier norm sandwich on omega_0_0 spaces.
Outcome multiplier_sandwich() {
    const Pair pairs[] = {
        {"hinge(shift = t)", "power(p = 2)"},
        {"linear(weight = 1 + t)", "nakano(p = 2 + t)"},
        {"nakano(p = 1 + t/2)", "nakano(p = 2 + t)"},
        {"hinge(shift = t/2)", "nakano(p = 1.5 + t)"},
    };
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 16));
    Rng rng(5, 0);
    std::size_t bad = 0;
    double worst_gap = 0.0, worst_conj = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto& pr = pairs[static_cast<std::size_t>(k) % 4];
        const auto phi = parse_family(pr.phi), phi1 = parse_family(pr.phi1);
        std::vector<double> y(sp->size());
        for (auto& v : y) v = rng.uniform() < 0.25 ? 0.0 : rng.log_uniform(1e-2, 1e1);
        y[rng.index(y.size())] = rng.log_uniform(1e-2, 1e1);
        MultiplierOptions o;
        o.seed = static_cast<std::uint64_t>(k);
        o.budget = 32;
        const auto e = multiplier_norm(phi1, phi, SimpleFunction(sp, y), o);
        const double gap = e.upper / e.lower, cr = e.conj_norm / e.lower;
        worst_gap = std::max(worst_gap, gap);
        worst_conj = std::max(worst_conj, cr);
        const bool ok = e.upper_certified && e.lower > 0.0 && e.lower <= e.upper * (1 + 1e-9) && gap <= 8.0 &&
                        cr <= 8.0 && e.conj_norm * 0.5 <= e.upper * (1 + 1e-12);
        bad += ok ? 0 : 1;
    }
    return {bad == 0, fmt("%zu failures in 100; worst upper/lower %.4g, worst conj/lower %.4g", bad, worst_gap,
                          worst_conj)};
}

// 6. Partitions.
Outcome partitions() {
    std::size_t bad_bound = 0, bad_disjoint = 0, bad_mass = 0, pieces = 0;
    auto check = [&](const Partition& part, const SpacePtr& sp, const MOFunction& phi) {
        const auto& R = *part.refined;
        if (oracle::rel_err(R.total_mass(), sp->total_mass()) > 1e-12) ++bad_mass;
        std::set<std::size_t> seen;
        double covered = 0.0;
        const auto pts = points_of(R);
        for (std::size_t k = 0; k < part.pieces.size(); ++k, ++pieces) {
            std::vector<double> chi(R.size(), 0.0);
            for (std::size_t i : part.pieces[k]) {
                if (!seen.insert(i).second) ++bad_disjoint;
                covered += R.mass(i);
                chi[i] = 1.0;
            }
            const double n = oracle::luxemburg(as_phi(phi), pts, chi);
            const double tol = phi.tolerances().root;
            if (!(n <= part.bounds[k] * (1 + tol)) || !(part.norms[k] <= part.bounds[k] * (1 + tol))) ++bad_bound;
        }
        if (oracle::rel_err(covered, sp->total_mass()) > 1e-12) ++bad_mass;
    };
    {
        const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 32));
        const auto phi = parse_family("nakano(p = 2 + t)");
        for (double a : {0.5, 1.0, 2.0}) check(partition_unbounded(sp, all_cells(*sp), phi, a), sp, phi);
        const auto hinge = parse_family("hinge(shift = t)");
        for (double a : {0.5, 1.0, 2.0}) check(partition_unbounded(sp, all_cells(*sp), hinge, a), sp, hinge);
    }
    {
        const auto sp = make_space(MeasureSpace::uniform(0.0, 3.0, 24));
        for (const char* f : {"power(p = 2, cap = 1 + t)", "indicator(level = 1 + t)", "linear(weight = 3, cap = 1 + t)"}) {
            const auto phi = parse_family(f);
            check(partition_bounded(sp, all_cells(*sp), phi), sp, phi);
        }
    }
    return {bad_bound + bad_disjoint + bad_mass == 0,
            fmt("%zu pieces: %zu bound, %zu overlap, %zu mass failures", pieces, bad_bound, bad_disjoint, bad_mass)};
}

// 7. Factor split on triples where the comparison holds on the grid.
Outcome factor_split_cases() {
    const Pair pairs[] = {
        {"linear(weight = 1)", "power(p = 2)"},
        {"nakano(p = 1 + t/2, normalized = 1)", "nakano(p = 2 + t, normalized = 1)"},
        {"linear(weight = 1 + t)", "nakano(p = 2 + t)"},
        {"power(p = 1.5)", "power(p = 3)"},
    };
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 16));
    const auto pts = points_of(*sp);
    std::vector<bool> approx;
    for (const auto& pr : pairs) {
        const auto phi = parse_family(pr.phi), phi1 = parse_family(pr.phi1);
        const BoundFunction f(phi, sp), f1(phi1, sp);
        const ConjugateField f0(ConjugateSpec(phi, phi1, sp));
        approx.push_back(compare_inverses(f, f0, f1, default_u_grid()).approx_holds());
    }
    Rng rng(31, 0);
    std::size_t ulp_bad = 0, mod_bad = 0, skipped = 0, failures = 0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t which = static_cast<std::size_t>(k) % 4;
        if (!approx[which]) {
            ++skipped;
            continue;
        }
        const auto phi = parse_family(pairs[which].phi), phi1 = parse_family(pairs[which].phi1);
        const BoundFunction f(phi, sp), f1(phi1, sp);
        const ConjugateSpec spec(phi, phi1, sp);
        const ConjugateField f0(spec);
        std::vector<double> z(sp->size());
        for (auto& v : z) v = rng.uniform() < 0.2 ? 0.0 : rng.log_uniform(1e-2, 1e2);
        z[rng.index(z.size())] = rng.log_uniform(1e-2, 1e2);
        FactorPair fp = [&] {
            try {
                return factor_split(f, f0, f1, SimpleFunction(sp, z));
            } catch (const SolverFailure&) {
                ++failures;
                throw;
            }
        }();
        for (std::size_t i = 0; i < z.size(); ++i) ulp_bad += within_ulp(fp.z0[i] * fp.z1[i], z[i]) ? 0 : 1;
        // independent modulars of the construction on kappa z
        const double kappa = fp.prescale, sD = std::sqrt(fp.D_used);
        std::vector<double> kz(z.size()), a0(z.size()), a1(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            kz[i] = kappa * z[i];
            a0[i] = kappa * fp.z0[i] / sD;
            a1[i] = fp.z1[i] / sD;
        }
        const double Iz = oracle::modular(as_phi(phi), pts, kz);
        const double I1 = oracle::modular(as_phi(phi1), pts, a1);
        double I0 = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (a0[i] > 0.0) I0 += ominus(spec, i, a0[i]).value() * sp->mass(i);
        }
        const double slack = 1e-12 * std::max(1.0, Iz);
        mod_bad += (I0 <= Iz + slack ? 0 : 1) + (I1 <= Iz + slack ? 0 : 1);
    }
    return {ulp_bad == 0 && mod_bad == 0 && skipped == 0 && failures == 0,
            fmt("100 cases: %zu points beyond 1 ulp, %zu modular violations, %zu skipped (comparison failed)", ulp_bad,
                mod_bad, skipped)};
}

// 8. Maximizer: equality within 1e-8 and nothing admissible further right.
Outcome maximizers() {
    const Pair pairs[] = {
        {"linear(weight = 1)", "power(p = 2)"},
        {"nakano(p = 1 + t/2, normalized = 1)", "nakano(p = 2 + t, normalized = 1)"},
        {"power(p = 2)", "power(p = 3)"},
        {"hinge(shift = t)", "power(p = 2)"},
        {"power(p = 2, cap = 2 + t)", "power(p = 3, cap = 3)"},
    };
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 32));
    Rng rng(8, 0);
    std::size_t bad_eq = 0, bad_max = 0, n = 0, tries = 0;
    double worst_res = 0.0;
    while (n < 500 && tries < 5000) {
        ++tries;
        const auto& pr = pairs[tries % 5];
        const double a = std::array{2.0, 4.0, 8.0}[rng.index(3)];
        const ConjugateSpec spec(parse_family(pr.phi), parse_family(pr.phi1), sp, a);
        const std::size_t i = rng.index(sp->size());
        const double u = rng.log_uniform(1e-2, 1e1);
        if (ominus_trunc(spec, i, 1.5 * u).is_infinite()) continue;
        ++n;
        const double t = sp->point(i);
        const double x = maximizer(spec, i, u);
        const double M = ominus_trunc(spec, i, u).value();
        auto residual = [&](double v) {
            const double fuv = spec.phi().eval(t, u * v).value();
            if (std::isinf(fuv)) return kInfD;
            const double f1 = spec.phi1().eval(t, v).value();
            if (std::isinf(f1)) return kInfD;
            return std::abs(f1 + M - fuv) / std::max(1.0, fuv);
        };
        const double r = residual(x);
        worst_res = std::max(worst_res, r);
        if (!(r <= 1e-8)) ++bad_eq;
        const double b1 = spec.phi1().b_param(t).value();
        const double vmax = std::isinf(b1) ? a : std::min(a, a * b1 / (a + 1.0));
        const double start = x + 1e-6;
        bool found = false;
        for (int k = 0; k <= 2000 && start <= vmax && !found; ++k) {
            const double v = start + (vmax - start) * k / 2000.0;
            found = residual(v) <= 1e-8;
        }
        for (int k = 0; k <= 60 && !found; ++k) {
            const double v = start + 1e-6 * std::pow(10.0, k / 10.0);
            if (v <= vmax) found = residual(v) <= 1e-8;
        }
        if (found) ++bad_max;
    }
    return {n == 500 && bad_eq == 0 && bad_max == 0,
            fmt("%zu samples: %zu equality failures (worst residual %.2g), %zu admissible points beyond x + 1e-6", n,
                bad_eq, worst_res, bad_max)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"nakano conjugate closed form", nakano},
        {"hinge/linear counterexample", example51},
        {"generalized Young inequality", young_inequality},
        {"norm engine properties", norm_engine},
        {"multiplier norm sandwich", multiplier_sandwich},
        {"partition bounds", partitions},
        {"factor split", factor_split_cases},
        {"maximizer consistency", maximizers},
    };
    int failed = 0, k = 0;
    const auto t_all = std::chrono::steady_clock::now();
    for (const auto& c : criteria) {
        ++k;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %d %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str(), dt);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all).count();
    std::printf("%d/%d criteria passed in %.1fs\n", k - failed, k, total);
    return failed == 0 ? 0 : 1;
}
