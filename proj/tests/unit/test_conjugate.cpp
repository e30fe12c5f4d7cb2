#include <doctest.h>

#include <cmath>
#include <random>

#include "mokit/conjugate.hpp"
#include "mokit/errors.hpp"
#include "oracles.hpp"

using namespace mokit;

namespace {

SpacePtr line(std::size_t n = 8) { return make_space(MeasureSpace::uniform(0.0, 1.0, n)); }

// sup over s in [0, S] of phi(t, s u) - phi1(t, s), clamped at 0, from dense grids.
double conj_oracle(const MOFunction& phi, const MOFunction& phi1, double t, double u, double S) {
    auto g = [&](double s) {
        const double f1 = phi1.eval(t, s).value();
        if (std::isinf(f1)) return -oracle::inf;
        return phi.eval(t, s * u).value() - f1;
    };
    const double a = oracle::sup_uniform(g, S);
    const double b = oracle::sup_log(g, S * 1e-9, S);
    return std::max({a, b, 0.0});
}

}  // namespace

TEST_CASE("s ranges") {
    const auto sp = make_space(MeasureSpace({{0.2, 0.5}}, {{3.0, 0.25}}));
    const auto lin = parse_family("linear(weight = 1)");
    const auto ind = parse_family("indicator(level = 2)");
    const ConjugateSpec plain(lin, lin, sp);
    CHECK(std::isinf(s_range(plain, 0).hi));
    CHECK_FALSE(s_range(plain, 0).closed);
    const auto tr = plain.truncated(4.0);
    CHECK(s_range(tr, 0).hi == 4.0);
    CHECK(s_range(tr, 0).closed);
    const ConjugateSpec inf_pt(lin, ind, sp, 4.0);
    CHECK(s_range(inf_pt, 0).hi == doctest::Approx(4.0 * 2.0 / 5.0));
    // atom of mass 1/4 under linear phi: phi^{-1}(4) = 4, so the range ends at min(1/4, b1/2)
    CHECK(s_range(plain, 1).hi == doctest::Approx(0.25));
    CHECK(s_range(plain, 1).closed);
    CHECK(s_range(inf_pt, 1).hi == doctest::Approx(0.25));
    CHECK_THROWS_AS(plain.truncation(), PreconditionError);
    CHECK_THROWS_AS(ConjugateSpec(lin, lin, sp, 0.0), DomainError);
}

TEST_CASE("closed-form examples") {
    const auto sp = line(4);
    {
        const ConjugateSpec s(parse_family("nakano(p = 1)"), parse_family("nakano(p = 2, normalized = 1)"), sp);
        CHECK(ominus(s, 0, 3.0).value() == doctest::Approx(4.5));
        CHECK(ominus(s, 0, 3.0, Route::Generic).value() == doctest::Approx(4.5).epsilon(1e-8));
    }
    {
        const ConjugateSpec s(parse_family("linear(weight = 1)"), parse_family("power(p = 2)"), sp);
        for (double u : {0.1, 1.0, 7.0}) {
            CHECK(ominus(s, 2, u).value() == doctest::Approx(u * u / 4));
            CHECK(ominus(s, 2, u, Route::Generic).value() == doctest::Approx(u * u / 4).epsilon(1e-8));
        }
    }
    {
        // hinge against linear: zero up to u = 1, infinite beyond
        const auto space = make_space(MeasureSpace::uniform(0.0, 0.5, 16));
        const ConjugateSpec s(parse_family("hinge(shift = t)"), parse_family("linear(weight = 1)"), space);
        for (std::size_t i = 0; i < space->size(); ++i) {
            for (double u : {0.0, 0.3, 0.999, 1.0}) {
                CHECK(ominus(s, i, u).is_zero());
                CHECK(ominus(s, i, u, Route::Generic).is_zero());
            }
            for (double u : {1.0 + 1e-9, 1.5, 40.0}) {
                CHECK(ominus(s, i, u).is_infinite());
                CHECK(ominus(s, i, u, Route::Generic).is_infinite());
            }
        }
    }
}

TEST_CASE("both routes match a dense-grid oracle") {
    const auto sp = line(5);
    struct Pair {
        const char* phi;
        const char* phi1;
    };
    const Pair pairs[] = {
        {"nakano(p = 1 + t/2, normalized = 1)", "nakano(p = 2 + t, normalized = 1)"},
        {"power(p = 2)", "power(p = 3, scale = 2)"},
        {"hinge(shift = t)", "power(p = 2)"},
        {"linear(weight = 1 + t)", "nakano(p = 1.5)"},
        {"custom(f = u*u/2 + u)", "power(p = 3)"},
    };
    for (const auto& pr : pairs) {
        const ConjugateSpec s(parse_family(pr.phi), parse_family(pr.phi1), sp);
        for (std::size_t i = 0; i < sp->size(); ++i) {
            for (double u : {0.05, 0.5, 1.0, 2.5}) {
                const double t = sp->point(i);
                const double want = conj_oracle(s.phi(), s.phi1(), t, u, 200.0);
                INFO(pr.phi, " / ", pr.phi1, " t=", t, " u=", u);
                const double tol = 1e-7 * std::max(1.0, want);
                CHECK(std::abs(ominus(s, i, u).value() - want) <= tol);
                CHECK(std::abs(ominus(s, i, u, Route::Generic).value() - want) <= tol);
            }
        }
    }
}

TEST_CASE("truncation is monotone in the level") {
    const auto sp = line(4);
    const ConjugateSpec s(parse_family("power(p = 2)"), parse_family("power(p = 3)"), sp);
    for (double u : {0.5, 2.0, 9.0}) {
        double prev = 0.0;
        for (double a : {0.5, 1.0, 2.0, 8.0}) {
            const double v = ominus_trunc(s.truncated(a), 1, u).value();
            CHECK(v >= prev - 1e-12);
            CHECK(v <= ominus(s, 1, u).value() * (1 + 1e-12) + 1e-15);
            CHECK(v == doctest::Approx(conj_oracle(s.phi(), s.phi1(), sp->point(1), u, a)).epsilon(1e-7));
            prev = v;
        }
    }
    CHECK_THROWS_AS(ominus_trunc(s, 0, 1.0), PreconditionError);
}

TEST_CASE("b of the truncated conjugate") {
    const auto sp = line(2);
    {
        const ConjugateSpec s(parse_family("indicator(level = 1)"), parse_family("indicator(level = 1)"), sp, 1.0);
        CHECK(b_of_trunc(s, 0).value() == doctest::Approx(2.0));
        CHECK(b_of_trunc_scan(s, 0).value() == doctest::Approx(2.0).epsilon(1e-8));
    }
    {
        const ConjugateSpec s(parse_family("indicator(level = 3)"), parse_family("indicator(level = 2)"), sp, 3.0);
        CHECK(b_of_trunc(s, 1).value() == doctest::Approx(2.0));
        CHECK(b_of_trunc_scan(s, 1).value() == doctest::Approx(2.0).epsilon(1e-8));
    }
    {
        const ConjugateSpec s(parse_family("power(p = 2, cap = 2)"), parse_family("power(p = 2, cap = 3)"), sp, 3.0);
        CHECK(b_of_trunc(s, 0).value() == doctest::Approx(8.0 / 9.0));
        CHECK(b_of_trunc_scan(s, 0).value() == doctest::Approx(8.0 / 9.0).epsilon(1e-7));
    }
    {
        const ConjugateSpec s(parse_family("power(p = 2)"), parse_family("indicator(level = 1)"), sp, 2.0);
        CHECK(b_of_trunc(s, 0).is_infinite());
    }
    const ConjugateSpec plain(parse_family("power(p = 2)"), parse_family("power(p = 2)"), sp, 2.0);
    CHECK_THROWS_AS(b_of_trunc(plain, 0), PreconditionError);
    CHECK_THROWS_AS(b_of_trunc(plain.untruncated(), 0), PreconditionError);
}

TEST_CASE("maximizer examples") {
    const auto sp = line(4);
    const ConjugateSpec s(parse_family("linear(weight = 1)"), parse_family("power(p = 2)"), sp, 2.0);
    const double v = maximizer(s, 0, 1.0);
    CHECK(v == doctest::Approx(0.5).epsilon(2e-4));
    CHECK(equality_residual(s, 0, 1.0, v, ominus_trunc(s, 0, 1.0).value()) <= 1e-8);

    // flat case: every v in range is an equality point, the right edge is returned
    const ConjugateSpec flat(parse_family("linear(weight = 1)"), parse_family("linear(weight = 1)"), sp, 2.0);
    CHECK(maximizer(flat, 0, 1.0) == doctest::Approx(2.0));

    CHECK_THROWS_AS(maximizer(s.truncated(1.0), 0, 1.0), PreconditionError);
    CHECK_THROWS_AS(maximizer(s, 0, 0.0), DomainError);
    CHECK_THROWS_AS(maximizer(s.untruncated(), 0, 1.0), PreconditionError);
}

TEST_CASE("support of the conjugate") {
    const auto sp = make_space(MeasureSpace({{0.1, 0.5}, {0.2, 0.5}}, {{4.0, 1.0}}));
    const ConjugateSpec s(parse_family("power(p = 2)"), parse_family("power(p = 3)"), sp);
    CHECK(conjugate_support(s) == PointSet{0, 1, 2});
    const ConjugateSpec z(parse_family("indicator(level = 1)"), parse_family("power(p = 2)"), sp);
    CHECK(conjugate_support(z) == PointSet{2});
}

TEST_CASE("Young inequality phi(uv) <= phi1(v) + conjugate(u)") {
    const auto sp = line(6);
    const ConjugateSpec s(parse_family("nakano(p = 1.2 + t)"), parse_family("nakano(p = 2.5 + t)"), sp);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-4.0, 2.0);
    for (int k = 0; k < 300; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) % sp->size();
        const double u = std::pow(10.0, U(rng)), v = std::pow(10.0, U(rng));
        const double t = sp->point(i);
        const double lhs = s.phi().eval(t, u * v).value();
        const double rhs = s.phi1().eval(t, v).value() + ominus(s, i, u).value();
        CHECK(lhs <= rhs * (1 + 1e-10) + 1e-300);
    }
}

TEST_CASE("the conjugate is itself a Young slice") {
    const auto sp = make_space(MeasureSpace({{0.3, 1.0}}, {{2.0, 0.5}}));
    const ConjugateSpec s(parse_family("power(p = 2)"), parse_family("power(p = 3)"), sp);
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(k == 0 ? 0.0 : std::pow(10.0, -3.0 + 0.1 * k));
    for (std::size_t i = 0; i < sp->size(); ++i) {
        const auto bad = find_young_violation([&](double u) { return ominus(s, i, u); }, grid, 1e-7);
        CHECK_FALSE(bad.has_value());
    }
    const ConjugateField f(s);
    // thresholds are found numerically, so "zero" and "infinite" end at the double range
    CHECK(f.a_param(0).value() <= 1e-50);
    CHECK(f.b_param(0).value() >= 1e150);
    CHECK(f.inverse(0, ominus(s, 0, 2.0).value()).value() == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("atoms carry a positive conjugate") {
    const auto sp = make_space(MeasureSpace({}, {{0.0, 2.0}, {1.0, 0.1}}));
    const ConjugateSpec s(parse_family("power(p = 2)"), parse_family("linear(weight = 1)"), sp);
    for (std::size_t i = 0; i < sp->size(); ++i) {
        const SRange r = s_range(s, i);
        CHECK(r.closed);
        CHECK(std::isfinite(r.hi));
        const double want = conj_oracle(s.phi(), s.phi1(), sp->point(i), 10.0, r.hi);
        CHECK(want > 0.0);
        CHECK(ominus(s, i, 10.0).value() == doctest::Approx(want).epsilon(1e-8));
        CHECK(ominus(s, i, 10.0).is_finite());
    }
}
