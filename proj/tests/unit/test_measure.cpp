#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "mokit/errors.hpp"
#include "mokit/measure.hpp"
#include "mokit/partition.hpp"
#include "mokit/spaces.hpp"
#include "mokit/young.hpp"
#include "oracles.hpp"

using namespace mokit;

namespace {

std::vector<oracle::Point> points_of(const MeasureSpace& s) {
    std::vector<oracle::Point> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back({s.point(i), s.mass(i)});
    return out;
}

oracle::Phi as_phi(const MOFunction& f) {
    return [f](double t, double u) { return f.eval(t, u).value(); };
}

}  // namespace

TEST_CASE("measure spaces validate their input") {
    CHECK_THROWS_AS(MeasureSpace({{0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(MeasureSpace({{0.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(MeasureSpace({{0.0, oracle::inf}}), DomainError);
    CHECK_THROWS_AS(MeasureSpace({}, {{1.0, 1.0}, {1.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(MeasureSpace({{1.0, 1.0}}, {{1.0, 2.0}}), DomainError);
    CHECK_NOTHROW(MeasureSpace({{0.5, 0.1}, {0.5, 0.1}}));

    const auto u = MeasureSpace::uniform(0.0, 1.0, 4);
    CHECK(u.size() == 4);
    CHECK(u.point(0) == doctest::Approx(0.125));
    CHECK(u.mass(3) == doctest::Approx(0.25));
    CHECK(u.total_mass() == doctest::Approx(1.0));

    const MeasureSpace mixed({{0.1, 0.5}}, {{2.0, 3.0}});
    CHECK(mixed.is_atom(1));
    CHECK_FALSE(mixed.is_atom(0));
    CHECK(all_cells(mixed) == PointSet{0});
    CHECK(all_points(mixed) == PointSet{0, 1});
    CHECK_THROWS_AS(check_aligned(mixed, {1, 0}), DomainError);
    CHECK_THROWS_AS(check_aligned(mixed, {0, 2}), DomainError);
}

TEST_CASE("simple functions: support, indicator, restrict and product") {
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 5));
    const SimpleFunction x(sp, {0.0, 1.0, 2.0, 0.0, 3.0});
    CHECK(x.support() == PointSet{1, 2, 4});
    CHECK_THROWS_AS(SimpleFunction(sp, {0.0, -1.0, 0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(SimpleFunction(sp, {1.0}), DomainError);
    const SimpleFunction s(sp, {0.0, -1.0, 0.0, 0.0, 0.0}, true);
    CHECK(s.abs()[1] == 1.0);
    const auto chi = indicator(sp, {2, 4});
    CHECK((x * chi).support() == PointSet{2, 4});
    const auto r = restrict(x, {1, 2});
    CHECK(r[1] == 1.0);
    CHECK(r[4] == 0.0);
    CHECK(x.scaled(2.0)[4] == 6.0);
    CHECK(SimpleFunction::zero(sp).is_zero());
    const auto other = make_space(MeasureSpace::uniform(0.0, 2.0, 5));
    CHECK_THROWS_AS(x * SimpleFunction::constant(other, 1.0), DomainError);
}

TEST_CASE("split_cells conserves mass and records parents") {
    const MeasureSpace s({{0.1, 0.3}, {0.2, 0.6}}, {{5.0, 1.0}});
    std::vector<std::size_t> parent;
    const std::vector<std::size_t> pieces{3, 1};
    const auto r = s.split_cells(pieces, parent);
    CHECK(r.n_cells() == 4);
    CHECK(r.n_atoms() == 1);
    CHECK(parent == std::vector<std::size_t>{0, 0, 0, 1, 2});
    CHECK(r.total_mass() == doctest::Approx(s.total_mass()));
    CHECK(r.mass(1) == doctest::Approx(0.1));
}

TEST_CASE("classification examples") {
    const auto sp = MeasureSpace({{0.1, 0.2}, {0.5, 0.2}, {0.9, 0.2}}, {{2.0, 1.0}});
    const auto phiA = parse_family("indicator(level = 1)");
    const auto lin = parse_family("linear(weight = 1)");

    const auto c1 = classify(sp, lin, lin);
    CHECK(c1.count(Region::Omega00) == 3);
    CHECK(c1.count(Region::Atom) == 1);
    CHECK(c1.labels[3] == Region::Atom);

    const auto c2 = classify(sp, phiA, lin);
    CHECK(c2.count(Region::Omega0Inf) == 3);
    CHECK(region_name(Region::Omega0Inf) == "omega_0_inf");

    const auto c3 = classify(sp, lin, phiA);
    CHECK(c3.count(Region::OmegaInf0) == 3);
    CHECK(c3.in_omega_inf(0));

    const auto c4 = classify(sp, phiA, phiA);
    CHECK(c4.count(Region::OmegaInfInf) == 3);

    CHECK_THROWS_AS(classify(sp, lin, parse_family("indicator(level = 0)")), std::exception);
}

TEST_CASE("partition of unbounded cells") {
    const auto sp = make_space(MeasureSpace::uniform(0.0, 1.0, 16));
    const auto phi = parse_family("nakano(p = 2 + t)");
    const auto pts = all_cells(*sp);
    for (double a : {0.5, 1.0, 2.0}) {
        const auto part = partition_unbounded(sp, pts, phi, a);
        INFO("a=", a);
        const auto& R = *part.refined;
        CHECK(R.total_mass() == doctest::Approx(sp->total_mass()).epsilon(1e-12));
        std::set<std::size_t> seen;
        double covered = 0.0;
        for (std::size_t k = 0; k < part.pieces.size(); ++k) {
            for (std::size_t i : part.pieces[k]) {
                CHECK(seen.insert(i).second);   // disjoint
                covered += R.mass(i);
            }
            CHECK(part.bounds[k] == doctest::Approx(1.0 / a));
            // independent norm of the piece's indicator on the refined space
            std::vector<double> chi(R.size(), 0.0);
            for (std::size_t i : part.pieces[k]) chi[i] = 1.0;
            const double n = oracle::luxemburg(as_phi(phi), points_of(R), chi);
            CHECK(n <= part.bounds[k] * (1 + 1e-9));
            CHECK(part.norms[k] == doctest::Approx(n).epsilon(1e-8));
        }
        CHECK(covered == doctest::Approx(sp->total_mass()).epsilon(1e-12));
        for (std::size_t i = 0; i < R.size(); ++i) CHECK(R.point(i) == sp->point(part.parent[i]));
    }
    CHECK_THROWS_AS(partition_unbounded(sp, pts, phi, 0.0), DomainError);
    CHECK_THROWS_AS(partition_unbounded(sp, pts, parse_family("indicator(level = 1)"), 1.0), PreconditionError);
    const auto with_atom = make_space(MeasureSpace({{0.1, 1.0}}, {{2.0, 1.0}}));
    CHECK_THROWS_AS(partition_unbounded(with_atom, {0, 1}, phi, 1.0), PreconditionError);
}

TEST_CASE("partition of bounded cells, b = 1 + t") {
    const auto sp = make_space(MeasureSpace::uniform(0.0, 3.0, 24));
    const auto phi = parse_family("power(p = 2, cap = 1 + t)");
    const auto pts = all_cells(*sp);
    const auto part = partition_bounded(sp, pts, phi);
    const auto& R = *part.refined;
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < part.pieces.size(); ++k) {
        double bmax = 0.0;
        std::vector<double> chi(R.size(), 0.0);
        for (std::size_t i : part.pieces[k]) {
            CHECK(seen.insert(i).second);
            bmax = std::max(bmax, 1.0 + R.point(i));
            chi[i] = 1.0;
        }
        CHECK(part.bounds[k] == doctest::Approx(2.0 / bmax));
        const double n = oracle::luxemburg(as_phi(phi), points_of(R), chi);
        CHECK(n <= 2.0 / bmax * (1 + 1e-9));
    }
    CHECK(seen.size() == R.size());
    CHECK(R.total_mass() == doctest::Approx(3.0));
    CHECK_THROWS_AS(partition_bounded(sp, pts, parse_family("power(p = 2)")), PreconditionError);
}
