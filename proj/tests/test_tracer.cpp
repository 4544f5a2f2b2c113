#include "doctest.h"

#include <cmath>

#include "depauw/exact_flow.hpp"
#include "depauw/rng.hpp"
#include "depauw/tracer.hpp"

using namespace depauw;

TEST_SUITE_BEGIN("tracer");

TEST_CASE("truncated field gives constant paths")
{
    FieldRef f = FieldRef::exact_field(/*tau=*/0.5);
    IntegrationResult r = integrate(f, {0.3, 0.1}, 0.5, 0.125, 1e-3);
    for (size_t i = 0; i < r.path.size(); ++i) {
        CHECK(r.path.points[i].x == 0.3);
        CHECK(r.path.points[i].y == 0.1);
    }
    CHECK(r.residual_estimate == 0.0);
}

TEST_CASE("integrate input validation")
{
    FieldRef f = FieldRef::exact_field();
    CHECK_THROWS_AS(integrate(f, {0.1, 0.1}, 0.0, 1.0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, {0.1, 0.1}, 0.5, 1.0, 0.0), std::invalid_argument);
    MollifiedField m = MollifiedField::build(1.0 / 16.0);
    CHECK_THROWS_AS(integrate(FieldRef::mollified(m), {0.1, 0.1}, 0.5, 1.0, 1.0 / 32.0),
                    std::invalid_argument);
}

TEST_CASE("exact-field RK4 matches the exact flow at 1e3 random starts")
{
    SplitMix64 rng(2025);
    FieldRef f = FieldRef::exact_field();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        IntegrationResult r = integrate(f, p, 1.0, 0.5, 1e-5);
        TorusPoint exact =
            flow(TorusPoint::from_doubles(p.x, p.y), FlowQuery{Dyadic(1), Dyadic::scaled(1, 1)})
                .end;
        worst = std::max(worst, torus_distance(r.path.points.front(), exact.to_vec2()));
        CHECK(r.residual_estimate < 1e-2);
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("mollified stage-0 quarter turn lands within O(eps) of the exact image")
{
    const double eps = 1.0 / 64.0;
    MollifiedField m = MollifiedField::build(eps);
    IntegrationResult r = integrate(FieldRef::mollified(m), {0.25, 0.0}, 0.5, 1.0, eps / 4.0);
    Vec2 end = r.path.points.back();
    double err = torus_distance(end, Vec2{0.0, 0.25});
    CHECK(err <= 4.0 * eps);
}

TEST_CASE("backward ensembles are deterministic and reproducible")
{
    FieldRef f = FieldRef::exact_field();
    PathEnsemble a = backward_ensemble(500, 6, f, 99);
    PathEnsemble b = backward_ensemble(500, 6, f, 99, StartDistribution::uniform(), 0.0, 2);
    REQUIRE(a.paths.size() == b.paths.size());
    for (size_t i = 0; i < a.paths.size(); ++i) {
        REQUIRE(a.paths[i].size() == b.paths[i].size());
        for (size_t j = 0; j < a.paths[i].size(); ++j) {
            CHECK(a.paths[i].points[j].x == b.paths[i].points[j].x);
            CHECK(a.paths[i].points[j].y == b.paths[i].points[j].y);
        }
    }
    PathEnsemble c = backward_ensemble(500, 6, f, 100);
    bool any_diff = false;
    for (size_t i = 0; i < c.paths.size() && !any_diff; ++i)
        any_diff = c.paths[i].points.back().x != a.paths[i].points.back().x;
    CHECK(any_diff);

    CHECK(a.meta.t_end == std::ldexp(1.0, -6));
    CHECK(a.meta.time0_error_bound == 2.0 * a.meta.t_end);
    CHECK(a.total_weight() == doctest::Approx(1.0));
}

TEST_CASE("exact ensemble paths sample the stage boundaries, times ascending")
{
    PathEnsemble e = backward_ensemble(10, 4, FieldRef::exact_field(), 7);
    for (const auto& p : e.paths) {
        REQUIRE(p.size() == 5);
        for (size_t j = 0; j < p.size(); ++j)
            CHECK(p.times[j] == std::ldexp(1.0, -static_cast<int>(4 - j)));
    }
    // endpoints agree with the dyadic exact flow, bit for bit
    SplitMix64 rng(7);
    for (const auto& p : e.paths) {
        TorusPoint start = TorusPoint::from_doubles(p.points.back().x, p.points.back().y);
        TorusPoint end = flow(start, FlowQuery{Dyadic(1), Dyadic::pow2(-4)}).end;
        CHECK(end.x.to_double() == p.points.front().x);
        CHECK(end.y.to_double() == p.points.front().y);
    }
}

TEST_CASE("level-2 occupancy of a backward ensemble is uniform within 4 sigma")
{
    PathEnsemble e = backward_ensemble(100000, 3, FieldRef::exact_field(), 31);
    const int level = 2;
    int64_t w = cells_per_axis(level);
    double pcell = 1.0 / static_cast<double>(w * w);
    for (double t : {1.0, 0.5, 0.25, 0.125}) {
        std::vector<double> counts(static_cast<size_t>(w * w), 0.0);
        for (const auto& p : e.paths) {
            Vec2 x = p.at(t);
            int64_t ix = static_cast<int64_t>(std::floor(x.x * std::ldexp(1.0, level))) % w;
            int64_t iy = static_cast<int64_t>(std::floor(x.y * std::ldexp(1.0, level))) % w;
            counts[static_cast<size_t>(ix + iy * w)] += 1.0;
        }
        double n = static_cast<double>(e.paths.size());
        double bound = 4.0 * std::sqrt(n * pcell * (1.0 - pcell));
        for (double c : counts) CHECK(std::fabs(c - n * pcell) <= bound);
    }
}

TEST_CASE("lipschitz audit")
{
    PathEnsemble e = backward_ensemble(2000, 8, FieldRef::exact_field(), 13);
    LipschitzReport rep = lipschitz_audit(e);
    CHECK(rep.pass);
    CHECK(rep.max_ratio <= 2.0 + 1e-12);
    CHECK(rep.bound == 2.0);

    // constant paths have ratio zero
    PathEnsemble frozen;
    frozen.meta = e.meta;
    Path c;
    c.times = {0.25, 0.5, 1.0};
    c.points = {{0.3, 0.4}, {0.3, 0.4}, {0.3, 0.4}};
    frozen.paths.push_back(c);
    CHECK(lipschitz_audit(frozen).max_ratio == 0.0);

    // mollified ensemble: the sup bound is 2 + O(interpolation)
    const double eps = 1.0 / 64.0;
    MollifiedField m = MollifiedField::build(eps);
    PathEnsemble me = backward_ensemble(200, 5, FieldRef::mollified(m), 17);
    LipschitzReport mrep = lipschitz_audit(me);
    CHECK(mrep.max_ratio <= 2.0 + 1e-3);
    CHECK(mrep.pass);
}

TEST_CASE("mollified paths freeze below the admissible floor")
{
    const double eps = 1.0 / 32.0;  // admissible depth 2, floor 1/8
    MollifiedField m = MollifiedField::build(eps);
    CHECK(m.depth == 2);
    PathEnsemble e = backward_ensemble(50, 6, FieldRef::mollified(m), 5);
    for (const auto& p : e.paths) {
        Vec2 at_floor = p.at(0.125);
        for (double t : {0.0625, 0.03125, 1.0 / 64.0}) {
            Vec2 x = p.at(t);
            CHECK(x.x == at_floor.x);
            CHECK(x.y == at_floor.y);
        }
    }
}

TEST_CASE("start distributions are seeded and quantised")
{
    Cell c{3, 5, 9};
    PathEnsemble e =
        backward_ensemble(200, 2, FieldRef::exact_field(), 77, StartDistribution::on_cell(c));
    for (const auto& p : e.paths) {
        Vec2 s = p.points.back();
        CHECK(cell_of(TorusPoint::from_doubles(s.x, s.y), 3) == c);
        CHECK(s.x == std::nearbyint(s.x * 0x1p52) * 0x1p-52);
    }
    PathEnsemble d = backward_ensemble(
        50, 2, FieldRef::exact_field(), 78, StartDistribution::dirac({0.3, 0.7}, 1.0 / 512.0));
    for (const auto& p : d.paths) {
        Vec2 s = p.points.back();
        CHECK(std::fabs(s.x - 0.3) <= 1.0 / 512.0 + 1e-12);
        CHECK(std::fabs(s.y - 0.7) <= 1.0 / 512.0 + 1e-12);
    }
}

TEST_SUITE_END();
