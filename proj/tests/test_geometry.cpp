#include "doctest.h"

#include <cmath>

#include "depauw/rng.hpp"
#include "depauw/torus.hpp"

using namespace depauw;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("cell_of basic examples")
{
    CHECK(cell_of(TorusPoint::from_doubles(0.75, 0.25), 0) == Cell{0, 0, 0});
    // half-open convention: x = 1.0 belongs to the cell starting at 1
    CHECK(cell_of(TorusPoint::from_doubles(1.0, 0.0), 0) == Cell{0, 1, 0});
    // floor(0.3 * 4) = 1, floor(1.7 * 4) = 6
    CHECK(cell_of(TorusPoint::from_doubles(0.3, 1.7), 2) == Cell{2, 1, 6});
    CHECK_THROWS(cell_of(TorusPoint::from_doubles(0.1, 0.1), -1));
}

TEST_CASE("cell_of refinement: level k+1 cell is a child of the level k cell")
{
    SplitMix64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        TorusPoint p = TorusPoint::from_doubles(2.0 * rng.uniform01(), 2.0 * rng.uniform01());
        int k = static_cast<int>(rng.below(10));
        Cell coarse = cell_of(p, k);
        Cell fine = cell_of(p, k + 1);
        CHECK(parent_cell(fine) == coarse);
        CHECK(contains(coarse, p));
        CHECK(contains(fine, p));
    }
}

TEST_CASE("checkerboard values and translation flip")
{
    CHECK(checkerboard_value(Cell{0, 0, 0}) == 0);
    CHECK(checkerboard_value(Cell{0, 1, 0}) == 1);
    CHECK(checkerboard_value(Cell{3, 5, 6}) == 1);
    SplitMix64 rng(21);
    for (int i = 0; i < 500; ++i) {
        TorusPoint p = TorusPoint::from_doubles(2.0 * rng.uniform01(), 2.0 * rng.uniform01());
        int v = checkerboard_value(cell_of(p, 0));
        TorusPoint px(p.x + Dyadic(1), p.y);
        TorusPoint py(p.x, p.y + Dyadic(1));
        CHECK(checkerboard_value(cell_of(px, 0)) == 1 - v);
        CHECK(checkerboard_value(cell_of(py, 0)) == 1 - v);
    }
}

TEST_CASE("torus distance")
{
    TorusPoint p = TorusPoint::from_doubles(0.1, 0.0);
    CHECK(torus_distance(p, p) == 0.0);
    CHECK(torus_distance(p, TorusPoint::from_doubles(1.9, 0.0)) == doctest::Approx(0.2));
    CHECK(torus_distance(TorusPoint::from_doubles(0.0, 0.0), TorusPoint::from_doubles(1.0, 1.0))
          == doctest::Approx(std::sqrt(2.0)));
    // symmetry
    SplitMix64 rng(3);
    for (int i = 0; i < 500; ++i) {
        TorusPoint a = TorusPoint::from_doubles(2.0 * rng.uniform01(), 2.0 * rng.uniform01());
        TorusPoint b = TorusPoint::from_doubles(2.0 * rng.uniform01(), 2.0 * rng.uniform01());
        CHECK(torus_distance(a, b) == doctest::Approx(torus_distance(b, a)));
        CHECK(torus_distance(a, b) <= std::sqrt(2.0) + 1e-12);
    }
}

TEST_CASE("lattice L2 is the half-cell translate of L1")
{
    for (int k = 0; k < 6; ++k) {
        Lattice l1{Lattice::Kind::L1, k};
        Lattice l2{Lattice::Kind::L2, k};
        Dyadic off = Dyadic::pow2(-(k + 1));
        for (int64_t i = 0; i < 4; ++i) {
            for (int64_t j = 0; j < 4; ++j) {
                TorusPoint a = l1.site(i, j);
                TorusPoint b = l2.site(i, j);
                CHECK(TorusPoint(a.x + off, a.y + off) == b);
            }
        }
    }
}

TEST_CASE("cell centers and corners")
{
    Cell c{2, 1, 6};
    TorusPoint ctr = cell_center(c);
    CHECK(ctr.x == Dyadic::scaled(3, 3));    // 0.375
    CHECK(ctr.y == Dyadic::scaled(13, 3));   // 1.625
    CHECK(cell_corner(c).x == Dyadic::scaled(1, 2));
    CHECK(cell_of(ctr, 2) == c);
}

TEST_CASE("point json serialization uses exact mantissa strings")
{
    TorusPoint p = TorusPoint::from_doubles(0.75, 1.0);
    CHECK(p.to_json() == "[\"3/2^2\",\"1\"]");
}

TEST_SUITE_END();
