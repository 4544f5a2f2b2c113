#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "depauw/mollify.hpp"
#include "depauw/rng.hpp"
#include "test_support.hpp"

using namespace depauw;
using depauw_test::kink_distance_unit;

TEST_SUITE_BEGIN("mollify");

namespace {

// Independent oracle: brute-force midpoint quadrature of the convolution.
double brute_convolve(double eps, Vec2 x, int n)
{
    Mollifier m(eps);
    double sum = 0.0;
    double hq = 2.0 * eps / n;
    for (int i = 0; i < n; ++i) {
        double y1 = -eps + (i + 0.5) * hq;
        for (int j = 0; j < n; ++j) {
            double y2 = -eps + (j + 0.5) * hq;
            sum += eval_stream_unit({x.x - y1, x.y - y2}) * m.psi(y1) * m.psi(y2);
        }
    }
    return sum * hq * hq;
}

}  // namespace

TEST_CASE("mollifier mass is 1 to quadrature accuracy")
{
    for (double eps : {0.25, 0.0625, 1.0 / 128.0}) {
        Mollifier m(eps);
        CHECK(std::fabs(m.mass_quadrature() - 1.0) < 1e-8);
        CHECK(m.psi(0.9 * eps) > 0.0);
        CHECK(m.psi(1.01 * eps) == 0.0);
    }
    CHECK_THROWS(Mollifier(0.0));
}

TEST_CASE("exact node convolution agrees with the brute-force oracle")
{
    const double eps = 1.0 / 16.0;
    Mollifier m(eps);
    SplitMix64 rng(17);
    for (int i = 0; i < 8; ++i) {
        Vec2 x{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        double out[4];
        convolve_stream_node(m, x, out);
        double ref = brute_convolve(eps, x, 1200);
        CHECK(std::fabs(out[0] - ref) < 2e-6);
    }
    // derivative channels: compare with central differences of the S channel
    for (int i = 0; i < 6; ++i) {
        Vec2 x{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        double d = 1e-6;
        double o[4], oxp[4], oxm[4], oyp[4], oym[4];
        convolve_stream_node(m, x, o);
        convolve_stream_node(m, {x.x + d, x.y}, oxp);
        convolve_stream_node(m, {x.x - d, x.y}, oxm);
        convolve_stream_node(m, {x.x, x.y + d}, oyp);
        convolve_stream_node(m, {x.x, x.y - d}, oym);
        CHECK(std::fabs((oxp[0] - oxm[0]) / (2 * d) - o[1]) < 1e-6);
        CHECK(std::fabs((oyp[0] - oym[0]) / (2 * d) - o[2]) < 1e-6);
        CHECK(std::fabs((oxp[2] - oxm[2]) / (2 * d) - o[3]) < 1e-5);
    }
}

TEST_CASE("slice build preconditions")
{
    CHECK_THROWS_AS(build_mollified(0.3, StageIndex{0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mollified(1.0 / 16, StageIndex{0}, 1.0 / 64.0), std::invalid_argument);
    // stage too deep: eps = 2^-4 admits only k <= 1
    CHECK(admissible_depth(1.0 / 16.0) == 1);
    CHECK(admissible_depth(1.0 / 128.0) == 4);
    try {
        build_mollified(1.0 / 16.0, StageIndex{2}, 0.0);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("admissible depth is 1") != std::string::npos);
    }
}

TEST_CASE("mollified field equals b away from kinks and vanishes at centres")
{
    const double eps = 1.0 / 32.0;
    MollifiedSlice slice = build_mollified(eps, StageIndex{0}, 0.0);
    const double h = slice.h;

    // centre of a filled square: zero by symmetry
    Vec2 v0 = slice.velocity({0.0, 0.0});
    CHECK(std::fabs(v0.x) < 1e-12);
    CHECK(std::fabs(v0.y) < 1e-12);
    Vec2 v1 = slice.velocity({1.0, 1.0});
    CHECK(std::fabs(v1.x) < 1e-12);
    CHECK(std::fabs(v1.y) < 1e-12);

    // exact agreement where the stream is one quadratic on the whole stencil;
    // the kernel support is the eps-square, which reaches sqrt(2) eps in the
    // euclidean metric used by kink_distance_unit
    SplitMix64 rng(23);
    int found = 0;
    double worst = 0.0;
    while (found < 3000) {
        Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        if (kink_distance_unit(p) < std::sqrt(2.0) * (eps + 3.0 * h)) continue;
        ++found;
        Vec2 vm = slice.velocity(p);
        Vec2 vb = eval_b(1.0, p);
        worst = std::max({worst, std::fabs(vm.x - vb.x), std::fabs(vm.y - vb.y)});
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("interpolated field is divergence-free to finite-difference accuracy")
{
    const double eps = 1.0 / 32.0;
    MollifiedSlice slice = build_mollified(eps, StageIndex{0}, 0.0);
    const double h = slice.h;
    const double d = 1e-6;
    SplitMix64 rng(31);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        double div = (slice.velocity({p.x + d, p.y}).x - slice.velocity({p.x - d, p.y}).x +
                      slice.velocity({p.x, p.y + d}).y - slice.velocity({p.x, p.y - d}).y) /
                     (2 * d);
        worst = std::max(worst, std::fabs(div));
    }
    CHECK(worst <= 1e-6 / h);
}

TEST_CASE("sup bound is uniform in eps")
{
    for (double eps : {1.0 / 16.0, 1.0 / 32.0}) {
        MollifiedSlice slice = build_mollified(eps, StageIndex{0}, 0.0);
        SplitMix64 rng(41);
        double sup = 0.0;
        for (int i = 0; i < 200000; ++i) {
            Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
            sup = std::max(sup, slice.velocity(p).norm());
        }
        // targeted scan along the jump collar where |b| is largest
        for (int i = 0; i < 2000; ++i) {
            double along = -0.5 + i / 2000.0;
            for (double off = -1.5 * eps; off <= 1.5 * eps; off += eps / 7.0)
                sup = std::max(sup, slice.velocity({0.5 + off, along}).norm());
        }
        CAPTURE(eps);
        CHECK(sup <= 2.0 + 1e-3);
        CHECK(sup > 1.8);  // the bound is tight up to the smoothing
    }
}

TEST_CASE("L1 distance to b halves when eps halves")
{
    // stratified-grid quadrature of |b_eps - b| over one period, stage 0
    auto l1_dist = [](const MollifiedSlice& slice) {
        double sum = 0.0;
        const int n = 1024;
        SplitMix64 rng(7);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Vec2 p{(i + rng.uniform01()) * 2.0 / n, (j + rng.uniform01()) * 2.0 / n};
                Vec2 d = slice.velocity(p) - eval_b(1.0, p);
                sum += d.norm();
            }
        }
        return sum * 4.0 / (static_cast<double>(n) * n);
    };
    double d4 = l1_dist(build_mollified(1.0 / 16.0, StageIndex{0}, 0.0));
    double d5 = l1_dist(build_mollified(1.0 / 32.0, StageIndex{0}, 0.0));
    double d6 = l1_dist(build_mollified(1.0 / 64.0, StageIndex{0}, 0.0));
    CHECK(d5 < d4);
    CHECK(d6 < d5);
    CHECK(d4 / d5 == doctest::Approx(2.0).epsilon(0.2));
    CHECK(d5 / d6 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("stage slices are rescalings and the field respects the schedule")
{
    const double eps = 1.0 / 64.0;
    MollifiedField f = MollifiedField::build(eps);
    CHECK(f.depth == 3);
    CHECK(f.floor_time() == doctest::Approx(1.0 / 16.0));

    // stage-k velocity at p equals stage-0-type evaluation at 2^k p of the
    // table with effective radius 2^k eps
    SplitMix64 rng(51);
    for (int i = 0; i < 200; ++i) {
        Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        double t = 0.2;  // stage 2
        Vec2 a = f.velocity(t, p);
        Vec2 b = f.slice(2).velocity(p);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
    }

    // truncated extension vanishes below the floor; strict mode throws
    Vec2 z = f.velocity(1.0 / 64.0, {0.3, 0.3});
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
    MollifiedField strict = f;
    strict.truncate_below_floor = false;
    CHECK_THROWS_AS(strict.velocity(1.0 / 64.0, Vec2{0.3, 0.3}), std::domain_error);
}

TEST_CASE("mollified velocity converges to b in the collar as eps shrinks")
{
    // pick points 2*eps away from kinks for the coarse eps: both slices agree
    // with b there; closer than eps the fields differ at O(1)
    const double e1 = 1.0 / 16.0, e2 = 1.0 / 32.0;
    MollifiedSlice s1 = build_mollified(e1, StageIndex{0}, 0.0);
    MollifiedSlice s2 = build_mollified(e2, StageIndex{0}, 0.0);
    SplitMix64 rng(61);
    int n = 0;
    double m1 = 0.0, m2 = 0.0;
    while (n < 4000) {
        Vec2 p{2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        ++n;
        Vec2 b = eval_b(1.0, p);
        m1 += (s1.velocity(p) - b).norm();
        m2 += (s2.velocity(p) - b).norm();
    }
    CHECK(m2 < m1);  // monotone improvement in L1 (sampled)
}

TEST_CASE("stream table cache round trip")
{
    std::string dir = "./.depauw_test_cache";
    std::filesystem::create_directories(dir);
    const double eps = 1.0 / 16.0, h = eps / 8.0;
    auto a = build_stream_table(eps, h, 0, dir);
    auto b = build_stream_table(eps, h, 0, dir);  // loaded from cache
    REQUIRE(a->n == b->n);
    CHECK(a->s == b->s);
    CHECK(a->sx == b->sx);
    CHECK(a->sy == b->sy);
    CHECK(a->sxy == b->sxy);
}

TEST_SUITE_END();
