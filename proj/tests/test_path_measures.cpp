#include "doctest.h"

#include <cmath>

#include "depauw/path_measures.hpp"
#include "depauw/rng.hpp"
#include "depauw/tracer.hpp"

using namespace depauw;

TEST_SUITE_BEGIN("path_measures");

namespace {

PathEnsemble exact_backward(uint64_t n, int depth, uint64_t seed)
{
    return backward_ensemble(n, depth, FieldRef::exact_field(), seed);
}

}  // namespace

TEST_CASE("marginal basics")
{
    // a fully stratified start count makes the start marginal exactly uniform
    PathEnsemble e = exact_backward(16384, 4, 3);
    CellHistogram h = marginal(e, 1.0, 2);
    for (double w : h.w) CHECK(w == doctest::Approx(1.0 / 64.0));
    CHECK(h.total() == doctest::Approx(1.0));

    // single-path ensemble: Dirac cell histogram
    PathEnsemble single;
    single.meta = e.meta;
    single.paths.push_back(e.paths[0]);
    single.paths[0].weight = 1.0;
    CellHistogram d = marginal(single, 0.25, 3);
    int nonzero = 0;
    for (double w : d.w)
        if (w != 0.0) ++nonzero;
    CHECK(nonzero == 1);

    CHECK_THROWS_AS(marginal(e, 0.01, 2), std::out_of_range);
}

TEST_CASE("apply_stop is the pathwise stopping map")
{
    PathEnsemble e = exact_backward(3000, 5, 11);
    PathEnsemble s0 = apply_stop(e, 0.0);
    for (size_t i = 0; i < e.paths.size(); ++i)
        CHECK(s0.paths[i].points.front().x == e.paths[i].points.front().x);

    PathEnsemble s = apply_stop(e, 0.25);
    // marginals at t >= tau unchanged, exactly
    for (double t : {0.25, 0.5, 1.0}) {
        CellHistogram a = marginal(e, t, 3);
        CellHistogram b = marginal(s, t, 3);
        CHECK(a.w == b.w);
    }
    // below tau the paths are frozen at gamma(tau)
    for (size_t i = 0; i < s.paths.size(); ++i) {
        Vec2 v = s.paths[i].at(0.0625);
        Vec2 r = e.paths[i].at(0.25);
        CHECK(v.x == r.x);
        CHECK(v.y == r.y);
    }
}

TEST_CASE("bl_distance: zero on identical ensembles, stopping obeys the 2 tau bound")
{
    PathEnsemble e = exact_backward(3000, 6, 21);
    auto bank = standard_bl_bank(e.meta.t_end);
    CHECK(bank.size() == 16);
    BLDistanceEstimate self = bl_distance(e, e, bank);
    CHECK(self.value == 0.0);

    double prev = 2.0;
    for (double tau : {0.5, 0.25, 0.125, 0.0625}) {
        BLDistanceEstimate d = bl_distance(apply_stop(e, tau), e, bank);
        CHECK(d.value <= 2.0 * tau + 1e-12);
        CHECK(d.value <= prev + 1e-12);
        prev = d.value;
    }
}

TEST_CASE("endpoint joint: projection consistency, exactly")
{
    PathEnsemble e = exact_backward(8192, 6, 33);
    EndpointJointHistogram j = endpoint_joint(e, 4, 1);
    CHECK(j.total() == doctest::Approx(1.0));
    CHECK(j.t_min == e.meta.t_end);

    CellHistogram rows = j.start_marginal();
    CellHistogram direct = marginal(e, e.meta.t_end, 4);
    CHECK(rows.w == direct.w);

    CellHistogram cols = j.target_marginal();
    CellHistogram direct1 = marginal(e, 1.0, 1);
    CHECK(cols.w == direct1.w);

    // reproducible under the seed
    EndpointJointHistogram j2 = endpoint_joint(exact_backward(8192, 6, 33), 4, 1);
    CHECK(j.w == j2.w);
}

TEST_CASE("disintegrate: normalised rows reconstruct the joint")
{
    PathEnsemble e = exact_backward(4096, 6, 41);
    EndpointJointHistogram j = endpoint_joint(e, 3, 0);
    ConditionalHistogram c = disintegrate(j);
    CHECK(c.rows.size() + c.dropped_rows == j.n_starts());

    std::vector<double> recon(j.n_targets(), 0.0);
    for (const auto& row : c.rows) {
        double sum = 0.0;
        for (double p : row.prob) sum += p;
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
        for (size_t t = 0; t < row.prob.size(); ++t) recon[t] += row.mass * row.prob[t];
    }
    CellHistogram cols = j.target_marginal();
    for (size_t t = 0; t < recon.size(); ++t) CHECK(std::fabs(recon[t] - cols.w[t]) <= 1e-12);
}

TEST_CASE("disintegrate: product joint gives identical rows; mixtures average")
{
    // product joint: rows all equal to the column distribution
    EndpointJointHistogram j;
    j.start_level = 1;
    j.target_level = 0;
    j.w.assign(j.n_starts() * j.n_targets(), 0.0);
    double col[4] = {0.4, 0.3, 0.2, 0.1};
    for (size_t s = 0; s < j.n_starts(); ++s)
        for (size_t t = 0; t < 4; ++t) j.w[s * 4 + t] = col[t] / static_cast<double>(j.n_starts());
    ConditionalHistogram c = disintegrate(j);
    REQUIRE(c.rows.size() == j.n_starts());
    for (const auto& row : c.rows)
        for (size_t t = 0; t < 4; ++t) CHECK(row.prob[t] == doctest::Approx(col[t]));

    // equal-row-mass mixture: rows of the half-half mixture are the average
    EndpointJointHistogram jb = j, jw = j;
    for (size_t s = 0; s < j.n_starts(); ++s) {
        for (size_t t = 0; t < 4; ++t) {
            jb.w[s * 4 + t] = (t == 0 ? 0.25 : 0.25) / static_cast<double>(j.n_starts());
            jw.w[s * 4 + t] = (t < 2 ? 0.5 : 0.0) / static_cast<double>(j.n_starts());
        }
    }
    EndpointJointHistogram mix = j;
    for (size_t i = 0; i < mix.w.size(); ++i) mix.w[i] = 0.5 * (jb.w[i] + jw.w[i]);
    ConditionalHistogram cb = disintegrate(jb), cw = disintegrate(jw), cm = disintegrate(mix);
    for (size_t r = 0; r < cm.rows.size(); ++r)
        for (size_t t = 0; t < 4; ++t)
            CHECK(cm.rows[r].prob[t] ==
                  doctest::Approx(0.5 * (cb.rows[r].prob[t] + cw.rows[r].prob[t])));
}

TEST_CASE("fiber preservation: stopping fixes the e_1 conditional rows")
{
    PathEnsemble e = exact_backward(4096, 6, 55);
    double tau = 0.125;
    PathEnsemble s = apply_stop(e, tau);
    // disintegrate with respect to the time-1 cell; columns at a time >= tau
    EndpointJointHistogram je = joint_histogram(e, 1.0, 2, 0.25, 3);
    EndpointJointHistogram js = joint_histogram(s, 1.0, 2, 0.25, 3);
    CHECK(je.w == js.w);
    ConditionalHistogram ce = disintegrate(je), cs = disintegrate(js);
    REQUIRE(ce.rows.size() == cs.rows.size());
    for (size_t r = 0; r < ce.rows.size(); ++r) {
        CHECK(ce.rows[r].start_index == cs.rows[r].start_index);
        CHECK(ce.rows[r].prob == cs.rows[r].prob);
    }
}

TEST_CASE("stochasticity report flags deterministic rows and measures black mass")
{
    // hand-built conditional: one Dirac row, one uniform row
    ConditionalHistogram c;
    c.start_level = 0;
    c.target_level = 0;
    c.rows.push_back({0, 0.5, {1.0, 0.0, 0.0, 0.0}});
    c.rows.push_back({1, 0.5, {0.25, 0.25, 0.25, 0.25}});
    auto mask = checkerboard_mask(0);
    REQUIRE(mask.size() == 4);
    CHECK(mask[0] == 0);  // cell (0,0)
    CHECK(mask[1] == 1);  // cell (1,0)
    StochasticityReport rep = stochasticity_report(c, mask);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].max_atom == 1.0);
    CHECK(rep.rows[1].max_atom == 0.25);
    CHECK(rep.rows[1].black_mass == doctest::Approx(0.5));
    CHECK(rep.frac_max_atom_le == doctest::Approx(0.5));

    // disjoint-support branch rows have TV = 1
    ConditionalHistogram cb = c, cw = c;
    cb.rows[0].prob = {0.0, 0.5, 0.0, 0.5};
    cb.rows[1].prob = {0.0, 0.3, 0.0, 0.7};
    cw.rows[0].prob = {0.6, 0.0, 0.4, 0.0};
    cw.rows[1].prob = {0.2, 0.0, 0.8, 0.0};
    BranchTVReport tv = branch_tv_report(cb, cw);
    CHECK(tv.common_rows == 2);
    CHECK(tv.frac_tv_ge == 1.0);
    CHECK(tv.tv_q50 == doctest::Approx(1.0));
}

TEST_CASE("small-scale stochasticity of the exact backward ensemble")
{
    // N = 65536 stratified paths, depth 8, rows at level 4, targets at level 0
    PathEnsemble e = exact_backward(65536, 8, 101);
    EndpointJointHistogram j = endpoint_joint(e, 4, 0);
    ConditionalHistogram c = disintegrate(j);
    StochasticityReport rep = stochasticity_report(c, checkerboard_mask(0));
    // every level-4 row is populated (1024 rows, 64 paths each on average)
    CHECK(c.dropped_rows == 0);
    // rows concentrate the black mass near 1/2 and are far from Dirac
    CHECK(rep.frac_black_within >= 0.8);
    CHECK(rep.frac_max_atom_le >= 0.8);
}

TEST_SUITE_END();
