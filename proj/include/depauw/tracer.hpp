#pragma once

#include <cstdint>
#include <string>

#include "depauw/exact_flow.hpp"
#include "depauw/mollify.hpp"
#include "depauw/path.hpp"

namespace depauw {

// Field handle for the integrator: the exact staged field (optionally
// truncated below tau) or a mollified approximation.
struct FieldRef {
    enum class Kind { exact, mollified };
    Kind kind = Kind::exact;
    const MollifiedField* moll = nullptr;
    double truncate_tau = 0.0;

    static FieldRef exact_field(double tau = 0.0)
    {
        FieldRef f;
        f.kind = Kind::exact;
        f.truncate_tau = tau;
        return f;
    }
    static FieldRef mollified(const MollifiedField& m)
    {
        FieldRef f;
        f.kind = Kind::mollified;
        f.moll = &m;
        return f;
    }

    Vec2 velocity(double t, Vec2 p) const;
    std::string describe() const;
};

struct IntegrationResult {
    Path path;                      // samples at every accepted step, times ascending
    double residual_estimate = 0.0; // discrete integral of |dgamma/dt - b(t,gamma)|
};

// Classical fixed-step RK4 between t0 and t1 (either direction). Substeps
// are uniform within each stage and land exactly on stage boundaries (the
// nominal step is rounded per stage to divide the span). For the exact
// field, substeps additionally split at the ring-corner events of the
// trajectory's sector, where the field jumps: within a sector the field is
// linear with nilpotent matrix, so RK4 there is exact to rounding.
IntegrationResult integrate(const FieldRef& field, Vec2 start, double t0, double t1, double step);

// Seeded start distributions. Coordinates are quantised to the absolute
// 2^-52 grid (see exact_flow: full-stage maps are then bit-exact in doubles).
struct StartDistribution {
    enum class Kind { stratified_uniform, uniform_cell, dirac_jitter };
    Kind kind = Kind::stratified_uniform;
    Cell cell{};
    Vec2 point{};
    double jitter_radius = 0.0;

    // Uniform on the torus: one jittered sample per dyadic stratum, strata
    // chosen as the N smallest seed-hashes among the finest grid with at
    // least N cells (exactly N samples, spatially unbiased, deterministic).
    static StartDistribution uniform() { return StartDistribution{}; }
    static StartDistribution on_cell(const Cell& c)
    {
        StartDistribution d;
        d.kind = Kind::uniform_cell;
        d.cell = c;
        return d;
    }
    static StartDistribution dirac(Vec2 p, double jitter)
    {
        StartDistribution d;
        d.kind = Kind::dirac_jitter;
        d.point = p;
        d.jitter_radius = jitter;
        return d;
    }

    std::string describe() const;
};

// N paths from t = 1 backward to 2^-depth, weights 1/N. For the exact field
// the full-stage cascade runs in (bit-exact) double arithmetic and paths are
// sampled at the stage boundaries; for a mollified field RK4 runs with the
// given step (default eps/4) and freezes below the field's admissible floor.
PathEnsemble backward_ensemble(uint64_t n, int depth, const FieldRef& field, uint64_t seed,
                               StartDistribution start = StartDistribution::uniform(),
                               double step = 0.0, int workers = 0);

struct LipschitzReport {
    double max_ratio = 0.0;
    double bound = 2.0;
    uint64_t pairs_checked = 0;
    bool pass = true;
};

// Checks distance(gamma(s), gamma(t)) <= bound * |s - t| over sampled pairs;
// bound is 2 for exact ensembles and 2 + 10*step for numeric ones.
LipschitzReport lipschitz_audit(const PathEnsemble& e);

}  // namespace depauw
