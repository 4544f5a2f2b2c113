#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "depauw/exact_flow.hpp"
#include "depauw/field.hpp"
#include "depauw/testfn.hpp"
#include "depauw/torus.hpp"

namespace depauw {

// Piecewise-constant density on the level-k dyadic grid of the torus.
// Transport under full stages is an exact permutation of the values, so the
// checkerboard family evolves with no rounding at all.
struct GridDensity {
    int level = 0;
    std::vector<double> values;  // row-major, index = ix + iy * width
    double bound = 1.0;

    int64_t width() const { return cells_per_axis(level); }
    size_t index(int64_t ix, int64_t iy) const
    {
        return static_cast<size_t>(ix + iy * width());
    }
    double at(int64_t ix, int64_t iy) const { return values[index(ix, iy)]; }
    double& at(int64_t ix, int64_t iy) { return values[index(ix, iy)]; }

    static GridDensity constant(int level, double v);
    // The unit checkerboard floor(x1)+floor(x2) mod 2 viewed at scale 2^-level
    // (cell value = parity of the index pair), optionally complemented.
    static GridDensity checkerboard(int level, bool complement = false);

    GridDensity refined() const;  // one level finer, values replicated
    double mean() const;
    int64_t support_count() const;  // cells with value > 0 (exact compare)
};

// Transport through one full stage: values permuted by the stage cell map.
// Requires d.level >= stage.k + 1 (refine first if coarser).
GridDensity pushforward_stage(const GridDensity& d, StageIndex stage, FlowDirection dir);

// Density trajectory at the dyadic checkpoint times 1, 1/2, ..., 2^-depth,
// each stored at its natural grid level. Pointwise values at stage-interior
// times come from the within-stage pullback.
struct DensityTrajectory {
    // checkpoints[k] = (2^-k, density at level max(k, 0))
    std::vector<std::pair<Dyadic, GridDensity>> checkpoints;

    int depth() const { return static_cast<int>(checkpoints.size()) - 1; }
    const GridDensity& at_checkpoint(int k) const { return checkpoints.at(static_cast<size_t>(k)).second; }
    // rho(t, x) for t in (2^-depth, 1]: exact value of the transported
    // density (within-stage flow evaluated in double precision).
    double value_at(double t, Vec2 x) const;
};

// Backward evolution of the unit checkerboard from t = 1: the refining
// cascade rho(2^-k, x) = checkerboard(2^k x) with a parity flip for odd k.
DensityTrajectory evolve_rho_B(int depth);
// The complementary trajectory (rho_W = 1 - rho_B at every checkpoint).
DensityTrajectory evolve_rho_W(int depth);

struct PropertyReport {
    bool sum_identity = true;       // rho_B + rho_W == 1 per cell, exactly
    bool support_union = true;      // supports cover every cell
    bool support_disjoint = true;   // supports never overlap
    bool halves_average = true;     // unit-cell averages are exactly 1/2 for k >= 1
    std::vector<std::string> failures;

    bool all_pass() const
    {
        return sum_identity && support_union && support_disjoint && halves_average;
    }
};

PropertyReport check_properties(const DensityTrajectory& traj_B, const DensityTrajectory& traj_W);

struct ResidualEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    uint64_t n_samples = 0;

    bool within(double k_sigma) const
    {
        return std::fabs(estimate) <= k_sigma * std_error;
    }
};

// Monte Carlo estimate of the weak continuity-equation residual
//   integral of rho * (d_t phi + b . grad phi) over (0,1) x T^2
// which vanishes for exact transport and compactly supported phi.
ResidualEstimate weak_divergence_residual(const DensityTrajectory& traj, const SpaceTimeBump& phi,
                                          uint64_t n_samples, uint64_t seed, int workers = 0);

}  // namespace depauw
