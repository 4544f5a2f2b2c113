#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depauw/path.hpp"
#include "depauw/torus.hpp"

namespace depauw {

struct CellHistogram {
    int level = 0;
    std::vector<double> w;  // index = ix + iy * width

    int64_t width() const { return cells_per_axis(level); }
    double total() const;
    double& at(int64_t ix, int64_t iy) { return w[static_cast<size_t>(ix + iy * width())]; }
    double at(int64_t ix, int64_t iy) const { return w[static_cast<size_t>(ix + iy * width())]; }
};

// Pushforward of the ensemble under the evaluation map e_t, binned at the
// given cell level. t must lie inside every path's time range.
CellHistogram marginal(const PathEnsemble& e, double t, int level);

// Backward stopping map applied pathwise; weights unchanged.
PathEnsemble apply_stop(const PathEnsemble& e, double tau);

// Bounded-Lipschitz cylinder functionals: 1-bounded, 1-Lipschitz with
// respect to sup_i distance(gamma(t_i), gamma'(t_i)).
struct BLFunctional {
    enum class Kind { anchor_distance, pair_distance };
    Kind kind = Kind::anchor_distance;
    double t1 = 1.0, t2 = 1.0;
    Vec2 anchor{};
    std::string name;

    double eval(const Path& p) const;
};

inline constexpr const char* kBLBankVersion = "bl-bank-v1";

// The fixed, versioned test bank: clamped anchor distances and scaled pair
// distances over the cylinder times {t_min, 1/8, 1/2, 1}.
std::vector<BLFunctional> standard_bl_bank(double t_min);

struct BLDistanceEstimate {
    double value = 0.0;   // max over the bank of |mean difference|
    std::string bank_version = kBLBankVersion;
    uint64_t n1 = 0, n2 = 0;
    std::vector<double> per_functional;
};

// Lower estimate of the bounded-Lipschitz distance between the two path
// laws, over the given bank.
BLDistanceEstimate bl_distance(const PathEnsemble& e1, const PathEnsemble& e2,
                               const std::vector<BLFunctional>& bank);

// Joint cell histogram of (position at the earliest computed time, position
// at time 1); start is the e_0 surrogate with displacement error <= 2 t_min.
struct EndpointJointHistogram {
    int start_level = 0;
    int target_level = 0;
    std::vector<double> w;  // index = start_index * targets + target_index
    double t_min = 0.0;

    int64_t starts_per_axis() const { return cells_per_axis(start_level); }
    int64_t targets_per_axis() const { return cells_per_axis(target_level); }
    size_t n_starts() const { return static_cast<size_t>(starts_per_axis() * starts_per_axis()); }
    size_t n_targets() const
    {
        return static_cast<size_t>(targets_per_axis() * targets_per_axis());
    }
    double total() const;
    CellHistogram start_marginal() const;
    CellHistogram target_marginal() const;
};

EndpointJointHistogram endpoint_joint(const PathEnsemble& e, int start_level, int target_level);

// General two-time joint histogram (rows at time_a, columns at time_b); the
// endpoint joint is the special case (earliest time, 1).
EndpointJointHistogram joint_histogram(const PathEnsemble& e, double time_a, int level_a,
                                       double time_b, int level_b);

// Conditional target distributions per start cell (rows normalised to 1;
// rows with zero mass are omitted and counted).
struct ConditionalHistogram {
    int start_level = 0;
    int target_level = 0;
    struct Row {
        int64_t start_index = 0;
        double mass = 0.0;
        std::vector<double> prob;
    };
    std::vector<Row> rows;
    uint64_t dropped_rows = 0;
};

ConditionalHistogram disintegrate(const EndpointJointHistogram& joint);

// Black cells at a level: checkerboard value 1.
std::vector<uint8_t> checkerboard_mask(int level);

struct StochasticityRow {
    int64_t ix = 0, iy = 0;
    double mass = 0.0;
    double max_atom = 0.0;
    double black_mass = 0.0;
    double white_mass = 0.0;
};

struct StochasticityReport {
    int start_level = 0, target_level = 0;
    std::vector<StochasticityRow> rows;
    double frac_max_atom_le = 0.0;    // fraction of rows with max atom <= atom_cutoff
    double frac_black_within = 0.0;   // fraction with |black - 0.5| <= black_tol
    double atom_cutoff = 0.6;
    double black_tol = 0.05;
    double max_atom_q10 = 0.0, max_atom_q50 = 0.0, max_atom_q90 = 0.0;
    double black_q10 = 0.0, black_q50 = 0.0, black_q90 = 0.0;
};

// Per-start-cell stochasticity diagnostics of the estimated conditional law
// of the time-1 position given the (surrogate) time-0 cell.
StochasticityReport stochasticity_report(const ConditionalHistogram& cond,
                                         const std::vector<uint8_t>& black_mask,
                                         double atom_cutoff = 0.6, double black_tol = 0.05);

struct BranchTVReport {
    int start_level = 0, target_level = 0;
    uint64_t common_rows = 0;
    double frac_tv_ge = 0.0;  // fraction of common rows with TV >= tv_cutoff
    double tv_cutoff = 0.9;
    double tv_q10 = 0.0, tv_q50 = 0.0;
};

// Total-variation distance between the branch-conditioned rows, per start
// cell common to both branch estimates.
BranchTVReport branch_tv_report(const ConditionalHistogram& cond_black,
                                const ConditionalHistogram& cond_white, double tv_cutoff = 0.9);

}  // namespace depauw
