#pragma once

#include <utility>
#include <vector>

#include "depauw/field.hpp"
#include "depauw/torus.hpp"

namespace depauw {

// Closed-form flow maps of the staged field, in exact dyadic arithmetic.
//
// Within stage k the motion is along the square rings
// {max(|x1-c1|, |x2-c2|) = r} of each filled square, at perimeter speed 4r
// in rescaled coordinates. Advancing time dt inside the stage advances every
// ring by the arc 4r * (2^k dt); the ring perimeter is 8r, so a full stage
// (dt = 2^-(k+1)) is exactly a quarter turn, a rigid rotation of the filled
// square. Points of empty squares, square centres, and square boundaries are
// fixed. Ring corners are passed through continuously (the perimeter
// parametrisation resolves the field's diagonal null set).

enum class FlowDirection { forward, backward };

// One within-stage step. Requires 0 <= dt <= 2^-(k+1); exact dyadic output.
TorusPoint stage_flow_exact(const TorusPoint& p, StageIndex stage, const Dyadic& dt,
                            FlowDirection dir = FlowDirection::forward);

// Image of a level-(k+1) (or finer) cell under the full flow of stage k.
// Filled squares 4-cycle their quadrant blocks; empty squares are fixed.
// Exact integer arithmetic; requires c.level >= stage.k + 1.
Cell stage_cell_map(const Cell& c, StageIndex stage, FlowDirection dir = FlowDirection::forward);

// The spec'd special case: stage implied by the cell level (stage = level-1).
inline Cell quarter_turn_cells(const Cell& c, FlowDirection dir = FlowDirection::forward)
{
    return stage_cell_map(c, StageIndex{c.level - 1}, dir);
}

// Flow query between two dyadic times in (0, 1]. Backward queries from t=1
// realise the regular selection started at time 1.
struct FlowQuery {
    Dyadic t_start;
    Dyadic t_end;
    int max_stage_depth = 40;
};

struct FlowResult {
    TorusPoint end;
    // Trajectory sampled at the query endpoints and every stage boundary
    // crossed, in traversal order.
    std::vector<std::pair<Dyadic, TorusPoint>> samples;
};

FlowResult flow(const TorusPoint& p, const FlowQuery& q);

// Double-precision ring flow. Full-stage steps are rigid motions and are
// bit-exact for double inputs; partial steps round at ~1 ulp (fine for Monte
// Carlo density evaluation, not for exact transport).
Vec2 stage_flow_double(Vec2 p, StageIndex stage, double dt,
                       FlowDirection dir = FlowDirection::forward);

// Full-stage map at double precision (rigid, exact).
Vec2 quarter_turn_double(Vec2 p, StageIndex stage, FlowDirection dir = FlowDirection::forward);

}  // namespace depauw
