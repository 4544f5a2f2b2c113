#pragma once

#include <algorithm>
#include <cmath>

#include "depauw/field.hpp"
#include "depauw/torus.hpp"

namespace depauw_test {

// Sup-norm distance from the nearest kink line of the unit-stage stream
// (square boundaries and the diagonals of filled squares).
inline double kink_distance_unit(depauw::Vec2 p)
{
    long m1, m2;
    depauw::containing_square(p, m1, m2);
    double a = p.x - static_cast<double>(m1), b = p.y - static_cast<double>(m2);
    double to_boundary = 0.5 - std::max(std::fabs(a), std::fabs(b));
    if (!depauw::square_is_filled(m1, m2)) return to_boundary;
    double to_diag = std::min(std::fabs(a - b), std::fabs(a + b)) / std::sqrt(2.0);
    return std::min(to_boundary, to_diag);
}

}  // namespace depauw_test
