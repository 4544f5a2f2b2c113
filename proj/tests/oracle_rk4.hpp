#pragma once

// Test-side oracle: plain fixed-step classical RK4 on the pointwise field,
// integrated stage by stage (the field is autonomous within a stage), but
// otherwise blind to the field's ring geometry. Independent of the library's
// flow maps and of its integrator.

#include <cmath>

#include "depauw/field.hpp"
#include "depauw/torus.hpp"

namespace depauw_test {

inline depauw::Vec2 oracle_stage_field(int k, depauw::Vec2 p)
{
    double s = std::ldexp(1.0, k);
    return depauw::eval_u({p.x * s, p.y * s});
}

inline depauw::Vec2 rk4_autonomous_step(int stage_k, depauw::Vec2 p, double h)
{
    depauw::Vec2 k1 = oracle_stage_field(stage_k, p);
    depauw::Vec2 k2 = oracle_stage_field(stage_k, p + (h / 2) * k1);
    depauw::Vec2 k3 = oracle_stage_field(stage_k, p + (h / 2) * k2);
    depauw::Vec2 k4 = oracle_stage_field(stage_k, p + h * k3);
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate from t0 to t1 (either direction), steps split at stage
// boundaries, nominal step size `step`.
inline depauw::Vec2 oracle_flow(depauw::Vec2 p, double t0, double t1, double step)
{
    double t = t0;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    while (t != t1) {
        double seg;
        int k;
        if (dir > 0) {
            k = 0;
            while (!(t >= std::ldexp(1.0, -(k + 1)))) ++k;
            seg = std::min(t1, std::ldexp(1.0, -k));
        } else {
            k = depauw::stage_of_time(t).k;
            seg = std::max(t1, std::ldexp(1.0, -(k + 1)));
        }
        double span = std::fabs(seg - t);
        long n = std::lround(std::ceil(span / step));
        if (n < 1) n = 1;
        double h = dir * span / static_cast<double>(n);
        for (long i = 0; i < n; ++i) p = rk4_autonomous_step(k, p, h);
        t = seg;
    }
    return {p.x - 2.0 * std::floor(p.x / 2.0), p.y - 2.0 * std::floor(p.y / 2.0)};
}

}  // namespace depauw_test
