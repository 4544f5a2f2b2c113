#pragma once

#include <cmath>
#include <stdexcept>

#include "depauw/torus.hpp"

namespace depauw {

// The Depauw construction on the period-2 torus.
//
// Building block: an autonomous square rotor on the unit square around the
// origin,
//     w(x) = (0, 4*x1)   if 1/2 > |x1| > |x2|
//            (-4*x2, 0)  if 1/2 > |x2| > |x1|
//            (0, 0)      otherwise,
// i.e. motion along the square rings max(|x1|,|x2|) = r at speed 4r,
// counterclockwise. w vanishes on the diagonals |x1| = |x2| (a null set; the
// symmetric convention) and outside the square.
//
// u periodises w over the even lattice Lambda: each unit square of the
// shifted grid whose centre (m1,m2) has m1+m2 even is "filled" and carries a
// rotor; squares with odd centres are "empty" and carry zero.
//
// The staged field runs u at dyadic scales on a dyadic time schedule:
//     b(t, x) = u(2^k x)  for  2^-(k+1) < t <= 2^-k,   k = 0, 1, 2, ...
// There is no amplitude rescaling, so each stage of duration 2^-(k+1)
// advances every ring of its scale by exactly a quarter turn.

// Stage k acts on the time interval (2^-(k+1), 2^-k] at spatial scale 2^-k.
struct StageIndex {
    int k = 0;

    double t_lo() const { return std::ldexp(1.0, -(k + 1)); }
    double t_hi() const { return std::ldexp(1.0, -k); }
    Dyadic t_lo_dyadic() const { return Dyadic::pow2(-(k + 1)); }
    Dyadic t_hi_dyadic() const { return Dyadic::pow2(-k); }
    Dyadic duration() const { return Dyadic::pow2(-(k + 1)); }
};

// Stage containing time t in (0, 1].
inline StageIndex stage_of_time(double t)
{
    if (!(t > 0.0) || t > 1.0)
        throw std::domain_error("stage_of_time: t must lie in (0, 1]");
    int k = 0;
    while (t <= std::ldexp(1.0, -(k + 1))) ++k;
    return StageIndex{k};
}

inline StageIndex stage_of_time(const Dyadic& t)
{
    if (t.sign() <= 0 || t > Dyadic(1))
        throw std::domain_error("stage_of_time: t must lie in (0, 1]");
    int k = 0;
    while (t <= Dyadic::pow2(-(k + 1))) ++k;
    return StageIndex{k};
}

// w relative to a filled-square centre.
inline Vec2 eval_w(Vec2 rel)
{
    double a1 = std::fabs(rel.x), a2 = std::fabs(rel.y);
    if (a1 < 0.5 && a1 > a2) return {0.0, 4.0 * rel.x};
    if (a2 < 0.5 && a2 > a1) return {-4.0 * rel.y, 0.0};
    return {0.0, 0.0};
}

// Centre index of the shifted-grid unit square containing p (rounded
// coordinates); filled iff the index parity is even.
inline void containing_square(Vec2 p, long& m1, long& m2)
{
    m1 = std::lround(std::floor(p.x + 0.5));
    m2 = std::lround(std::floor(p.y + 0.5));
}

inline bool square_is_filled(long m1, long m2) { return ((m1 + m2) & 1L) == 0; }

// Lambda-periodisation of w. At most one translate contributes.
inline Vec2 eval_u(Vec2 p)
{
    long m1, m2;
    containing_square(p, m1, m2);
    if (!square_is_filled(m1, m2)) return {0.0, 0.0};
    return eval_w({p.x - static_cast<double>(m1), p.y - static_cast<double>(m2)});
}

// The staged field. Only defined for t > 0; t = 0 has no pointwise value.
inline Vec2 eval_b(double t, Vec2 p)
{
    StageIndex st = stage_of_time(t);
    double s = std::ldexp(1.0, st.k);
    return eval_u({p.x * s, p.y * s});
}

inline Vec2 eval_b(double t, const TorusPoint& p) { return eval_b(t, p.to_vec2()); }

// Truncated field: zero before time tau, b afterwards (t >= tau inclusive).
inline Vec2 eval_b_truncated(double tau, double t, Vec2 p)
{
    if (!(tau > 0.0)) throw std::domain_error("eval_b_truncated: tau must be positive");
    if (t < tau) return {0.0, 0.0};
    return eval_b(t, p);
}

// Stream function of stage k. On the unit stage,
//     H(q) = 2 * min(d, 1/2)^2,  d = sup-norm distance from q to the centre
//            of its square if filled, else the plateau 1/2,
// which is continuous, piecewise quadratic, and satisfies perp-grad H = u at
// every differentiability point (perp-grad = (-dH/dx2, dH/dx1)). Stage k uses
// H_k(x) = 2^-k H(2^k x), whose perp gradient is u(2^k x) = b on stage k.
inline double eval_stream_unit(Vec2 q)
{
    long m1, m2;
    containing_square(q, m1, m2);
    if (!square_is_filled(m1, m2)) return 0.5;
    double d = std::max(std::fabs(q.x - static_cast<double>(m1)),
                        std::fabs(q.y - static_cast<double>(m2)));
    if (d > 0.5) d = 0.5;
    return 2.0 * d * d;
}

inline double eval_stream(StageIndex stage, Vec2 p)
{
    double s = std::ldexp(1.0, stage.k);
    return eval_stream_unit({p.x * s, p.y * s}) / s;
}

inline double eval_stream(StageIndex stage, const TorusPoint& p)
{
    return eval_stream(stage, p.to_vec2());
}

// Field descriptor: evaluation depth limit for exact-flow queries and the
// essential sup bound |b| <= 2 (= 4 * 1/2, attained in the limit at the
// square edge midpoints).
struct DepauwField {
    int max_stage_depth = 24;
    static constexpr double sup_norm = 2.0;
};

}  // namespace depauw
