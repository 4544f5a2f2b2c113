#include "depauw/exact_flow.hpp"

#include <stdexcept>

namespace depauw {

namespace {

// Perimeter coordinate of zeta on its ring, counterclockwise from the
// bottom-right corner (r, -r). Each corner belongs to exactly one edge.
Dyadic perimeter_coord(const Dyadic& z1, const Dyadic& z2, const Dyadic& r)
{
    Dyadic two_r = r.doubled();
    if (z1 == r && z2 < r) return r + z2;                         // right edge
    if (z2 == r && z1 > -r) return two_r + (r - z1);              // top edge
    if (z1 == -r && z2 > -r) return two_r.doubled() + (r - z2);   // left edge
    return two_r.doubled() + two_r + (r + z1);                    // bottom edge
}

void point_at_perimeter(const Dyadic& s, const Dyadic& r, Dyadic& z1, Dyadic& z2)
{
    Dyadic two_r = r.doubled();
    Dyadic four_r = two_r.doubled();
    if (s < two_r) { z1 = r; z2 = s - r; return; }
    if (s < four_r) { z1 = two_r + r - s; z2 = r; return; }
    if (s < four_r + two_r) { z1 = -r; z2 = four_r + r - s; return; }
    z1 = s - four_r - two_r - r;
    z2 = -r;
}

}  // namespace

TorusPoint stage_flow_exact(const TorusPoint& p, StageIndex stage, const Dyadic& dt,
                            FlowDirection dir)
{
    if (dt.sign() < 0 || dt > stage.duration())
        throw std::invalid_argument(
            "stage_flow_exact: dt must lie in [0, 2^-(k+1)]; split the query across stages");
    if (dt.is_zero()) return p;

    // Rescale to the unit stage.
    Dyadic x1 = p.x.mul_pow2(stage.k);
    Dyadic x2 = p.y.mul_pow2(stage.k);
    Dyadic half = Dyadic::scaled(1, 1);
    int64_t m1 = (x1 + half).floor_int64();
    int64_t m2 = (x2 + half).floor_int64();
    if (((m1 + m2) & 1) != 0) return p;  // empty square

    Dyadic z1 = x1 - Dyadic(m1);
    Dyadic z2 = x2 - Dyadic(m2);
    Dyadic r = std::max(z1.abs(), z2.abs());
    if (r.is_zero() || r == half) return p;  // centre / boundary ring carry no field

    Dyadic delta = dt.mul_pow2(stage.k);  // rescaled time in (0, 1/2]
    Dyadic n1, n2;
    if (delta == half) {
        // Full stage: quarter turn, rigid.
        if (dir == FlowDirection::forward) { n1 = -z2; n2 = z1; }
        else { n1 = z2; n2 = -z1; }
    } else {
        Dyadic s = perimeter_coord(z1, z2, r);
        Dyadic arc = (r * delta).mul_pow2(2);  // 4 r delta <= 2r
        s = dir == FlowDirection::forward ? s + arc : s - arc;
        Dyadic perim = r.mul_pow2(3);
        if (s.sign() < 0) s += perim;
        else if (s >= perim) s -= perim;
        point_at_perimeter(s, r, n1, n2);
    }

    Dyadic y1 = (Dyadic(m1) + n1).mul_pow2(-stage.k);
    Dyadic y2 = (Dyadic(m2) + n2).mul_pow2(-stage.k);
    return TorusPoint(y1, y2);
}

Cell stage_cell_map(const Cell& c, StageIndex stage, FlowDirection dir)
{
    if (c.level < stage.k + 1)
        throw std::invalid_argument("stage_cell_map: cell level must be at least stage+1; refine first");
    const int L = c.level;
    const int shift = L + 1 - stage.k;          // square size in half-units is 2^shift
    const int64_t axis = int64_t(1) << (L + 2);  // torus size in half-units

    // Cell centre in units of 2^-(L+1).
    int64_t X = 2 * c.ix + 1, Y = 2 * c.iy + 1;
    int64_t m1 = (X + (int64_t(1) << (shift - 1))) >> shift;
    int64_t m2 = (Y + (int64_t(1) << (shift - 1))) >> shift;
    if (((m1 + m2) & 1) != 0) return c;  // empty square

    int64_t M1 = m1 << shift, M2 = m2 << shift;
    int64_t rx = X - M1, ry = Y - M2;
    int64_t nx, ny;
    if (dir == FlowDirection::forward) { nx = -ry; ny = rx; }
    else { nx = ry; ny = -rx; }
    int64_t Xp = ((M1 + nx) % axis + axis) % axis;
    int64_t Yp = ((M2 + ny) % axis + axis) % axis;
    return Cell{L, (Xp - 1) >> 1, (Yp - 1) >> 1};
}

FlowResult flow(const TorusPoint& p, const FlowQuery& q)
{
    const Dyadic one(1);
    if (q.t_start.sign() <= 0 || q.t_end.sign() <= 0 || q.t_start > one || q.t_end > one)
        throw std::invalid_argument("flow: times must lie in (0, 1]");

    FlowResult res;
    res.samples.emplace_back(q.t_start, p);
    TorusPoint cur = p;
    Dyadic t = q.t_start;

    if (q.t_start == q.t_end) {
        res.end = cur;
        return res;
    }
    const bool fwd = q.t_end > q.t_start;
    auto check_depth = [&](int k) {
        if (k > q.max_stage_depth)
            throw std::runtime_error(
                "flow: query crosses more than max_stage_depth stages; raise max_stage_depth");
    };

    while (t != q.t_end) {
        if (fwd) {
            // Moving up from t: the segment (t, next] lies in the stage k with
            // 2^-(k+1) <= t < 2^-k.
            int k = 0;
            while (!(t >= Dyadic::pow2(-(k + 1)))) ++k;
            check_depth(k);
            Dyadic seg_end = std::min(q.t_end, Dyadic::pow2(-k));
            cur = stage_flow_exact(cur, StageIndex{k}, seg_end - t, FlowDirection::forward);
            t = seg_end;
        } else {
            // Moving down from t: the segment [next, t) lies in the stage k
            // with 2^-(k+1) < t <= 2^-k.
            StageIndex st = stage_of_time(t);
            check_depth(st.k);
            Dyadic seg_end = std::max(q.t_end, st.t_lo_dyadic());
            cur = stage_flow_exact(cur, st, t - seg_end, FlowDirection::backward);
            t = seg_end;
        }
        res.samples.emplace_back(t, cur);
    }
    res.end = cur;
    return res;
}

namespace {

// Reassemble (m + n) 2^-k reduced into [0, 2). The centre index is wrapped
// into [0, 2^(k+1)) first: coordinates on the absolute 2^-52 grid then stay
// on it with every intermediate below magnitude 2^(k+1), hence exactly
// representable.
inline double reassemble_wrapped(double m, double n, double s)
{
    double period = 2.0 * s;  // 2^(k+1)
    double mr = m - period * std::floor(m / period);
    double y = (mr + n) / s;
    if (y < 0.0) y += 2.0;
    else if (y >= 2.0) y -= 2.0;
    return y;
}

}  // namespace

Vec2 quarter_turn_double(Vec2 p, StageIndex stage, FlowDirection dir)
{
    double s = std::ldexp(1.0, stage.k);
    double x1 = p.x * s, x2 = p.y * s;  // exact: scaling by 2^k
    double m1 = std::floor(x1 + 0.5), m2 = std::floor(x2 + 0.5);
    long par = std::lround(m1 + m2);
    if ((par & 1L) != 0) return p;
    double z1 = x1 - m1, z2 = x2 - m2;  // exact (Sterbenz-range subtraction)
    double n1, n2;
    if (dir == FlowDirection::forward) { n1 = -z2; n2 = z1; }
    else { n1 = z2; n2 = -z1; }
    return {reassemble_wrapped(m1, n1, s), reassemble_wrapped(m2, n2, s)};
}

Vec2 stage_flow_double(Vec2 p, StageIndex stage, double dt, FlowDirection dir)
{
    const double span = std::ldexp(1.0, -(stage.k + 1));
    if (dt < 0.0 || dt > span)
        throw std::invalid_argument("stage_flow_double: dt out of the stage span");
    if (dt == span) return quarter_turn_double(p, stage, dir);
    if (dt == 0.0) return p;

    double s = std::ldexp(1.0, stage.k);
    double x1 = p.x * s, x2 = p.y * s;
    double m1 = std::floor(x1 + 0.5), m2 = std::floor(x2 + 0.5);
    long par = std::lround(m1 + m2);
    if ((par & 1L) != 0) return p;
    double z1 = x1 - m1, z2 = x2 - m2;
    double r = std::max(std::fabs(z1), std::fabs(z2));
    if (r == 0.0 || r == 0.5) return p;

    double sc;
    if (z1 == r && z2 < r) sc = r + z2;
    else if (z2 == r && z1 > -r) sc = 3.0 * r - z1;
    else if (z1 == -r && z2 > -r) sc = 5.0 * r - z2;
    else sc = 7.0 * r + z1;

    double arc = 4.0 * r * (dt * s);
    sc += dir == FlowDirection::forward ? arc : -arc;
    double perim = 8.0 * r;
    if (sc < 0.0) sc += perim;
    else if (sc >= perim) sc -= perim;

    double n1, n2;
    if (sc < 2.0 * r) { n1 = r; n2 = sc - r; }
    else if (sc < 4.0 * r) { n1 = 3.0 * r - sc; n2 = r; }
    else if (sc < 6.0 * r) { n1 = -r; n2 = 5.0 * r - sc; }
    else { n1 = sc - 7.0 * r; n2 = -r; }

    return {reassemble_wrapped(m1, n1, s), reassemble_wrapped(m2, n2, s)};
}

}  // namespace depauw
