#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "depauw/dyadic.hpp"

namespace depauw {

struct Vec2 {
    double x = 0.0, y = 0.0;
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    double norm() const { return std::hypot(x, y); }
    double sup_norm() const { return std::max(std::fabs(x), std::fabs(y)); }
};

// The construction is periodic with respect to the even lattice
// Lambda = {(y1,y2) in Z^2 : y1+y2 even}, so the smallest rectangular torus
// carrying it is [0,2)^2. All coordinates live there.
inline constexpr int64_t kTorusPeriod = 2;

inline double wrap2(double x) { return x - 2.0 * std::floor(x / 2.0); }

// Point on the period-2 torus with exact dyadic coordinates in [0,2).
struct TorusPoint {
    Dyadic x, y;

    TorusPoint() = default;
    TorusPoint(Dyadic px, Dyadic py) : x(px.mod_pos(kTorusPeriod)), y(py.mod_pos(kTorusPeriod)) {}
    static TorusPoint from_doubles(double px, double py)
    {
        return TorusPoint(Dyadic::from_double(px), Dyadic::from_double(py));
    }

    Vec2 to_vec2() const { return {x.to_double(), y.to_double()}; }
    friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const TorusPoint& a, const TorusPoint& b) { return !(a == b); }
    std::string to_json() const
    {
        return "[\"" + x.to_pow2_string() + "\",\"" + y.to_pow2_string() + "\"]";
    }
};

// Dyadic square [ix,ix+1) x [iy,iy+1) scaled by 2^-level on the torus.
// Index range per axis is [0, 2^(level+1)) since the torus has side 2.
struct Cell {
    int level = 0;
    int64_t ix = 0, iy = 0;

    friend bool operator==(const Cell& a, const Cell& b)
    {
        return a.level == b.level && a.ix == b.ix && a.iy == b.iy;
    }
    friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
    friend bool operator<(const Cell& a, const Cell& b)
    {
        if (a.level != b.level) return a.level < b.level;
        if (a.iy != b.iy) return a.iy < b.iy;
        return a.ix < b.ix;
    }
};

inline int64_t cells_per_axis(int level) { return int64_t(kTorusPeriod) << level; }

inline Cell cell_of(const TorusPoint& p, int level)
{
    if (level < 0) throw std::invalid_argument("cell_of: level must be >= 0");
    Cell c;
    c.level = level;
    c.ix = p.x.mul_pow2(level).floor_int64();
    c.iy = p.y.mul_pow2(level).floor_int64();
    return c;
}

// Level-k checkerboard indicator: parity of the cell index pair. At level 0
// this is the unit checkerboard (floor(x1)+floor(x2)) mod 2.
inline int checkerboard_value(const Cell& c) { return static_cast<int>((c.ix + c.iy) & 1); }

inline TorusPoint cell_center(const Cell& c)
{
    Dyadic half = Dyadic::scaled(1, 1);
    return TorusPoint((Dyadic(c.ix) + half).mul_pow2(-c.level),
                      (Dyadic(c.iy) + half).mul_pow2(-c.level));
}

inline TorusPoint cell_corner(const Cell& c)
{
    return TorusPoint(Dyadic(c.ix).mul_pow2(-c.level), Dyadic(c.iy).mul_pow2(-c.level));
}

inline Cell parent_cell(const Cell& c)
{
    if (c.level == 0) throw std::invalid_argument("parent_cell: level-0 cell has no parent");
    return Cell{c.level - 1, c.ix >> 1, c.iy >> 1};
}

inline bool contains(const Cell& c, const TorusPoint& p) { return cell_of(p, c.level) == c; }

// Euclidean geodesic distance on the period-2 torus (wrap per axis).
inline double torus_distance(const TorusPoint& p, const TorusPoint& q)
{
    double dx = std::fabs(p.x.to_double() - q.x.to_double());
    double dy = std::fabs(p.y.to_double() - q.y.to_double());
    if (dx > 1.0) dx = 2.0 - dx;
    if (dy > 1.0) dy = 2.0 - dy;
    return std::hypot(dx, dy);
}

inline double torus_distance(Vec2 p, Vec2 q)
{
    auto wrap = [](double d) {
        d = std::fabs(std::fmod(d, 2.0));
        return d > 1.0 ? 2.0 - d : d;
    };
    return std::hypot(wrap(p.x - q.x), wrap(p.y - q.y));
}

// The two square-grid lattices of the construction: L1 at level k is
// 2^-k Z^2, L2 is its translate by (2^-k-1, 2^-k-1). Squares of the shifted
// grid S2_k have centres on L1_k; the centre is "filled" when its scaled
// coordinates have even sum.
struct Lattice {
    enum class Kind { L1, L2 };
    Kind kind = Kind::L1;
    int level = 0;

    TorusPoint site(int64_t i, int64_t j) const
    {
        Dyadic sx = Dyadic(i).mul_pow2(-level);
        Dyadic sy = Dyadic(j).mul_pow2(-level);
        if (kind == Kind::L2) {
            Dyadic off = Dyadic::pow2(-(level + 1));
            sx += off;
            sy += off;
        }
        return TorusPoint(sx, sy);
    }
};

}  // namespace depauw
