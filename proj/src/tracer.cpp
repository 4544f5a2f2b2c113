#include "depauw/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "depauw/parallel.hpp"
#include "depauw/rng.hpp"

namespace depauw {

namespace {

inline double quantize52(double x) { return std::nearbyint(x * 0x1p52) * 0x1p-52; }

// Linear branch of the exact field at a rescaled in-square position:
// velocity and the (rescaled) time to the corner ahead for travel direction
// sgn (+1 counterclockwise, -1 clockwise). Points on a diagonal belong to
// the edge ahead (the perimeter parametrisation passes through corners).
struct Branch {
    int edge = -1;  // 0 right, 1 top, 2 left, 3 bottom; -1 no motion
    double r = 0.0;

    Vec2 velocity(Vec2 z) const
    {
        switch (edge) {
            case 0: return {0.0, 4.0 * z.x};    // right: up for z.x > 0
            case 1: return {-4.0 * z.y, 0.0};   // top: left
            case 2: return {0.0, 4.0 * z.x};    // left: down
            case 3: return {-4.0 * z.y, 0.0};   // bottom: right
            default: return {0.0, 0.0};
        }
    }
    // rescaled time from z to the corner ahead (direction sgn)
    double time_to_corner(Vec2 z, int sgn) const
    {
        double speed = 4.0 * r;
        double dist;
        switch (edge) {
            case 0: dist = sgn > 0 ? r - z.y : z.y + r; break;
            case 1: dist = sgn > 0 ? z.x + r : r - z.x; break;
            case 2: dist = sgn > 0 ? z.y + r : r - z.y; break;
            case 3: dist = sgn > 0 ? r - z.x : z.x + r; break;
            default: return std::numeric_limits<double>::infinity();
        }
        return dist / speed;
    }
};

Branch resolve_branch(Vec2 z, int sgn)
{
    Branch b;
    double a1 = std::fabs(z.x), a2 = std::fabs(z.y);
    b.r = std::max(a1, a2);
    if (b.r == 0.0 || b.r >= 0.5) return b;  // centre or boundary ring: fixed
    if (a1 > a2) {
        b.edge = z.x > 0 ? 0 : 2;
    } else if (a2 > a1) {
        b.edge = z.y > 0 ? 1 : 3;
    } else {
        // on a corner: the edge ahead depends on the quadrant and direction
        if (z.x > 0 && z.y > 0) b.edge = sgn > 0 ? 1 : 0;        // (r, r)
        else if (z.x < 0 && z.y > 0) b.edge = sgn > 0 ? 2 : 1;   // (-r, r)
        else if (z.x < 0 && z.y < 0) b.edge = sgn > 0 ? 3 : 2;   // (-r, -r)
        else b.edge = sgn > 0 ? 0 : 3;                            // (r, -r)
    }
    return b;
}

inline Vec2 rk4_linear(Vec2 z, const Branch& br, double h, int sgn)
{
    // classical RK4 against the frozen linear branch (s * branch velocity)
    auto f = [&](Vec2 q) {
        Vec2 v = br.velocity(q);
        return Vec2{sgn * v.x, sgn * v.y};
    };
    Vec2 k1 = f(z);
    Vec2 k2 = f(z + (h / 2) * k1);
    Vec2 k3 = f(z + (h / 2) * k2);
    Vec2 k4 = f(z + h * k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One exact-field substep of (unsigned) physical length h inside stage k,
// travelling in direction sgn; splits at ring-corner events.
Vec2 exact_substep(Vec2 p, int stage_k, double h, int sgn)
{
    double s = std::ldexp(1.0, stage_k);
    double x1 = p.x * s, x2 = p.y * s;
    double m1 = std::floor(x1 + 0.5), m2 = std::floor(x2 + 0.5);
    if ((std::lround(m1 + m2) & 1L) != 0) return p;
    Vec2 z{x1 - m1, x2 - m2};
    double remaining = h * s;  // rescaled time
    for (int guard = 0; guard < 64 && remaining > 0.0; ++guard) {
        Branch br = resolve_branch(z, sgn);
        if (br.edge < 0) break;
        double tc = br.time_to_corner(z, sgn);
        double tau = std::min(tc, remaining);
        z = rk4_linear(z, br, tau, sgn);
        remaining -= tau;
        if (tau == tc) {
            // snap exactly onto the corner the edge run ends at: corners in
            // ccw order are c0=(r,-r), c1=(r,r), c2=(-r,r), c3=(-r,-r), and
            // ccw travel on edge e ends at c[(e+1)%4], cw travel at c[e]
            double r = br.r;
            const Vec2 corners[4] = {{r, -r}, {r, r}, {-r, r}, {-r, -r}};
            z = corners[sgn > 0 ? (br.edge + 1) % 4 : br.edge];
        }
    }
    double period = 2.0 * s;
    auto reassemble = [&](double m, double n) {
        double mr = m - period * std::floor(m / period);
        double y = (mr + n) / s;
        if (y < 0.0) y += 2.0;
        else if (y >= 2.0) y -= 2.0;
        return y;
    };
    return {reassemble(m1, z.x), reassemble(m2, z.y)};
}

}  // namespace

Vec2 FieldRef::velocity(double t, Vec2 p) const
{
    if (kind == Kind::mollified) return moll->velocity(t, p);
    if (truncate_tau > 0.0 && t < truncate_tau) return {0.0, 0.0};
    return eval_b(t, p);
}

std::string FieldRef::describe() const
{
    if (kind == Kind::mollified) return "mollified(eps=" + std::to_string(moll->eps) + ")";
    if (truncate_tau > 0.0) return "exact(truncated tau=" + std::to_string(truncate_tau) + ")";
    return "exact";
}

IntegrationResult integrate(const FieldRef& field, Vec2 start, double t0, double t1, double step)
{
    if (!(t0 > 0.0) || t0 > 1.0 || !(t1 > 0.0) || t1 > 1.0)
        throw std::invalid_argument("integrate: times must lie in (0, 1]");
    if (!(step > 0.0)) throw std::invalid_argument("integrate: step must be positive");
    if (field.kind == FieldRef::Kind::mollified && step > field.moll->eps / 4.0 + 1e-15)
        throw std::invalid_argument("integrate: step must be <= eps/4 for mollified fields");

    IntegrationResult res;
    res.path.times.push_back(t0);
    res.path.points.push_back({wrap2(start.x), wrap2(start.y)});

    Vec2 p = res.path.points.back();
    double t = t0;
    const int sgn = t1 >= t0 ? 1 : -1;

    while (t != t1) {
        // stage segment ahead of t in the travel direction
        int k;
        double seg_end;
        if (sgn > 0) {
            k = 0;
            while (!(t >= std::ldexp(1.0, -(k + 1)))) ++k;
            seg_end = std::min(t1, std::ldexp(1.0, -k));
        } else {
            k = stage_of_time(t).k;
            seg_end = std::max(t1, std::ldexp(1.0, -(k + 1)));
        }
        double span = std::fabs(seg_end - t);
        long nsub = std::max(1L, std::lround(span / step));
        double h = span / static_cast<double>(nsub);
        // a mollified field's inadmissible stages are its truncation region
        const bool segment_frozen =
            field.kind == FieldRef::Kind::mollified && k > field.moll->depth;

        for (long i = 0; i < nsub; ++i) {
            double ta = t + sgn * static_cast<double>(i) * h;
            double tb = i + 1 == nsub ? seg_end : t + sgn * static_cast<double>(i + 1) * h;
            Vec2 prev = p;
            // the truncated exact field b^tau vanishes below tau (tau is
            // normally a stage boundary; interior taus act at step resolution)
            bool frozen = segment_frozen;
            if (field.kind == FieldRef::Kind::exact && field.truncate_tau > 0.0)
                frozen = frozen || std::min(ta, tb) < field.truncate_tau;
            if (!frozen) {
                if (field.kind == FieldRef::Kind::exact) {
                    p = exact_substep(p, k, std::fabs(tb - ta), sgn);
                } else {
                    const MollifiedSlice& slice = field.moll->slice(k);
                    auto f = [&](Vec2 q) {
                        Vec2 v = slice.velocity(q);
                        return Vec2{sgn * v.x, sgn * v.y};
                    };
                    double hh = std::fabs(tb - ta);
                    Vec2 k1 = f(p);
                    Vec2 k2 = f(p + (hh / 2) * k1);
                    Vec2 k3 = f(p + (hh / 2) * k2);
                    Vec2 k4 = f(p + hh * k3);
                    p = p + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    p = {wrap2(p.x), wrap2(p.y)};
                }
            }
            res.path.times.push_back(tb);
            res.path.points.push_back(p);
            if (!frozen) {
                // residual sample at the substep midpoint (frozen substeps
                // contribute exactly zero: no motion against a zero field)
                double dt_signed = tb - ta;
                double tm = 0.5 * (ta + tb);
                Vec2 vm = field.velocity(tm, torus_lerp(prev, p, 0.5));
                double dx = torus_delta(prev.x, p.x) / dt_signed;
                double dy = torus_delta(prev.y, p.y) / dt_signed;
                res.residual_estimate +=
                    std::hypot(dx - vm.x, dy - vm.y) * std::fabs(dt_signed);
            }
        }
        t = seg_end;
    }

    if (sgn < 0) {
        std::reverse(res.path.times.begin(), res.path.times.end());
        std::reverse(res.path.points.begin(), res.path.points.end());
    }
    return res;
}

namespace {

std::vector<uint64_t> stratified_selection(uint64_t n, uint64_t seed, int& level_out)
{
    int level = 0;
    while (static_cast<uint64_t>(cells_per_axis(level)) * cells_per_axis(level) < n) ++level;
    uint64_t m = static_cast<uint64_t>(cells_per_axis(level)) * cells_per_axis(level);
    level_out = level;
    std::vector<uint64_t> ids;
    if (m == n) {
        ids.resize(n);
        std::iota(ids.begin(), ids.end(), uint64_t(0));
        return ids;
    }
    std::vector<std::pair<uint64_t, uint64_t>> ranked(m);
    for (uint64_t s = 0; s < m; ++s) ranked[s] = {stream_for(seed ^ 0xa5a5a5a5ull, s).next(), s};
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<ptrdiff_t>(n), ranked.end());
    ids.reserve(n);
    for (uint64_t i = 0; i < n; ++i) ids.push_back(ranked[i].second);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

std::string StartDistribution::describe() const
{
    switch (kind) {
        case Kind::stratified_uniform: return "stratified-uniform";
        case Kind::uniform_cell:
            return "uniform-cell(level=" + std::to_string(cell.level) + ",ix=" +
                   std::to_string(cell.ix) + ",iy=" + std::to_string(cell.iy) + ")";
        default:
            return "dirac(x=" + std::to_string(point.x) + ",y=" + std::to_string(point.y) +
                   ",jitter=" + std::to_string(jitter_radius) + ")";
    }
}

PathEnsemble backward_ensemble(uint64_t n, int depth, const FieldRef& field, uint64_t seed,
                               StartDistribution start, double step, int workers)
{
    if (n < 1) throw std::invalid_argument("backward_ensemble: need n >= 1");
    if (depth < 0) throw std::invalid_argument("backward_ensemble: depth must be >= 0");

    PathEnsemble ens;
    ens.meta.field = field.describe();
    ens.meta.eps = field.kind == FieldRef::Kind::mollified ? field.moll->eps : 0.0;
    ens.meta.seed = seed;
    ens.meta.n_paths = n;
    ens.meta.t_start = 1.0;
    ens.meta.t_end = std::ldexp(1.0, -depth);
    ens.meta.depth = depth;
    ens.meta.start_distribution = start.describe();
    ens.meta.time0_error_bound = 2.0 * ens.meta.t_end;
    if (field.kind == FieldRef::Kind::mollified)
        ens.meta.step = step > 0.0 ? step : field.moll->eps / 4.0;
    else
        ens.meta.step = 0.0;

    // start positions, deterministic per index
    int strat_level = 0;
    std::vector<uint64_t> strata;
    if (start.kind == StartDistribution::Kind::stratified_uniform)
        strata = stratified_selection(n, seed, strat_level);

    auto start_point = [&](uint64_t i) -> Vec2 {
        SplitMix64 g = stream_for(seed, i);
        switch (start.kind) {
            case StartDistribution::Kind::stratified_uniform: {
                int64_t axis = cells_per_axis(strat_level);
                uint64_t s = strata[i];
                double w = std::ldexp(1.0, -strat_level);  // cell width 2^-level
                double sx = static_cast<double>(static_cast<int64_t>(s % uint64_t(axis))) * w;
                double sy = static_cast<double>(static_cast<int64_t>(s / uint64_t(axis))) * w;
                return {quantize52(sx + g.uniform01() * w), quantize52(sy + g.uniform01() * w)};
            }
            case StartDistribution::Kind::uniform_cell: {
                double w = std::ldexp(1.0, -start.cell.level);
                double sx = static_cast<double>(start.cell.ix) * w;
                double sy = static_cast<double>(start.cell.iy) * w;
                return {quantize52(sx + g.uniform01() * w), quantize52(sy + g.uniform01() * w)};
            }
            default: {
                double jx = (2.0 * g.uniform01() - 1.0) * start.jitter_radius;
                double jy = (2.0 * g.uniform01() - 1.0) * start.jitter_radius;
                return {quantize52(wrap2(start.point.x + jx)), quantize52(wrap2(start.point.y + jy))};
            }
        }
    };

    ens.paths.assign(n, Path{});
    const double t_end = ens.meta.t_end;
    const double mstep = ens.meta.step;

    parallel_chunks(n, workers, [&](size_t, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            Vec2 p0 = start_point(i);
            Path path;
            path.weight = 1.0 / static_cast<double>(n);
            if (field.kind == FieldRef::Kind::exact && field.truncate_tau == 0.0) {
                // full-stage cascade, sampled at the stage boundaries
                path.times.resize(static_cast<size_t>(depth) + 1);
                path.points.resize(static_cast<size_t>(depth) + 1);
                Vec2 p = p0;
                path.times[static_cast<size_t>(depth)] = 1.0;
                path.points[static_cast<size_t>(depth)] = p;
                for (int k = 0; k < depth; ++k) {
                    p = quarter_turn_double(p, StageIndex{k}, FlowDirection::backward);
                    size_t slot = static_cast<size_t>(depth - 1 - k);
                    path.times[slot] = std::ldexp(1.0, -(k + 1));
                    path.points[slot] = p;
                }
            } else {
                path = integrate(field, p0, 1.0, t_end, mstep > 0.0 ? mstep : 1e-3).path;
                path.weight = 1.0 / static_cast<double>(n);
            }
            ens.paths[i] = std::move(path);
        }
    });
    return ens;
}

LipschitzReport lipschitz_audit(const PathEnsemble& e)
{
    LipschitzReport rep;
    rep.bound = e.meta.step > 0.0 ? 2.0 + 10.0 * e.meta.step : 2.0;
    for (const auto& path : e.paths) {
        size_t m = path.size();
        if (m < 2) continue;
        auto check = [&](size_t a, size_t b) {
            double dt = path.times[b] - path.times[a];
            if (dt <= 0.0) return;
            double ratio = torus_distance(path.points[a], path.points[b]) / dt;
            rep.max_ratio = std::max(rep.max_ratio, ratio);
            ++rep.pairs_checked;
        };
        for (size_t i = 0; i + 1 < m; ++i) check(i, i + 1);
        size_t stride = std::max<size_t>(2, m / 8);
        for (size_t i = 0; i + stride < m; i += stride) check(i, i + stride);
        check(0, m - 1);
    }
    rep.pass = rep.max_ratio <= rep.bound + 1e-12;
    return rep;
}

}  // namespace depauw
