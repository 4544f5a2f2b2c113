#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "depauw/torus.hpp"

namespace depauw {

// Wrap-aware interpolation helpers on the period-2 torus.
inline double torus_delta(double from, double to)
{
    double d = to - from;
    d -= 2.0 * std::floor((d + 1.0) / 2.0);  // representative in [-1, 1)
    return d;
}

inline Vec2 torus_lerp(Vec2 a, Vec2 b, double f)
{
    return {wrap2(a.x + f * torus_delta(a.x, b.x)), wrap2(a.y + f * torus_delta(a.y, b.y))};
}

// Sampled integral curve with a weight. Times are strictly increasing.
struct Path {
    std::vector<double> times;
    std::vector<Vec2> points;
    double weight = 1.0;

    size_t size() const { return times.size(); }
    double t_min() const { return times.front(); }
    double t_max() const { return times.back(); }

    // Value at t: stored sample when t is a sample time, otherwise
    // wrap-aware linear interpolation between neighbours.
    Vec2 at(double t) const
    {
        if (times.empty()) throw std::runtime_error("Path::at: empty path");
        if (t <= times.front()) {
            if (t < times.front()) throw std::out_of_range("Path::at: t below range");
            return points.front();
        }
        if (t >= times.back()) {
            if (t > times.back()) throw std::out_of_range("Path::at: t above range");
            return points.back();
        }
        auto it = std::lower_bound(times.begin(), times.end(), t);
        size_t i = static_cast<size_t>(it - times.begin());
        if (times[i] == t) return points[i];
        double f = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return torus_lerp(points[i - 1], points[i], f);
    }
};

// Backward stopping map S^tau: gamma(.) -> gamma(tau v .). The returned path
// is constant at gamma(tau) before tau and unchanged from tau on.
inline Path stop_backward(const Path& p, double tau)
{
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("stop_backward: tau must lie in [0,1]");
    if (tau <= p.t_min()) return p;
    Path out;
    out.weight = p.weight;
    if (tau >= p.t_max()) {
        out.times = p.times;
        Vec2 v = p.points.back();
        out.points.assign(p.points.size(), v);
        return out;
    }
    Vec2 stop_val = p.at(tau);
    bool tau_present = false;
    for (size_t i = 0; i < p.times.size(); ++i) {
        if (p.times[i] == tau) tau_present = true;
        if (p.times[i] < tau) {
            out.times.push_back(p.times[i]);
            out.points.push_back(stop_val);
        } else {
            if (!tau_present && p.times[i] > tau) {
                out.times.push_back(tau);
                out.points.push_back(stop_val);
                tau_present = true;
            }
            out.times.push_back(p.times[i]);
            out.points.push_back(p.points[i]);
        }
    }
    return out;
}

struct EnsembleMeta {
    std::string field;               // "exact" or "mollified"
    double eps = 0.0;                // 0 for the exact field
    double step = 0.0;               // 0 for exact flow
    uint64_t seed = 0;
    uint64_t n_paths = 0;
    double t_start = 1.0;
    double t_end = 0.0;
    int depth = 0;
    std::string start_distribution;
    double time0_error_bound = 0.0;  // 2 * t_end: displacement tail below t_end
};

struct PathEnsemble {
    std::vector<Path> paths;
    EnsembleMeta meta;

    double total_weight() const
    {
        double s = 0.0;
        for (const auto& p : paths) s += p.weight;
        return s;
    }
};

}  // namespace depauw
