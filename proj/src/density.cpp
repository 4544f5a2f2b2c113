#include "depauw/density.hpp"

#include <cmath>
#include <stdexcept>

#include "depauw/parallel.hpp"
#include "depauw/rng.hpp"

namespace depauw {

GridDensity GridDensity::constant(int level, double v)
{
    GridDensity d;
    d.level = level;
    d.values.assign(static_cast<size_t>(d.width() * d.width()), v);
    d.bound = v;
    return d;
}

GridDensity GridDensity::checkerboard(int level, bool complement)
{
    GridDensity d;
    d.level = level;
    int64_t w = d.width();
    d.values.resize(static_cast<size_t>(w * w));
    for (int64_t iy = 0; iy < w; ++iy)
        for (int64_t ix = 0; ix < w; ++ix)
            d.values[d.index(ix, iy)] =
                static_cast<double>(((ix + iy) & 1) ^ (complement ? 1 : 0));
    d.bound = 1.0;
    return d;
}

GridDensity GridDensity::refined() const
{
    GridDensity d;
    d.level = level + 1;
    d.bound = bound;
    int64_t w = width(), w2 = d.width();
    d.values.resize(static_cast<size_t>(w2 * w2));
    for (int64_t iy = 0; iy < w2; ++iy)
        for (int64_t ix = 0; ix < w2; ++ix)
            d.values[d.index(ix, iy)] = values[static_cast<size_t>((ix >> 1) + (iy >> 1) * w)];
    return d;
}

double GridDensity::mean() const
{
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

int64_t GridDensity::support_count() const
{
    int64_t n = 0;
    for (double v : values) n += v > 0.0 ? 1 : 0;
    return n;
}

GridDensity pushforward_stage(const GridDensity& d, StageIndex stage, FlowDirection dir)
{
    if (d.level < stage.k + 1)
        throw std::invalid_argument(
            "pushforward_stage: density level must be at least stage+1; refine the grid first");
    GridDensity out;
    out.level = d.level;
    out.bound = d.bound;
    out.values.assign(d.values.size(), 0.0);
    int64_t w = d.width();
    for (int64_t iy = 0; iy < w; ++iy) {
        for (int64_t ix = 0; ix < w; ++ix) {
            Cell img = stage_cell_map(Cell{d.level, ix, iy}, stage, dir);
            out.values[out.index(img.ix, img.iy)] = d.values[d.index(ix, iy)];
        }
    }
    return out;
}

DensityTrajectory evolve_rho_B(int depth)
{
    if (depth < 0) throw std::invalid_argument("evolve_rho_B: depth must be >= 0");
    DensityTrajectory traj;
    GridDensity cur = GridDensity::checkerboard(0);
    traj.checkpoints.emplace_back(Dyadic(1), cur);
    for (int k = 0; k < depth; ++k) {
        GridDensity fine = cur.level >= k + 1 ? cur : cur.refined();
        cur = pushforward_stage(fine, StageIndex{k}, FlowDirection::backward);
        traj.checkpoints.emplace_back(Dyadic::pow2(-(k + 1)), cur);
    }
    return traj;
}

DensityTrajectory evolve_rho_W(int depth)
{
    DensityTrajectory traj;
    GridDensity cur = GridDensity::checkerboard(0, true);
    traj.checkpoints.emplace_back(Dyadic(1), cur);
    for (int k = 0; k < depth; ++k) {
        GridDensity fine = cur.level >= k + 1 ? cur : cur.refined();
        cur = pushforward_stage(fine, StageIndex{k}, FlowDirection::backward);
        traj.checkpoints.emplace_back(Dyadic::pow2(-(k + 1)), cur);
    }
    return traj;
}

double DensityTrajectory::value_at(double t, Vec2 x) const
{
    if (!(t > 0.0) || t > 1.0)
        throw std::domain_error("DensityTrajectory::value_at: t must lie in (0,1]");
    StageIndex st = stage_of_time(t);
    // checkpoint at the stage's upper end 2^-k
    if (st.k >= static_cast<int>(checkpoints.size()))
        throw std::out_of_range("DensityTrajectory::value_at: t below the trajectory depth");
    const GridDensity& d = checkpoints[static_cast<size_t>(st.k)].second;
    Vec2 y = t == st.t_hi() ? x : stage_flow_double(x, st, st.t_hi() - t, FlowDirection::forward);
    int64_t w = d.width();
    int64_t ix = static_cast<int64_t>(std::floor(y.x * std::ldexp(1.0, d.level)));
    int64_t iy = static_cast<int64_t>(std::floor(y.y * std::ldexp(1.0, d.level)));
    ix = ((ix % w) + w) % w;
    iy = ((iy % w) + w) % w;
    return d.at(ix, iy);
}

PropertyReport check_properties(const DensityTrajectory& traj_B, const DensityTrajectory& traj_W)
{
    PropertyReport rep;
    if (traj_B.checkpoints.size() != traj_W.checkpoints.size())
        throw std::invalid_argument("check_properties: trajectories must share checkpoints");
    auto note = [&rep](std::string msg) {
        if (rep.failures.size() < 32) rep.failures.push_back(std::move(msg));
    };
    for (size_t k = 0; k < traj_B.checkpoints.size(); ++k) {
        const GridDensity& b = traj_B.checkpoints[k].second;
        const GridDensity& wd = traj_W.checkpoints[k].second;
        if (b.level != wd.level) throw std::invalid_argument("check_properties: level mismatch");
        int64_t w = b.width();
        for (int64_t iy = 0; iy < w; ++iy) {
            for (int64_t ix = 0; ix < w; ++ix) {
                double vb = b.at(ix, iy), vw = wd.at(ix, iy);
                if (vb + vw != 1.0) {
                    rep.sum_identity = false;
                    note("sum!=1 at k=" + std::to_string(k) + " cell (" + std::to_string(ix) +
                         "," + std::to_string(iy) + ")");
                }
                if (!(vb > 0.0) && !(vw > 0.0)) {
                    rep.support_union = false;
                    note("support gap at k=" + std::to_string(k) + " cell (" +
                         std::to_string(ix) + "," + std::to_string(iy) + ")");
                }
                if (vb > 0.0 && vw > 0.0) {
                    rep.support_disjoint = false;
                    note("support overlap at k=" + std::to_string(k) + " cell (" +
                         std::to_string(ix) + "," + std::to_string(iy) + ")");
                }
            }
        }
        // weak* limit marker: unit-cell averages equal 1/2 exactly for k >= 1
        if (k >= 1) {
            int64_t per_unit = w / 2;
            for (int cy = 0; cy < 2; ++cy) {
                for (int cx = 0; cx < 2; ++cx) {
                    double sum = 0.0;
                    for (int64_t iy = cy * per_unit; iy < (cy + 1) * per_unit; ++iy)
                        for (int64_t ix = cx * per_unit; ix < (cx + 1) * per_unit; ++ix)
                            sum += b.at(ix, iy);
                    if (sum != 0.5 * static_cast<double>(per_unit * per_unit)) {
                        rep.halves_average = false;
                        note("unit-cell average != 1/2 at k=" + std::to_string(k) + " unit (" +
                             std::to_string(cx) + "," + std::to_string(cy) + ")");
                    }
                }
            }
        }
    }
    return rep;
}

ResidualEstimate weak_divergence_residual(const DensityTrajectory& traj, const SpaceTimeBump& phi,
                                          uint64_t n_samples, uint64_t seed, int workers)
{
    const double volume = 1.0 * 2.0 * 2.0;  // (0,1) x [0,2)^2
    const size_t n_chunks = 256;
    std::vector<double> sums(n_chunks, 0.0), sqsums(n_chunks, 0.0);

    parallel_chunks(
        static_cast<size_t>(n_samples), workers,
        [&](size_t chunk, size_t begin, size_t end) {
            double s = 0.0, s2 = 0.0;
            for (size_t i = begin; i < end; ++i) {
                SplitMix64 g = stream_for(seed, i);
                double t = g.uniform01();
                Vec2 p{2.0 * g.uniform01(), 2.0 * g.uniform01()};
                double v = 0.0;
                if (phi.time_support(t) && t > 0.0) {
                    double rho = traj.value_at(t, p);
                    if (rho != 0.0) {
                        Vec2 b = eval_b(t, p);
                        Vec2 gr = phi.grad(t, p);
                        v = rho * (phi.dt(t, p) + b.x * gr.x + b.y * gr.y);
                    } else {
                        v = 0.0;
                    }
                }
                s += v;
                s2 += v * v;
            }
            sums[chunk] = s;
            sqsums[chunk] = s2;
        },
        n_chunks);

    double s = 0.0, s2 = 0.0;
    for (size_t c = 0; c < n_chunks; ++c) {
        s += sums[c];
        s2 += sqsums[c];
    }
    double n = static_cast<double>(n_samples);
    double mean = s / n;
    double var = std::max(0.0, s2 / n - mean * mean);
    ResidualEstimate r;
    r.estimate = volume * mean;
    r.std_error = volume * std::sqrt(var / n);
    r.n_samples = n_samples;
    return r;
}

}  // namespace depauw
