#include "depauw/path_measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace depauw {

namespace {

inline int64_t bin_index(double coord, int level)
{
    int64_t w = cells_per_axis(level);
    int64_t i = static_cast<int64_t>(std::floor(coord * std::ldexp(1.0, level)));
    i %= w;
    if (i < 0) i += w;
    return i;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty()) return 0.0;
    size_t k = static_cast<size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
    std::nth_element(v.begin(), v.begin() + static_cast<ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

double CellHistogram::total() const
{
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

CellHistogram marginal(const PathEnsemble& e, double t, int level)
{
    CellHistogram h;
    h.level = level;
    h.w.assign(static_cast<size_t>(h.width() * h.width()), 0.0);
    for (const auto& p : e.paths) {
        if (t < p.t_min() || t > p.t_max())
            throw std::out_of_range("marginal: t outside a path's time range");
        Vec2 x = p.at(t);
        h.w[static_cast<size_t>(bin_index(x.x, level) + bin_index(x.y, level) * h.width())] +=
            p.weight;
    }
    return h;
}

PathEnsemble apply_stop(const PathEnsemble& e, double tau)
{
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("apply_stop: tau must lie in [0,1]");
    PathEnsemble out;
    out.meta = e.meta;
    out.paths.reserve(e.paths.size());
    for (const auto& p : e.paths) out.paths.push_back(stop_backward(p, tau));
    return out;
}

double BLFunctional::eval(const Path& p) const
{
    if (kind == Kind::anchor_distance) {
        double d = torus_distance(p.at(t1), TorusPoint::from_doubles(anchor.x, anchor.y).to_vec2());
        return std::min(1.0, d);
    }
    return 0.5 * torus_distance(p.at(t1), p.at(t2));
}

std::vector<BLFunctional> standard_bl_bank(double t_min)
{
    std::vector<BLFunctional> bank;
    const double times[4] = {t_min, 0.125, 0.5, 1.0};
    const Vec2 anchors[3] = {{0.5, 0.5}, {1.5, 0.5}, {1.0, 1.5}};
    for (double t : times) {
        for (const Vec2& a : anchors) {
            BLFunctional f;
            f.kind = BLFunctional::Kind::anchor_distance;
            f.t1 = t;
            f.anchor = a;
            f.name = "anchor(t=" + std::to_string(t) + ",p=(" + std::to_string(a.x) + "," +
                     std::to_string(a.y) + "))";
            bank.push_back(f);
        }
    }
    const double pairs[4][2] = {{t_min, 1.0}, {t_min, 0.125}, {0.125, 0.5}, {0.5, 1.0}};
    for (auto& pr : pairs) {
        BLFunctional f;
        f.kind = BLFunctional::Kind::pair_distance;
        f.t1 = pr[0];
        f.t2 = pr[1];
        f.name = "pair(" + std::to_string(pr[0]) + "," + std::to_string(pr[1]) + ")";
        bank.push_back(f);
    }
    return bank;  // 16 functionals
}

BLDistanceEstimate bl_distance(const PathEnsemble& e1, const PathEnsemble& e2,
                               const std::vector<BLFunctional>& bank)
{
    BLDistanceEstimate est;
    est.n1 = e1.paths.size();
    est.n2 = e2.paths.size();
    est.per_functional.reserve(bank.size());
    double w1 = e1.total_weight(), w2 = e2.total_weight();
    for (const auto& f : bank) {
        double m1 = 0.0, m2 = 0.0;
        for (const auto& p : e1.paths) m1 += p.weight * f.eval(p);
        for (const auto& p : e2.paths) m2 += p.weight * f.eval(p);
        double d = std::fabs(m1 / w1 - m2 / w2);
        est.per_functional.push_back(d);
        est.value = std::max(est.value, d);
    }
    return est;
}

double EndpointJointHistogram::total() const
{
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

CellHistogram EndpointJointHistogram::start_marginal() const
{
    CellHistogram h;
    h.level = start_level;
    h.w.assign(n_starts(), 0.0);
    size_t nt = n_targets();
    for (size_t s = 0; s < n_starts(); ++s) {
        double acc = 0.0;
        for (size_t t = 0; t < nt; ++t) acc += w[s * nt + t];
        h.w[s] = acc;
    }
    return h;
}

CellHistogram EndpointJointHistogram::target_marginal() const
{
    CellHistogram h;
    h.level = target_level;
    h.w.assign(n_targets(), 0.0);
    size_t nt = n_targets();
    for (size_t s = 0; s < n_starts(); ++s)
        for (size_t t = 0; t < nt; ++t) h.w[t] += w[s * nt + t];
    return h;
}

EndpointJointHistogram endpoint_joint(const PathEnsemble& e, int start_level, int target_level)
{
    EndpointJointHistogram j;
    j.start_level = start_level;
    j.target_level = target_level;
    j.w.assign(j.n_starts() * j.n_targets(), 0.0);
    int64_t sw = j.starts_per_axis(), tw = j.targets_per_axis();
    double t_min = 0.0;
    bool first = true;
    for (const auto& p : e.paths) {
        if (first) {
            t_min = p.t_min();
            first = false;
        }
        Vec2 a = p.points.front();  // earliest computed time (e_0 surrogate)
        Vec2 b = p.points.back();   // time 1
        size_t s = static_cast<size_t>(bin_index(a.x, start_level) +
                                       bin_index(a.y, start_level) * sw);
        size_t t = static_cast<size_t>(bin_index(b.x, target_level) +
                                       bin_index(b.y, target_level) * tw);
        j.w[s * j.n_targets() + t] += p.weight;
    }
    j.t_min = t_min;
    return j;
}

EndpointJointHistogram joint_histogram(const PathEnsemble& e, double time_a, int level_a,
                                       double time_b, int level_b)
{
    EndpointJointHistogram j;
    j.start_level = level_a;
    j.target_level = level_b;
    j.w.assign(j.n_starts() * j.n_targets(), 0.0);
    j.t_min = std::min(time_a, time_b);
    int64_t sw = j.starts_per_axis(), tw = j.targets_per_axis();
    for (const auto& p : e.paths) {
        Vec2 a = p.at(time_a);
        Vec2 b = p.at(time_b);
        size_t s = static_cast<size_t>(bin_index(a.x, level_a) + bin_index(a.y, level_a) * sw);
        size_t t = static_cast<size_t>(bin_index(b.x, level_b) + bin_index(b.y, level_b) * tw);
        j.w[s * j.n_targets() + t] += p.weight;
    }
    return j;
}

ConditionalHistogram disintegrate(const EndpointJointHistogram& joint)
{
    ConditionalHistogram c;
    c.start_level = joint.start_level;
    c.target_level = joint.target_level;
    size_t nt = joint.n_targets();
    for (size_t s = 0; s < joint.n_starts(); ++s) {
        double mass = 0.0;
        for (size_t t = 0; t < nt; ++t) mass += joint.w[s * nt + t];
        if (mass <= 0.0) {
            ++c.dropped_rows;
            continue;
        }
        ConditionalHistogram::Row row;
        row.start_index = static_cast<int64_t>(s);
        row.mass = mass;
        row.prob.resize(nt);
        for (size_t t = 0; t < nt; ++t) row.prob[t] = joint.w[s * nt + t] / mass;
        c.rows.push_back(std::move(row));
    }
    return c;
}

std::vector<uint8_t> checkerboard_mask(int level)
{
    int64_t w = cells_per_axis(level);
    std::vector<uint8_t> mask(static_cast<size_t>(w * w));
    for (int64_t iy = 0; iy < w; ++iy)
        for (int64_t ix = 0; ix < w; ++ix)
            mask[static_cast<size_t>(ix + iy * w)] =
                static_cast<uint8_t>(checkerboard_value(Cell{level, ix, iy}));
    return mask;
}

StochasticityReport stochasticity_report(const ConditionalHistogram& cond,
                                         const std::vector<uint8_t>& black_mask,
                                         double atom_cutoff, double black_tol)
{
    StochasticityReport rep;
    rep.start_level = cond.start_level;
    rep.target_level = cond.target_level;
    rep.atom_cutoff = atom_cutoff;
    rep.black_tol = black_tol;
    int64_t sw = cells_per_axis(cond.start_level);
    std::vector<double> atoms, blacks;
    uint64_t atom_ok = 0, black_ok = 0;
    for (const auto& row : cond.rows) {
        StochasticityRow r;
        r.ix = row.start_index % sw;
        r.iy = row.start_index / sw;
        r.mass = row.mass;
        for (size_t t = 0; t < row.prob.size(); ++t) {
            r.max_atom = std::max(r.max_atom, row.prob[t]);
            if (black_mask[t]) r.black_mass += row.prob[t];
            else r.white_mass += row.prob[t];
        }
        atoms.push_back(r.max_atom);
        blacks.push_back(r.black_mass);
        if (r.max_atom <= atom_cutoff) ++atom_ok;
        if (std::fabs(r.black_mass - 0.5) <= black_tol) ++black_ok;
        rep.rows.push_back(r);
    }
    double n = std::max<double>(1.0, static_cast<double>(rep.rows.size()));
    rep.frac_max_atom_le = static_cast<double>(atom_ok) / n;
    rep.frac_black_within = static_cast<double>(black_ok) / n;
    rep.max_atom_q10 = quantile(atoms, 0.1);
    rep.max_atom_q50 = quantile(atoms, 0.5);
    rep.max_atom_q90 = quantile(atoms, 0.9);
    rep.black_q10 = quantile(blacks, 0.1);
    rep.black_q50 = quantile(blacks, 0.5);
    rep.black_q90 = quantile(blacks, 0.9);
    return rep;
}

BranchTVReport branch_tv_report(const ConditionalHistogram& cond_black,
                                const ConditionalHistogram& cond_white, double tv_cutoff)
{
    if (cond_black.start_level != cond_white.start_level ||
        cond_black.target_level != cond_white.target_level)
        throw std::invalid_argument("branch_tv_report: level mismatch");
    BranchTVReport rep;
    rep.start_level = cond_black.start_level;
    rep.target_level = cond_black.target_level;
    rep.tv_cutoff = tv_cutoff;
    std::map<int64_t, const ConditionalHistogram::Row*> white_rows;
    for (const auto& row : cond_white.rows) white_rows[row.start_index] = &row;
    std::vector<double> tvs;
    uint64_t ok = 0;
    for (const auto& row : cond_black.rows) {
        auto it = white_rows.find(row.start_index);
        if (it == white_rows.end()) continue;
        double tv = 0.0;
        for (size_t t = 0; t < row.prob.size(); ++t)
            tv += std::fabs(row.prob[t] - it->second->prob[t]);
        tv *= 0.5;
        tvs.push_back(tv);
        if (tv >= tv_cutoff) ++ok;
    }
    rep.common_rows = tvs.size();
    rep.frac_tv_ge = tvs.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(tvs.size());
    rep.tv_q10 = quantile(tvs, 0.1);
    rep.tv_q50 = quantile(tvs, 0.5);
    return rep;
}

}  // namespace depauw
