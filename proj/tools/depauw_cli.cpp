// Command-line front end: experiment orchestration with seeded, reproducible
// outputs. Subcommands: field, density, flow, trace, converge, stochasticity.
// Exit codes: 0 pass, 1 invariant failure, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "depauw/density.hpp"
#include "depauw/exact_flow.hpp"
#include "depauw/io.hpp"
#include "depauw/mollify.hpp"
#include "depauw/parallel.hpp"
#include "depauw/path_measures.hpp"
#include "depauw/rng.hpp"
#include "depauw/tracer.hpp"

using nlohmann::json;
using namespace depauw;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void usage_error(const std::string& msg)
{
    std::cerr << "error: " << msg << "\n";
    std::exit(kExitUsage);
}

// Config file support: strict keys, flags override file values.
json load_config_file(const std::string& path, const std::set<std::string>& known)
{
    std::ifstream in(path);
    if (!in) usage_error("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        usage_error(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) usage_error("config root must be a JSON object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (!known.count(it.key()))
            usage_error("unknown config key: \"" + it.key() + "\" in " + path);
    }
    return cfg;
}

template <typename T>
void apply_cfg(const json& cfg, const CLI::App* cmd, const std::string& key, T& target)
{
    if (!cfg.contains(key)) return;
    const CLI::Option* opt = cmd->get_option("--" + key);
    if (opt != nullptr && opt->count() > 0) return;  // flag overrides file
    try {
        target = cfg.at(key).get<T>();
    } catch (const std::exception&) {
        usage_error("config key \"" + key + "\" has the wrong type");
    }
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) usage_error("cannot open output file: " + path);
    out << j.dump(1) << "\n";
}

uint64_t hash_config(const json& cfg) { return fnv1a64(cfg.dump()); }

Dyadic parse_dyadic_or_die(const std::string& s, const std::string& what)
{
    auto d = Dyadic::parse(s);
    if (!d) usage_error(what + " must be an exact dyadic rational (\"0.75\" or \"3/2^2\"), got: " + s);
    return *d;
}

json meta_json(const PathEnsemble& e)
{
    json m;
    m["field"] = e.meta.field;
    m["eps"] = e.meta.eps;
    m["step"] = e.meta.step;
    m["seed"] = e.meta.seed;
    m["n_paths"] = e.meta.n_paths;
    m["t_start"] = e.meta.t_start;
    m["t_end"] = e.meta.t_end;
    m["depth"] = e.meta.depth;
    m["start_distribution"] = e.meta.start_distribution;
    m["time0_error_bound"] = e.meta.time0_error_bound;
    return m;
}

// ---------------------------------------------------------------- field ----

int run_field(double t, double x, double y, double eps, double h, const std::string& cache_dir,
              const std::string& out, const json& cfg_echo)
{
    if (!(t > 0.0) || t > 1.0) usage_error("--t must lie in (0, 1]");
    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(hash_config(cfg_echo));
    StageIndex st = stage_of_time(t);
    Vec2 p{x, y};
    Vec2 b = eval_b(t, p);
    rep["stage"] = st.k;
    rep["b"] = {b.x, b.y};
    rep["stream"] = eval_stream(st, p);
    rep["sup_norm_bound"] = DepauwField::sup_norm;
    if (eps > 0.0) {
        MollifiedField f = MollifiedField::build(eps, h, 0, cache_dir);
        Vec2 bm = f.velocity(t, p);
        rep["mollified"] = {bm.x, bm.y};
        rep["admissible_depth"] = f.depth;
        rep["floor_time"] = f.floor_time();
    }
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return kExitPass;
}

// -------------------------------------------------------------- density ----

int run_density(int depth, bool check, std::vector<int> checkpoints, const std::string& csv,
                const std::string& heatmap, const std::string& out, const json& cfg_echo)
{
    if (depth < 0 || depth > 24) usage_error("--depth must lie in [0, 24]");
    uint64_t chash = hash_config(cfg_echo);
    DensityTrajectory B = evolve_rho_B(depth);
    DensityTrajectory W = evolve_rho_W(depth);

    // optional checkpoint filter for the dumps (times 2^-k, k listed)
    DensityTrajectory dump = B;
    if (!checkpoints.empty()) {
        dump.checkpoints.clear();
        for (int k : checkpoints) {
            if (k < 0 || k > depth) usage_error("--checkpoint indices must lie in [0, depth]");
            dump.checkpoints.push_back(B.checkpoints[static_cast<size_t>(k)]);
        }
    }

    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(chash);
    rep["depth"] = depth;
    rep["checkpoints"] = B.checkpoints.size();

    int exit_code = kExitPass;
    if (check) {
        PropertyReport pr = check_properties(B, W);
        json pj;
        pj["sum_identity"] = pr.sum_identity;
        pj["support_union"] = pr.support_union;
        pj["support_disjoint"] = pr.support_disjoint;
        pj["halves_average"] = pr.halves_average;
        pj["failures"] = pr.failures;
        // the refining cascade itself, against the closed form
        bool refining = true;
        for (int k = 0; k <= depth && refining; ++k) {
            GridDensity expect = GridDensity::checkerboard(k, (k & 1) != 0);
            refining = B.at_checkpoint(k).values == expect.values;
        }
        pj["refining_recursion"] = refining;
        bool pass = pr.all_pass() && refining;
        pj["pass"] = pass;
        rep["properties"] = pj;
        if (!pass) exit_code = kExitInvariant;
    }
    if (!csv.empty()) write_density_csv(csv, dump, chash, 0);
    if (!heatmap.empty()) write_density_heatmaps(heatmap, dump, chash, 0);
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return exit_code;
}

// ----------------------------------------------------------------- flow ----

int run_flow(const std::vector<std::string>& points, const std::string& t_start,
             const std::string& t_end, int depth, const std::string& csv, const std::string& out,
             const json& cfg_echo)
{
    if (points.empty()) usage_error("need at least one --point \"x,y\"");
    Dyadic ts = parse_dyadic_or_die(t_start, "--t-start");
    Dyadic te = parse_dyadic_or_die(t_end, "--t-end");
    uint64_t chash = hash_config(cfg_echo);

    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(chash);
    json endpoints = json::array();

    std::ofstream csv_out;
    if (!csv.empty()) {
        csv_out.open(csv, std::ios::trunc);
        if (!csv_out) usage_error("cannot open csv output: " + csv);
        csv_out << "# config_hash=" << hash_hex(chash) << " seed=0\n";
        csv_out << "point,t,x,y,x_exact,y_exact\n";
    }

    for (size_t i = 0; i < points.size(); ++i) {
        size_t comma = points[i].find(',');
        if (comma == std::string::npos) usage_error("--point must look like \"x,y\"");
        Dyadic px = parse_dyadic_or_die(points[i].substr(0, comma), "point x");
        Dyadic py = parse_dyadic_or_die(points[i].substr(comma + 1), "point y");
        FlowResult res;
        try {
            res = flow(TorusPoint(px, py), FlowQuery{ts, te, depth});
        } catch (const std::exception& e) {
            usage_error(e.what());
        }
        for (const auto& [t, q] : res.samples) {
            if (csv_out.is_open())
                csv_out << i << ',' << t.to_decimal_string() << ',' << q.x.to_decimal_string()
                        << ',' << q.y.to_decimal_string() << ',' << q.x.to_pow2_string() << ','
                        << q.y.to_pow2_string() << '\n';
        }
        json ep;
        ep["point"] = json::array({px.to_pow2_string(), py.to_pow2_string()});
        ep["end"] = json::array({res.end.x.to_pow2_string(), res.end.y.to_pow2_string()});
        ep["samples"] = res.samples.size();
        endpoints.push_back(std::move(ep));
    }
    rep["trajectories"] = std::move(endpoints);
    if (te < ts) rep["time0_error_bound"] = (te.doubled()).to_double();
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return kExitPass;
}

// ---------------------------------------------------------------- trace ----

StartDistribution parse_start(const std::string& spec)
{
    if (spec == "uniform") return StartDistribution::uniform();
    if (spec.rfind("cell:", 0) == 0) {
        int level;
        long long ix, iy;
        if (std::sscanf(spec.c_str(), "cell:%d,%lld,%lld", &level, &ix, &iy) != 3)
            usage_error("--start cell spec must be cell:level,ix,iy");
        return StartDistribution::on_cell(Cell{level, ix, iy});
    }
    if (spec.rfind("dirac:", 0) == 0) {
        double x, y, r;
        if (std::sscanf(spec.c_str(), "dirac:%lf,%lf,%lf", &x, &y, &r) != 3)
            usage_error("--start dirac spec must be dirac:x,y,jitter");
        return StartDistribution::dirac({x, y}, r);
    }
    usage_error("--start must be uniform, cell:level,ix,iy or dirac:x,y,jitter");
}

int run_trace(uint64_t n, int depth, double eps, double step, uint64_t seed,
              const std::string& start_spec, bool audit, bool oracle, double oracle_tol,
              int workers, const std::string& cache_dir, const std::string& out_bin,
              const std::string& out_csv, const std::string& out, const json& cfg_echo)
{
    uint64_t chash = hash_config(cfg_echo);
    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(chash);
    int exit_code = kExitPass;

    if (oracle) {
        // RK4 vs exact-flow endpoint agreement over one stage, forward and
        // backward, at n seeded random starts
        double step_o = step > 0.0 ? step : 1e-5;
        std::vector<double> errs_f(n), errs_b(n);
        parallel_chunks(n, workers, [&](size_t, size_t b, size_t e) {
            for (size_t i = b; i < e; ++i) {
                SplitMix64 g = stream_for(seed, i);
                Vec2 p{2.0 * g.uniform01(), 2.0 * g.uniform01()};
                IntegrationResult r = integrate(FieldRef::exact_field(), p, 1.0, 0.5, step_o);
                TorusPoint ex =
                    flow(TorusPoint::from_doubles(p.x, p.y), FlowQuery{Dyadic(1), Dyadic::scaled(1, 1)})
                        .end;
                errs_b[i] = torus_distance(r.path.points.front(), ex.to_vec2());
                IntegrationResult rf =
                    integrate(FieldRef::exact_field(), r.path.points.front(), 0.5, 1.0, step_o);
                errs_f[i] = torus_distance(rf.path.points.back(), p);
            }
        });
        double mf = 0.0, mb = 0.0;
        for (double v : errs_f) mf = std::max(mf, v);
        for (double v : errs_b) mb = std::max(mb, v);
        json oj;
        oj["n"] = n;
        oj["step"] = step_o;
        oj["max_error_backward"] = mb;
        oj["max_error_roundtrip"] = mf;
        oj["tolerance"] = oracle_tol;
        oj["pass"] = mb <= oracle_tol && mf <= oracle_tol;
        rep["oracle"] = oj;
        if (mb > oracle_tol || mf > oracle_tol) exit_code = kExitInvariant;
    } else {
        std::optional<MollifiedField> field;
        FieldRef ref = FieldRef::exact_field();
        if (eps > 0.0) {
            field.emplace(MollifiedField::build(eps, 0.0, workers, cache_dir));
            ref = FieldRef::mollified(*field);
        }
        PathEnsemble e =
            backward_ensemble(n, depth, ref, seed, parse_start(start_spec), step, workers);
        rep["ensemble"] = meta_json(e);
        if (audit) {
            LipschitzReport lr = lipschitz_audit(e);
            json lj;
            lj["max_ratio"] = lr.max_ratio;
            lj["bound"] = lr.bound;
            lj["pairs_checked"] = lr.pairs_checked;
            lj["pass"] = lr.pass;
            rep["lipschitz"] = lj;
            if (!lr.pass) exit_code = kExitInvariant;
        }
        if (!out_bin.empty()) write_ensemble_binary(out_bin, e, chash);
        if (!out_csv.empty()) write_ensemble_csv(out_csv, e, chash);
    }
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return exit_code;
}

// -------------------------------------------------------------- converge ----

int run_converge(const std::vector<std::string>& eps_list, uint64_t n, int depth, uint64_t seed,
                 double t_lo, bool check, int workers, const std::string& cache_dir,
                 const std::string& out, const json& cfg_echo)
{
    if (eps_list.size() < 2) usage_error("--eps needs at least two values");
    std::vector<double> epss;
    for (const auto& s : eps_list) epss.push_back(parse_dyadic_or_die(s, "--eps").to_double());

    uint64_t chash = hash_config(cfg_echo);
    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(chash);

    std::vector<MollifiedField> fields;
    std::vector<PathEnsemble> ensembles;
    for (double eps : epss) {
        fields.push_back(MollifiedField::build(eps, 0.0, workers, cache_dir));
        ensembles.push_back(backward_ensemble(n, depth, FieldRef::mollified(fields.back()), seed,
                                              StartDistribution::uniform(), 0.0, workers));
    }

    auto bank = standard_bl_bank(std::ldexp(1.0, -depth));
    json pairs = json::array();
    std::vector<double> bl_values;
    std::vector<double> sup_frac_decreasing;
    std::vector<std::vector<double>> supdists;
    const int grid_n = 129;
    for (size_t i = 0; i + 1 < ensembles.size(); ++i) {
        BLDistanceEstimate bl = bl_distance(ensembles[i], ensembles[i + 1], bank);
        std::vector<double> sup(n, 0.0);
        for (size_t pth = 0; pth < n; ++pth) {
            double m = 0.0;
            for (int gidx = 0; gidx < grid_n; ++gidx) {
                double t = t_lo + (1.0 - t_lo) * gidx / (grid_n - 1);
                m = std::max(m, torus_distance(ensembles[i].paths[pth].at(t),
                                               ensembles[i + 1].paths[pth].at(t)));
            }
            sup[pth] = m;
        }
        supdists.push_back(sup);
        json pj;
        pj["eps_coarse"] = epss[i];
        pj["eps_fine"] = epss[i + 1];
        pj["bl_distance"] = bl.value;
        pj["bank_version"] = bl.bank_version;
        double mean_sup = 0.0;
        for (double v : sup) mean_sup += v;
        pj["mean_sup_distance"] = mean_sup / static_cast<double>(n);
        pairs.push_back(std::move(pj));
        bl_values.push_back(bl.value);
    }
    for (size_t i = 0; i + 1 < supdists.size(); ++i) {
        uint64_t dec = 0;
        for (size_t pth = 0; pth < n; ++pth)
            if (supdists[i + 1][pth] <= supdists[i][pth]) ++dec;
        sup_frac_decreasing.push_back(static_cast<double>(dec) / static_cast<double>(n));
    }
    rep["pairs"] = std::move(pairs);
    rep["sup_frac_decreasing"] = sup_frac_decreasing;
    bool bl_monotone = true;
    for (size_t i = 0; i + 1 < bl_values.size(); ++i)
        bl_monotone = bl_monotone && bl_values[i + 1] <= bl_values[i];
    bool sup_ok = true;
    for (double f : sup_frac_decreasing) sup_ok = sup_ok && f >= 0.95;
    rep["bl_monotone_decreasing"] = bl_monotone;
    rep["sup_decrease_ok"] = sup_ok;

    int exit_code = kExitPass;
    if (check && !(bl_monotone && sup_ok)) exit_code = kExitInvariant;
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return exit_code;
}

// --------------------------------------------------------- stochasticity ----

int run_stochasticity(uint64_t n, int depth, int start_level, int target_level, uint64_t seed,
                      bool branch, double atom_cutoff, double black_tol, double tv_cutoff,
                      bool check, bool with_rows, int workers, const std::string& out,
                      const std::string& csv, const json& cfg_echo)
{
    uint64_t chash = hash_config(cfg_echo);
    PathEnsemble e = backward_ensemble(n, depth, FieldRef::exact_field(), seed,
                                       StartDistribution::uniform(), 0.0, workers);
    EndpointJointHistogram joint = endpoint_joint(e, start_level, target_level);
    ConditionalHistogram cond = disintegrate(joint);
    if (!csv.empty()) write_conditional_csv(csv, cond, chash, seed);
    StochasticityReport sr =
        stochasticity_report(cond, checkerboard_mask(target_level), atom_cutoff, black_tol);

    json rep;
    rep["config"] = cfg_echo;
    rep["config_hash"] = hash_hex(chash);
    rep["ensemble"] = meta_json(e);
    json agg;
    agg["rows"] = sr.rows.size();
    agg["dropped_rows"] = cond.dropped_rows;
    agg["frac_max_atom_le"] = sr.frac_max_atom_le;
    agg["atom_cutoff"] = sr.atom_cutoff;
    agg["frac_black_within"] = sr.frac_black_within;
    agg["black_tol"] = sr.black_tol;
    agg["max_atom_q10"] = sr.max_atom_q10;
    agg["max_atom_q50"] = sr.max_atom_q50;
    agg["max_atom_q90"] = sr.max_atom_q90;
    agg["black_q10"] = sr.black_q10;
    agg["black_q50"] = sr.black_q50;
    agg["black_q90"] = sr.black_q90;
    rep["aggregates"] = agg;

    bool pass = sr.frac_max_atom_le >= 0.9 && sr.frac_black_within >= 0.9;

    if (branch) {
        // split by the time-1 colour: the exact Lagrangian measure is the
        // half/half mixture of the black and white branches
        PathEnsemble eb, ew;
        eb.meta = e.meta;
        ew.meta = e.meta;
        auto mask = checkerboard_mask(0);
        for (const auto& p : e.paths) {
            Vec2 endp = p.points.back();
            int64_t ix = static_cast<int64_t>(std::floor(endp.x)) & 1;
            int64_t iy = static_cast<int64_t>(std::floor(endp.y)) & 1;
            if (mask[static_cast<size_t>(ix + 2 * iy)]) eb.paths.push_back(p);
            else ew.paths.push_back(p);
        }
        for (auto& p : eb.paths) p.weight = 1.0 / static_cast<double>(eb.paths.size());
        for (auto& p : ew.paths) p.weight = 1.0 / static_cast<double>(ew.paths.size());
        ConditionalHistogram cb = disintegrate(endpoint_joint(eb, start_level, target_level));
        ConditionalHistogram cw = disintegrate(endpoint_joint(ew, start_level, target_level));
        BranchTVReport tv = branch_tv_report(cb, cw, tv_cutoff);
        json tj;
        tj["black_paths"] = eb.paths.size();
        tj["white_paths"] = ew.paths.size();
        tj["common_rows"] = tv.common_rows;
        tj["frac_tv_ge"] = tv.frac_tv_ge;
        tj["tv_cutoff"] = tv.tv_cutoff;
        tj["tv_q10"] = tv.tv_q10;
        tj["tv_q50"] = tv.tv_q50;
        rep["branch"] = tj;
        pass = pass && tv.frac_tv_ge >= 0.9;
    }

    if (with_rows) {
        json rows = json::array();
        for (const auto& r : sr.rows) {
            rows.push_back(json::array(
                {r.ix, r.iy, r.mass, r.max_atom, r.black_mass, r.white_mass}));
        }
        rep["rows"] = std::move(rows);
        rep["rows_schema"] = "ix,iy,mass,max_atom,black_mass,white_mass";
    }

    rep["pass"] = pass;
    int exit_code = check && !pass ? kExitInvariant : kExitPass;
    if (out.empty())
        std::cout << rep.dump(1) << "\n";
    else
        write_json(out, rep);
    return exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator and verification tool for the Depauw divergence-free vector field"};
    app.require_subcommand(1);

    // ---- field ----
    auto* cmd_field = app.add_subcommand("field", "evaluate the staged field and its stream");
    double f_t = 1.0, f_x = 0.0, f_y = 0.0, f_eps = 0.0, f_h = 0.0;
    std::string f_cache, f_out, f_config;
    cmd_field->add_option("--t", f_t, "time in (0,1]");
    cmd_field->add_option("--x", f_x, "x coordinate");
    cmd_field->add_option("--y", f_y, "y coordinate");
    cmd_field->add_option("--eps", f_eps, "also evaluate the mollified field (0 = off)");
    cmd_field->add_option("--table-h", f_h, "stream table spacing (default eps/8)");
    cmd_field->add_option("--cache-dir", f_cache, "stream table cache directory");
    cmd_field->add_option("--out", f_out, "report path (default stdout)");
    cmd_field->add_option("--config", f_config, "JSON config file");

    // ---- density ----
    auto* cmd_density = app.add_subcommand("density", "exact checkerboard transport");
    int d_depth = 10;
    bool d_check = false;
    std::vector<int> d_checkpoints;
    std::string d_csv, d_heatmap, d_out, d_config;
    cmd_density->add_option("--depth", d_depth, "number of stages (checkpoints 2^-k)");
    cmd_density->add_option("--checkpoint", d_checkpoints,
                            "restrict CSV/heatmap dumps to these checkpoint indices");
    cmd_density->add_flag("--check", d_check, "verify the transport properties, exit 1 on failure");
    cmd_density->add_option("--csv", d_csv, "per-cell CSV output");
    cmd_density->add_option("--heatmap", d_heatmap, "heatmap matrices (JSON)");
    cmd_density->add_option("--out", d_out, "report path (default stdout)");
    cmd_density->add_option("--config", d_config, "JSON config file");

    // ---- flow ----
    auto* cmd_flow = app.add_subcommand("flow", "exact dyadic flow of start points");
    std::vector<std::string> w_points;
    std::string w_ts = "1", w_te = "1/2^10", w_csv, w_out, w_config;
    int w_depth = 40;
    cmd_flow->add_option("--point", w_points, "start point \"x,y\" (dyadic strings, repeatable)");
    cmd_flow->add_option("--t-start", w_ts, "start time (dyadic)");
    cmd_flow->add_option("--t-end", w_te, "end time (dyadic)");
    cmd_flow->add_option("--depth", w_depth, "max stage depth");
    cmd_flow->add_option("--csv", w_csv, "trajectory CSV output");
    cmd_flow->add_option("--out", w_out, "report path (default stdout)");
    cmd_flow->add_option("--config", w_config, "JSON config file");

    // ---- trace ----
    auto* cmd_trace = app.add_subcommand("trace", "particle ensembles / integrator oracle");
    uint64_t t_n = 1000, t_seed = 1;
    int t_depth = 10, t_workers = 0;
    double t_eps = 0.0, t_step = 0.0, t_otol = 1e-6;
    bool t_audit = false, t_oracle = false;
    std::string t_start = "uniform", t_cache, t_bin, t_csv, t_out, t_config;
    cmd_trace->add_option("--n", t_n, "number of paths / oracle points");
    cmd_trace->add_option("--depth", t_depth, "trace back to 2^-depth");
    cmd_trace->add_option("--eps", t_eps, "mollified field radius (0 = exact field)");
    cmd_trace->add_option("--step", t_step, "RK4 step (default eps/4, oracle 1e-5)");
    cmd_trace->add_option("--seed", t_seed, "RNG seed");
    cmd_trace->add_option("--start", t_start, "uniform | cell:L,ix,iy | dirac:x,y,jitter");
    cmd_trace->add_flag("--audit", t_audit, "run the Lipschitz audit, exit 1 on failure");
    cmd_trace->add_flag("--oracle", t_oracle, "RK4 vs exact-flow cross-check, exit 1 over tolerance");
    cmd_trace->add_option("--oracle-tol", t_otol, "oracle tolerance");
    cmd_trace->add_option("--workers", t_workers, "worker threads (0 = hardware)");
    cmd_trace->add_option("--cache-dir", t_cache, "stream table cache directory");
    cmd_trace->add_option("--out-bin", t_bin, "ensemble binary output");
    cmd_trace->add_option("--out-csv", t_csv, "ensemble CSV output");
    cmd_trace->add_option("--out", t_out, "report path (default stdout)");
    cmd_trace->add_option("--config", t_config, "JSON config file");

    // ---- converge ----
    auto* cmd_conv = app.add_subcommand("converge", "vanishing-regularisation selection");
    std::vector<std::string> c_eps = {"1/2^4", "1/2^5", "1/2^6", "1/2^7"};
    uint64_t c_n = 1000, c_seed = 1;
    int c_depth = 7, c_workers = 0;
    double c_tlo = 0.125;
    bool c_check = false;
    std::string c_cache = ".depauw_cache", c_out, c_config;
    cmd_conv->add_option("--eps", c_eps, "mollification radii (dyadic strings, coarse to fine)");
    cmd_conv->add_option("--n", c_n, "paths per ensemble");
    cmd_conv->add_option("--depth", c_depth, "trace back to 2^-depth");
    cmd_conv->add_option("--seed", c_seed, "RNG seed (shared starts across eps)");
    cmd_conv->add_option("--t-lo", c_tlo, "lower end of the sup-distance window");
    cmd_conv->add_flag("--check", c_check, "enforce monotone convergence, exit 1 on failure");
    cmd_conv->add_option("--workers", c_workers, "worker threads");
    cmd_conv->add_option("--cache-dir", c_cache, "stream table cache directory");
    cmd_conv->add_option("--out", c_out, "report path (default stdout)");
    cmd_conv->add_option("--config", c_config, "JSON config file");

    // ---- stochasticity ----
    auto* cmd_stoch = app.add_subcommand("stochasticity", "branching-measure estimation");
    uint64_t s_n = 1000000, s_seed = 1;
    int s_depth = 10, s_slevel = 6, s_tlevel = 0, s_workers = 0;
    double s_atom = 0.6, s_btol = 0.05, s_tv = 0.9;
    bool s_branch = false, s_check = false, s_rows = false;
    std::string s_out, s_csv, s_config;
    cmd_stoch->add_option("--n", s_n, "number of paths");
    cmd_stoch->add_option("--depth", s_depth, "trace back to 2^-depth (time-0 surrogate)");
    cmd_stoch->add_option("--start-level", s_slevel, "row (time-0 surrogate) cell level");
    cmd_stoch->add_option("--target-level", s_tlevel, "target (time-1) cell level");
    cmd_stoch->add_option("--seed", s_seed, "RNG seed");
    cmd_stoch->add_flag("--branch", s_branch, "also estimate the B/W branch TV distances");
    cmd_stoch->add_option("--atom-cutoff", s_atom, "max-atom threshold");
    cmd_stoch->add_option("--black-tol", s_btol, "black-mass tolerance around 1/2");
    cmd_stoch->add_option("--tv-cutoff", s_tv, "branch TV threshold");
    cmd_stoch->add_flag("--check", s_check, "enforce the >= 90% fractions, exit 1 on failure");
    cmd_stoch->add_flag("--rows", s_rows, "include per-row statistics in the report");
    cmd_stoch->add_option("--workers", s_workers, "worker threads");
    cmd_stoch->add_option("--out", s_out, "report path (default stdout)");
    cmd_stoch->add_option("--csv", s_csv, "conditional-histogram matrix CSV");
    cmd_stoch->add_option("--config", s_config, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (cmd_field->parsed()) {
            if (!f_config.empty()) {
                json cfg = load_config_file(
                    f_config, {"t", "x", "y", "eps", "table-h", "cache-dir", "out"});
                apply_cfg(cfg, cmd_field, "t", f_t);
                apply_cfg(cfg, cmd_field, "x", f_x);
                apply_cfg(cfg, cmd_field, "y", f_y);
                apply_cfg(cfg, cmd_field, "eps", f_eps);
                apply_cfg(cfg, cmd_field, "table-h", f_h);
                apply_cfg(cfg, cmd_field, "cache-dir", f_cache);
                apply_cfg(cfg, cmd_field, "out", f_out);
            }
            json echo{{"experiment", "field"}, {"t", f_t},   {"x", f_x},
                      {"y", f_y},              {"eps", f_eps}, {"h", f_h}};
            return run_field(f_t, f_x, f_y, f_eps, f_h, f_cache, f_out, echo);
        }
        if (cmd_density->parsed()) {
            if (!d_config.empty()) {
                json cfg =
                    load_config_file(d_config, {"depth", "check", "csv", "heatmap", "out"});
                apply_cfg(cfg, cmd_density, "depth", d_depth);
                apply_cfg(cfg, cmd_density, "check", d_check);
                apply_cfg(cfg, cmd_density, "csv", d_csv);
                apply_cfg(cfg, cmd_density, "heatmap", d_heatmap);
                apply_cfg(cfg, cmd_density, "out", d_out);
            }
            json echo{{"experiment", "density"},
                      {"depth", d_depth},
                      {"check", d_check},
                      {"checkpoints", d_checkpoints}};
            return run_density(d_depth, d_check, d_checkpoints, d_csv, d_heatmap, d_out, echo);
        }
        if (cmd_flow->parsed()) {
            json echo{{"experiment", "flow"},
                      {"points", w_points},
                      {"t_start", w_ts},
                      {"t_end", w_te},
                      {"depth", w_depth}};
            return run_flow(w_points, w_ts, w_te, w_depth, w_csv, w_out, echo);
        }
        if (cmd_trace->parsed()) {
            json echo{{"experiment", "trace"}, {"n", t_n},       {"depth", t_depth},
                      {"eps", t_eps},          {"step", t_step}, {"seed", t_seed},
                      {"start", t_start},      {"audit", t_audit}, {"oracle", t_oracle}};
            return run_trace(t_n, t_depth, t_eps, t_step, t_seed, t_start, t_audit, t_oracle,
                             t_otol, t_workers, t_cache, t_bin, t_csv, t_out, echo);
        }
        if (cmd_conv->parsed()) {
            json echo{{"experiment", "converge"}, {"eps", c_eps}, {"n", c_n},
                      {"depth", c_depth},         {"seed", c_seed}, {"t_lo", c_tlo}};
            return run_converge(c_eps, c_n, c_depth, c_seed, c_tlo, c_check, c_workers, c_cache,
                                c_out, echo);
        }
        if (cmd_stoch->parsed()) {
            json echo{{"experiment", "stochasticity"},
                      {"n", s_n},
                      {"depth", s_depth},
                      {"start_level", s_slevel},
                      {"target_level", s_tlevel},
                      {"seed", s_seed},
                      {"branch", s_branch}};
            return run_stochasticity(s_n, s_depth, s_slevel, s_tlevel, s_seed, s_branch, s_atom,
                                     s_btol, s_tv, s_check, s_rows, s_workers, s_out, s_csv, echo);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitUsage;
}
