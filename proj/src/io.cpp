#include "depauw/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace depauw {

static_assert(std::endian::native == std::endian::little, "binary formats are little-endian");

uint64_t fnv1a64(std::string_view s)
{
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct EnsembleHeader {
    char magic[8];
    uint32_t version;
    uint32_t reserved;
    uint64_t seed;
    uint64_t config_hash;
    uint64_t n_paths;
    double eps;
    double step;
    double t_start;
    double t_end;
    int32_t depth;
    uint32_t descr_len;
};

}  // namespace

void write_ensemble_binary(const std::string& path, const PathEnsemble& e, uint64_t config_hash)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_ensemble_binary: cannot open " + path);
    std::string descr = e.meta.field + "|" + e.meta.start_distribution;
    EnsembleHeader hd{};
    std::memcpy(hd.magic, "DPWENS1\0", 8);
    hd.version = 1;
    hd.seed = e.meta.seed;
    hd.config_hash = config_hash;
    hd.n_paths = e.paths.size();
    hd.eps = e.meta.eps;
    hd.step = e.meta.step;
    hd.t_start = e.meta.t_start;
    hd.t_end = e.meta.t_end;
    hd.depth = e.meta.depth;
    hd.descr_len = static_cast<uint32_t>(descr.size());
    out.write(reinterpret_cast<const char*>(&hd), sizeof hd);
    out.write(descr.data(), static_cast<std::streamsize>(descr.size()));
    std::vector<double> buf;
    for (const auto& p : e.paths) {
        uint64_t n = p.size();
        out.write(reinterpret_cast<const char*>(&n), 8);
        out.write(reinterpret_cast<const char*>(&p.weight), 8);
        out.write(reinterpret_cast<const char*>(p.times.data()), static_cast<std::streamsize>(8 * n));
        buf.resize(n);
        for (size_t i = 0; i < n; ++i) buf[i] = p.points[i].x;
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(8 * n));
        for (size_t i = 0; i < n; ++i) buf[i] = p.points[i].y;
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(8 * n));
    }
    if (!out) throw std::runtime_error("write_ensemble_binary: write failed on " + path);
}

PathEnsemble read_ensemble_binary(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_ensemble_binary: cannot open " + path);
    EnsembleHeader hd{};
    in.read(reinterpret_cast<char*>(&hd), sizeof hd);
    if (!in || std::memcmp(hd.magic, "DPWENS1\0", 8) != 0 || hd.version != 1)
        throw std::runtime_error("read_ensemble_binary: bad header in " + path);
    std::string descr(hd.descr_len, '\0');
    in.read(descr.data(), hd.descr_len);
    PathEnsemble e;
    size_t bar = descr.find('|');
    e.meta.field = descr.substr(0, bar);
    e.meta.start_distribution = bar == std::string::npos ? "" : descr.substr(bar + 1);
    e.meta.seed = hd.seed;
    e.meta.eps = hd.eps;
    e.meta.step = hd.step;
    e.meta.t_start = hd.t_start;
    e.meta.t_end = hd.t_end;
    e.meta.depth = hd.depth;
    e.meta.n_paths = hd.n_paths;
    e.meta.time0_error_bound = 2.0 * hd.t_end;
    e.paths.resize(hd.n_paths);
    std::vector<double> buf;
    for (auto& p : e.paths) {
        uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), 8);
        in.read(reinterpret_cast<char*>(&p.weight), 8);
        p.times.resize(n);
        in.read(reinterpret_cast<char*>(p.times.data()), static_cast<std::streamsize>(8 * n));
        p.points.resize(n);
        buf.resize(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(8 * n));
        for (size_t i = 0; i < n; ++i) p.points[i].x = buf[i];
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(8 * n));
        for (size_t i = 0; i < n; ++i) p.points[i].y = buf[i];
    }
    if (!in) throw std::runtime_error("read_ensemble_binary: truncated file " + path);
    return e;
}

void write_ensemble_csv(const std::string& path, const PathEnsemble& e, uint64_t config_hash)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_ensemble_csv: cannot open " + path);
    out << "# config_hash=" << hash_hex(config_hash) << " seed=" << e.meta.seed << "\n";
    out << "path,t,x,y,weight\n";
    char line[160];
    for (size_t i = 0; i < e.paths.size(); ++i) {
        const Path& p = e.paths[i];
        for (size_t j = 0; j < p.size(); ++j) {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, p.times[j],
                          p.points[j].x, p.points[j].y, p.weight);
            out << line;
        }
    }
}

void write_conditional_csv(const std::string& path, const ConditionalHistogram& cond,
                           uint64_t config_hash, uint64_t seed)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_conditional_csv: cannot open " + path);
    out << "# config_hash=" << hash_hex(config_hash) << " seed=" << seed << "\n";
    out << "start_ix,start_iy,mass";
    int64_t tw = cells_per_axis(cond.target_level);
    for (int64_t ty = 0; ty < tw; ++ty)
        for (int64_t tx = 0; tx < tw; ++tx) out << ",p_" << tx << '_' << ty;
    out << "\n";
    int64_t sw = cells_per_axis(cond.start_level);
    char num[32];
    for (const auto& row : cond.rows) {
        out << (row.start_index % sw) << ',' << (row.start_index / sw);
        std::snprintf(num, sizeof num, ",%.17g", row.mass);
        out << num;
        for (double p : row.prob) {
            std::snprintf(num, sizeof num, ",%.17g", p);
            out << num;
        }
        out << "\n";
    }
}

void write_density_csv(const std::string& path, const DensityTrajectory& traj,
                       uint64_t config_hash, uint64_t seed)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_density_csv: cannot open " + path);
    out << "# config_hash=" << hash_hex(config_hash) << " seed=" << seed << "\n";
    out << "time,level,ix,iy,value\n";
    for (const auto& [t, d] : traj.checkpoints) {
        std::string ts = t.to_decimal_string();
        for (int64_t iy = 0; iy < d.width(); ++iy)
            for (int64_t ix = 0; ix < d.width(); ++ix)
                out << ts << ',' << d.level << ',' << ix << ',' << iy << ',' << d.at(ix, iy)
                    << '\n';
    }
}

void write_density_heatmaps(const std::string& path, const DensityTrajectory& traj,
                            uint64_t config_hash, uint64_t seed)
{
    nlohmann::json j;
    j["config_hash"] = hash_hex(config_hash);
    j["seed"] = seed;
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& [t, d] : traj.checkpoints) {
        nlohmann::json frame;
        frame["time"] = t.to_decimal_string();
        frame["level"] = d.level;
        nlohmann::json rows = nlohmann::json::array();
        for (int64_t iy = 0; iy < d.width(); ++iy) {
            nlohmann::json row = nlohmann::json::array();
            for (int64_t ix = 0; ix < d.width(); ++ix) row.push_back(d.at(ix, iy));
            rows.push_back(std::move(row));
        }
        frame["values"] = std::move(rows);
        frames.push_back(std::move(frame));
    }
    j["frames"] = std::move(frames);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_density_heatmaps: cannot open " + path);
    out << j.dump(1) << "\n";
}

}  // namespace depauw
