#include "depauw/mollify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "depauw/parallel.hpp"

namespace depauw {

static_assert(std::endian::native == std::endian::little,
              "stream-table cache files are little-endian");

namespace {

// Gauss-Legendre rules on [-1, 1]; 5 points integrate degree <= 9, 8 points
// degree <= 15, covering every piece polynomial exactly. Nodes and weights
// are refined to long-double precision at startup (Newton on P_n): the
// derivative kernels reach ~1/eps^2 with curvature ~1/eps^3, so double-
// rounded abscissae alone would leave a systematic ~1e-12 node error.
template <int N>
struct GaussRule {
    long double x[N];
    long double w[N];

    GaussRule()
    {
        for (int i = 0; i < N; ++i) {
            long double t = cosl(3.14159265358979323846264338328L * (i + 0.75L) / (N + 0.5L));
            for (int it = 0; it < 60; ++it) {
                long double p0 = 1.0L, p1 = t;
                for (int k = 2; k <= N; ++k) {
                    long double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                long double dp = N * (t * p1 - p0) / (t * t - 1.0L);
                long double step = p1 / dp;
                t -= step;
                if (fabsl(step) < 1e-20L) break;
            }
            long double p0 = 1.0L, p1 = t;
            for (int k = 2; k <= N; ++k) {
                long double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            long double dp = N * (t * p1 - p0) / (t * t - 1.0L);
            x[i] = t;
            w[i] = 2.0L / ((1.0L - t * t) * dp * dp);
        }
    }
};

const GaussRule<5> kInner;
const GaussRule<8> kOuter;
constexpr int kInnerN = 5;
constexpr int kOuterN = 8;

// long-double twins of the unit-stage stream and the kernel factors
inline long double stream_unit_l(long double z1, long double z2)
{
    long double m1 = floorl(z1 + 0.5L), m2 = floorl(z2 + 0.5L);
    long par = std::lround(static_cast<double>(m1 + m2));
    if ((par & 1L) != 0) return 0.5L;
    long double d = fmaxl(fabsl(z1 - m1), fabsl(z2 - m2));
    if (d > 0.5L) d = 0.5L;
    return 2.0L * d * d;
}

struct PieceList {
    long double pts[48];
    int n = 0;

    void reset(long double lo, long double hi)
    {
        pts[0] = lo;
        pts[1] = hi;
        n = 2;
        lo_ = lo;
        hi_ = hi;
    }
    void add(long double v)
    {
        if (!(v > lo_ && v < hi_)) return;
        int i = n++;
        while (i > 0 && pts[i - 1] > v) {
            pts[i] = pts[i - 1];
            --i;
        }
        pts[i] = v;
    }

private:
    long double lo_ = 0.0L, hi_ = 0.0L;
};

}  // namespace

Mollifier::Mollifier(double e) : eps(e)
{
    if (!(e > 0.0)) throw std::invalid_argument("Mollifier: eps must be positive");
}

double Mollifier::psi(double y) const
{
    double u = y / eps;
    double q = 1.0 - u * u;
    if (q <= 0.0) return 0.0;
    return (35.0 / 32.0) / eps * q * q * q;
}

double Mollifier::dpsi(double y) const
{
    double u = y / eps;
    double q = 1.0 - u * u;
    if (q <= 0.0) return 0.0;
    return (35.0 / 32.0) / (eps * eps) * (-6.0 * u) * q * q;
}

double Mollifier::mass_quadrature() const
{
    // composite 8-point GL in each variable, 4 panels per axis
    double m1 = 0.0;
    for (int p = 0; p < 4; ++p) {
        double a = -eps + 0.5 * eps * p, b = a + 0.5 * eps;
        for (int i = 0; i < kOuterN; ++i) {
            double y = 0.5 * (a + b) + 0.5 * (b - a) * static_cast<double>(kOuter.x[i]);
            m1 += 0.5 * (b - a) * static_cast<double>(kOuter.w[i]) * psi(y);
        }
    }
    return m1 * m1;
}

void convolve_stream_node(const Mollifier& moll, Vec2 x, double out[4])
{
    const long double eps = moll.eps;
    const long double x1 = x.x, x2 = x.y;
    const long double zlo1 = x1 - eps, zhi1 = x1 + eps;
    const long double zlo2 = x2 - eps, zhi2 = x2 + eps;
    const long double r1 = floorl(x1 + 0.5L), r2 = floorl(x2 + 0.5L);
    const long double cpsi = (35.0L / 32.0L) / eps;
    const long double cdpsi = -6.0L * (35.0L / 32.0L) / (eps * eps);
    auto psi_l = [&](long double y) {
        long double u = y / eps, q = 1.0L - u * u;
        return q > 0.0L ? cpsi * q * q * q : 0.0L;
    };
    auto dpsi_l = [&](long double y) {
        long double u = y / eps, q = 1.0L - u * u;
        return q > 0.0L ? cdpsi * u * q * q : 0.0L;
    };

    PieceList outer;
    outer.reset(zlo2, zhi2);
    for (int dm2 = -1; dm2 <= 1; ++dm2) {
        long double m2 = r2 + dm2;
        outer.add(m2);
        outer.add(m2 - 0.5L);
        outer.add(m2 + 0.5L);
        for (int dm1 = -1; dm1 <= 1; ++dm1) {
            long double m1 = r1 + dm1;
            outer.add(m2 + (zlo1 - m1));
            outer.add(m2 - (zlo1 - m1));
            outer.add(m2 + (zhi1 - m1));
            outer.add(m2 - (zhi1 - m1));
        }
    }

    long double S = 0.0, Sx = 0.0, Sy = 0.0, Sxy = 0.0;
    for (int op = 0; op + 1 < outer.n; ++op) {
        long double oa = outer.pts[op], ob = outer.pts[op + 1];
        if (!(ob > oa)) continue;
        long double oc = 0.5L * (oa + ob), oh = 0.5L * (ob - oa);
        for (int oi = 0; oi < kOuterN; ++oi) {
            long double z2 = oc + oh * kOuter.x[oi];
            long double W2 = oh * kOuter.w[oi];
            long double w2 = psi_l(x2 - z2);
            long double w2d = dpsi_l(x2 - z2);

            // inner pieces along z1 for this row
            long double m2row = floorl(z2 + 0.5L);
            long double c = fabsl(z2 - m2row);
            PieceList inner;
            inner.reset(zlo1, zhi1);
            for (int dm1 = -1; dm1 <= 1; ++dm1) {
                long double m1 = r1 + dm1;
                inner.add(m1 - 0.5L);
                inner.add(m1 + 0.5L);
                long lm1 = std::lround(static_cast<double>(m1));
                long lm2 = std::lround(static_cast<double>(m2row));
                if (((lm1 + lm2) & 1L) == 0) {
                    inner.add(m1 - c);
                    inner.add(m1 + c);
                }
            }
            long double A = 0.0, B = 0.0;  // integrals of H*psi and H*dpsi in z1
            for (int ip = 0; ip + 1 < inner.n; ++ip) {
                long double ia = inner.pts[ip], ib = inner.pts[ip + 1];
                if (!(ib > ia)) continue;
                long double ic = 0.5L * (ia + ib), ih = 0.5L * (ib - ia);
                for (int ii = 0; ii < kInnerN; ++ii) {
                    long double z1 = ic + ih * kInner.x[ii];
                    long double W1 = ih * kInner.w[ii];
                    long double Hv = stream_unit_l(z1, z2);
                    A += W1 * Hv * psi_l(x1 - z1);
                    B += W1 * Hv * dpsi_l(x1 - z1);
                }
            }
            S += W2 * w2 * A;
            Sx += W2 * w2 * B;
            Sy += W2 * w2d * A;
            Sxy += W2 * w2d * B;
        }
    }
    out[0] = static_cast<double>(S);
    out[1] = static_cast<double>(Sx);
    out[2] = static_cast<double>(Sy);
    out[3] = static_cast<double>(Sxy);
}

namespace {

struct CacheHeader {
    char magic[8];
    uint32_t version;
    uint32_t reserved;
    int64_t n;
    double eps;
    double h;
};

std::string cache_path(const std::string& dir, double eps, double h)
{
    uint64_t be, bh;
    std::memcpy(&be, &eps, 8);
    std::memcpy(&bh, &h, 8);
    char buf[80];
    std::snprintf(buf, sizeof buf, "/stream_%016llx_%016llx.bin",
                  static_cast<unsigned long long>(be), static_cast<unsigned long long>(bh));
    return dir + buf;
}

std::shared_ptr<StreamTable> load_cached(const std::string& path, double eps, double h)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    CacheHeader hd{};
    in.read(reinterpret_cast<char*>(&hd), sizeof hd);
    if (!in || std::memcmp(hd.magic, "DPWSTRM1", 8) != 0 || hd.version != 1 || hd.eps != eps ||
        hd.h != h || hd.n <= 0)
        return nullptr;
    auto t = std::make_shared<StreamTable>();
    t->eps = eps;
    t->h = h;
    t->n = hd.n;
    size_t total = static_cast<size_t>(hd.n) * static_cast<size_t>(hd.n);
    for (auto* v : {&t->s, &t->sx, &t->sy, &t->sxy}) {
        v->resize(total);
        in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(total * 8));
    }
    if (!in) return nullptr;
    return t;
}

void store_cached(const std::string& path, const StreamTable& t)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return;  // cache is best-effort
    CacheHeader hd{};
    std::memcpy(hd.magic, "DPWSTRM1", 8);
    hd.version = 1;
    hd.n = t.n;
    hd.eps = t.eps;
    hd.h = t.h;
    out.write(reinterpret_cast<const char*>(&hd), sizeof hd);
    for (const auto* v : {&t.s, &t.sx, &t.sy, &t.sxy})
        out.write(reinterpret_cast<const char*>(v->data()),
                  static_cast<std::streamsize>(v->size() * 8));
}

}  // namespace

std::shared_ptr<const StreamTable> build_stream_table(double eps, double h, int workers,
                                                      const std::string& cache_dir)
{
    double nd = 2.0 / h;
    int64_t n = std::llround(nd);
    if (!(h > 0.0) || static_cast<double>(n) != nd)
        throw std::invalid_argument("build_stream_table: h must divide the period 2 exactly");

    std::string path = cache_dir.empty() ? std::string() : cache_path(cache_dir, eps, h);
    if (!path.empty()) {
        if (auto cached = load_cached(path, eps, h)) return cached;
    }

    auto t = std::make_shared<StreamTable>();
    t->eps = eps;
    t->h = h;
    t->n = n;
    size_t total = static_cast<size_t>(n) * static_cast<size_t>(n);
    t->s.resize(total);
    t->sx.resize(total);
    t->sy.resize(total);
    t->sxy.resize(total);

    Mollifier moll(eps);
    parallel_chunks(static_cast<size_t>(n), workers, [&](size_t, size_t jb, size_t je) {
        for (size_t j = jb; j < je; ++j) {
            double y = static_cast<double>(j) * h;
            for (int64_t i = 0; i < n; ++i) {
                double out[4];
                convolve_stream_node(moll, {static_cast<double>(i) * h, y}, out);
                size_t id = t->idx(i, static_cast<int64_t>(j));
                t->s[id] = out[0];
                t->sx[id] = out[1];
                t->sy[id] = out[2];
                t->sxy[id] = out[3];
            }
        }
    });

    if (!path.empty()) store_cached(path, *t);
    return t;
}

namespace {

inline void hermite_basis(double f, double val[4], double der[4])
{
    double f2 = f * f, f3 = f2 * f;
    val[0] = 2 * f3 - 3 * f2 + 1;  // value, left node
    val[1] = -2 * f3 + 3 * f2;     // value, right node
    val[2] = f3 - 2 * f2 + f;      // derivative, left node
    val[3] = f3 - f2;              // derivative, right node
    der[0] = 6 * f2 - 6 * f;
    der[1] = -6 * f2 + 6 * f;
    der[2] = 3 * f2 - 4 * f + 1;
    der[3] = 3 * f2 - 2 * f;
}

}  // namespace

double StreamTable::value_at(Vec2 q) const
{
    double u = q.x / h, v = q.y / h;
    double fu = u - std::floor(u), fv = v - std::floor(v);
    int64_t i0 = static_cast<int64_t>(std::floor(u)) % n;
    int64_t j0 = static_cast<int64_t>(std::floor(v)) % n;
    if (i0 < 0) i0 += n;
    if (j0 < 0) j0 += n;
    int64_t i1 = (i0 + 1) % n, j1 = (j0 + 1) % n;

    double ax[4], dx_[4], ay[4], dy_[4];
    hermite_basis(fu, ax, dx_);
    hermite_basis(fv, ay, dy_);

    const int64_t ii[2] = {i0, i1};
    const int64_t jj[2] = {j0, j1};
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            size_t id = idx(ii[a], jj[b]);
            acc += s[id] * ax[a] * ay[b];
            acc += sx[id] * h * ax[2 + a] * ay[b];
            acc += sy[id] * h * ax[a] * ay[2 + b];
            acc += sxy[id] * h * h * ax[2 + a] * ay[2 + b];
        }
    }
    return acc;
}

Vec2 StreamTable::velocity_at(Vec2 q) const
{
    double u = q.x / h, v = q.y / h;
    double fu = u - std::floor(u), fv = v - std::floor(v);
    int64_t i0 = static_cast<int64_t>(std::floor(u)) % n;
    int64_t j0 = static_cast<int64_t>(std::floor(v)) % n;
    if (i0 < 0) i0 += n;
    if (j0 < 0) j0 += n;
    int64_t i1 = (i0 + 1) % n, j1 = (j0 + 1) % n;

    double ax[4], dxb[4], ay[4], dyb[4];
    hermite_basis(fu, ax, dxb);
    hermite_basis(fv, ay, dyb);

    const int64_t ii[2] = {i0, i1};
    const int64_t jj[2] = {j0, j1};
    double dSdx = 0.0, dSdy = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            size_t id = idx(ii[a], jj[b]);
            double vs = s[id], vx = sx[id] * h, vy = sy[id] * h, vxy = sxy[id] * h * h;
            dSdx += (vs * dxb[a] * ay[b] + vx * dxb[2 + a] * ay[b] + vy * dxb[a] * ay[2 + b] +
                     vxy * dxb[2 + a] * ay[2 + b]);
            dSdy += (vs * ax[a] * dyb[b] + vx * ax[2 + a] * dyb[b] + vy * ax[a] * dyb[2 + b] +
                     vxy * ax[2 + a] * dyb[2 + b]);
        }
    }
    dSdx /= h;
    dSdy /= h;
    return {-dSdy, dSdx};
}

int admissible_depth(double eps)
{
    int k = -1;
    while (std::ldexp(1.0, -(k + 1)) >= 8.0 * eps) ++k;
    return k;
}

MollifiedSlice build_mollified(double eps, StageIndex stage, double h, int workers,
                               const std::string& cache_dir)
{
    if (!(eps > 0.0) || eps >= 0.25)
        throw std::invalid_argument("build_mollified: require 0 < eps < 1/4");
    if (h == 0.0) h = eps / 8.0;
    if (!(h > 0.0) || h > eps / 8.0)
        throw std::invalid_argument("build_mollified: h too coarse relative to eps (need h <= eps/8)");
    if (stage.k > admissible_depth(eps))
        throw std::invalid_argument("build_mollified: stage " + std::to_string(stage.k) +
                                    " too deep for eps; admissible depth is " +
                                    std::to_string(admissible_depth(eps)));
    MollifiedSlice slice;
    slice.stage_k = stage.k;
    slice.eps = eps;
    slice.h = h;
    slice.table =
        build_stream_table(std::ldexp(eps, stage.k), std::ldexp(h, stage.k), workers, cache_dir);
    return slice;
}

Vec2 MollifiedSlice::velocity(Vec2 p) const
{
    double sc = std::ldexp(1.0, stage_k);
    return table->velocity_at({wrap2(p.x * sc), wrap2(p.y * sc)});
}

double MollifiedSlice::stream(Vec2 p) const
{
    double sc = std::ldexp(1.0, stage_k);
    return table->value_at({wrap2(p.x * sc), wrap2(p.y * sc)}) / sc;
}

MollifiedField MollifiedField::build(double eps, double h, int workers,
                                     const std::string& cache_dir, int max_depth)
{
    MollifiedField f;
    f.eps = eps;
    f.h = h == 0.0 ? eps / 8.0 : h;
    int adm = admissible_depth(eps);
    if (adm < 0)
        throw std::invalid_argument("MollifiedField: eps too large, no admissible stage (need eps <= 1/8)");
    f.depth = max_depth >= 0 ? std::min(max_depth, adm) : adm;
    for (int k = 0; k <= f.depth; ++k)
        f.slices.push_back(build_mollified(eps, StageIndex{k}, f.h, workers, cache_dir));
    return f;
}

double MollifiedField::floor_time() const { return std::ldexp(1.0, -(depth + 1)); }

Vec2 MollifiedField::velocity(double t, Vec2 p) const
{
    StageIndex st = stage_of_time(t);
    if (st.k <= depth) return slices[static_cast<size_t>(st.k)].velocity(p);
    if (truncate_below_floor) return {0.0, 0.0};
    throw std::domain_error("MollifiedField: stage " + std::to_string(st.k) +
                            " too deep for eps; admissible depth is " + std::to_string(depth));
}

}  // namespace depauw
