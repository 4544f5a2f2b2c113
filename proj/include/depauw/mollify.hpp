#pragma once

#include <memory>
#include <string>
#include <vector>

#include "depauw/field.hpp"
#include "depauw/torus.hpp"

namespace depauw {

// Spatial mollification of the staged field, built so the approximations are
// divergence-free exactly: we mollify the stage stream function and take the
// perpendicular gradient of a C^1 interpolant of a single scalar table.
//
// The kernel is the tensor-product polynomial bump
//     psi(y) = 35/(32 eps) (1 - (y/eps)^2)^3  on |y| <= eps,
// nonnegative, unit mass, C^2, supported in the eps-square. A polynomial
// kernel makes the convolution with the piecewise-quadratic stream exactly
// integrable piece by piece (Gauss-Legendre of sufficient order), so table
// nodes are accurate to rounding (far below the 1e-8 contract), and the
// field reproduces b exactly wherever the stream is one quadratic piece on
// the whole kernel window.
struct Mollifier {
    double eps = 0.0;

    explicit Mollifier(double e);

    double psi(double y) const;    // 1-D factor
    double dpsi(double y) const;   // its derivative
    double value(double y1, double y2) const { return psi(y1) * psi(y2); }
    // 2-D mass by composite quadrature; equals 1 up to rounding.
    double mass_quadrature() const;
};

// Sampled stream table on the full period [0,2)^2 at spacing h, with exact
// values of S = H * psi x psi and its first/mixed derivatives at the nodes.
// Evaluation is tensor cubic Hermite interpolation: C^1 globally (periodic),
// reproducing polynomials of coordinate degree <= 3, so the interpolated
// velocity (-S_y, S_x) is the perpendicular gradient of one C^1 scalar.
struct StreamTable {
    double eps = 0.0;  // kernel radius at this table's scale
    double h = 0.0;    // node spacing
    int64_t n = 0;     // nodes per axis (n = 2/h)
    std::vector<double> s, sx, sy, sxy;

    double value_at(Vec2 q) const;     // interpolated stream value
    Vec2 velocity_at(Vec2 q) const;    // (-dS/dy, dS/dx) of the interpolant

    size_t idx(int64_t i, int64_t j) const { return static_cast<size_t>(i + j * n); }
};

// Exact node convolution (exposed for verification): S, Sx, Sy, Sxy of
// H * kernel at the point x, where H is the unit-stage stream.
void convolve_stream_node(const Mollifier& moll, Vec2 x, double out[4]);

// Build (or load from cache) the table for kernel radius eps at spacing h.
// Cache files are keyed by (eps, h); empty cache_dir disables caching.
std::shared_ptr<const StreamTable> build_stream_table(double eps, double h, int workers = 0,
                                                      const std::string& cache_dir = "");

// One stage slice of the mollified field. Stage k at mollification eps is
// the rescaled unit-stage table at effective radius 2^k eps:
//     b^eps(t, x) = (perp-grad table)(2^k x)   for t in stage k,
// matching the staged field's lack of amplitude rescaling.
struct MollifiedSlice {
    int stage_k = 0;
    double eps = 0.0;  // requested mollification radius (stage scale)
    double h = 0.0;
    std::shared_ptr<const StreamTable> table;

    Vec2 velocity(Vec2 p) const;
    double stream(Vec2 p) const;  // H_k * kernel at p
};

// Requires 0 < h <= eps/8 and eps < 1/4; throws otherwise.
MollifiedSlice build_mollified(double eps, StageIndex stage, double h, int workers = 0,
                               const std::string& cache_dir = "");

// Largest admissible stage for radius eps: cells must dominate the kernel,
// 2^-k >= 8 eps.
int admissible_depth(double eps);

// The assembled approximating field b^eps. In strict mode, evaluation below
// the admissible depth throws (naming the depth); the truncated extension
// returns zero there (the paper's b^tau device), which keeps the sequence
// divergence-free and L1-convergent to b with the uniform sup bound.
struct MollifiedField {
    double eps = 0.0;
    double h = 0.0;
    int depth = 0;  // slices 0..depth
    bool truncate_below_floor = true;
    std::vector<MollifiedSlice> slices;

    static MollifiedField build(double eps, double h = 0.0, int workers = 0,
                                const std::string& cache_dir = "", int max_depth = -1);

    double floor_time() const;  // 2^-(depth+1)
    Vec2 velocity(double t, Vec2 p) const;
    const MollifiedSlice& slice(int k) const { return slices.at(static_cast<size_t>(k)); }
};

}  // namespace depauw
