#pragma once

#include <cmath>
#include <vector>

#include "depauw/torus.hpp"

namespace depauw {

// Separable space-time test function
//   phi(t, x, y) = T(t) * B(x) * B(y)
// built from the C^2 polynomial bump (1 - u^2)^3 on |u| < 1. Compactly
// supported in (0,1) x T^2; spatial factors are evaluated with wrap-aware
// offsets so the support is a genuine torus patch.
struct SpaceTimeBump {
    double t0 = 0.5, tw = 0.25;   // time centre / half width
    double x0 = 1.0, xw = 0.5;    // spatial centres / half widths
    double y0 = 1.0, yw = 0.5;

    static double bump(double u) { double q = 1.0 - u * u; return q > 0.0 ? q * q * q : 0.0; }
    static double dbump(double u)
    {
        double q = 1.0 - u * u;
        return q > 0.0 ? -6.0 * u * q * q : 0.0;
    }
    static double wrapped_offset(double centre, double x)
    {
        double d = x - centre;
        d -= 2.0 * std::floor((d + 1.0) / 2.0);
        return d;
    }

    bool time_support(double t) const { return std::fabs(t - t0) < tw; }

    double value(double t, Vec2 p) const
    {
        double ut = (t - t0) / tw;
        double ux = wrapped_offset(x0, p.x) / xw;
        double uy = wrapped_offset(y0, p.y) / yw;
        return bump(ut) * bump(ux) * bump(uy);
    }

    double dt(double t, Vec2 p) const
    {
        double ut = (t - t0) / tw;
        double ux = wrapped_offset(x0, p.x) / xw;
        double uy = wrapped_offset(y0, p.y) / yw;
        return dbump(ut) / tw * bump(ux) * bump(uy);
    }

    Vec2 grad(double t, Vec2 p) const
    {
        double ut = (t - t0) / tw;
        double ux = wrapped_offset(x0, p.x) / xw;
        double uy = wrapped_offset(y0, p.y) / yw;
        return {bump(ut) * dbump(ux) / xw * bump(uy), bump(ut) * bump(ux) * dbump(uy) / yw};
    }
};

// The fixed residual test bank: three spatial scales crossed with three
// temporal offsets, plus one wide function. Time supports stay inside
// [1/16, 15/16] so evolve_rho_B(depth >= 4) covers every sample.
inline std::vector<SpaceTimeBump> residual_test_bank()
{
    std::vector<SpaceTimeBump> bank;
    const double scales[3] = {0.5, 0.25, 0.125};
    const double t_centres[3] = {0.3, 0.55, 0.8};
    const double x_centres[3] = {0.7, 1.2, 0.4};
    const double y_centres[3] = {1.5, 0.6, 1.1};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            SpaceTimeBump b;
            b.t0 = t_centres[j];
            b.tw = 0.2;
            b.x0 = x_centres[i];
            b.y0 = y_centres[(i + j) % 3];
            b.xw = b.yw = scales[i];
            bank.push_back(b);
        }
    }
    SpaceTimeBump wide;
    wide.t0 = 0.5;
    wide.tw = 0.4;
    wide.x0 = 1.0;
    wide.y0 = 1.0;
    wide.xw = wide.yw = 0.9;
    bank.push_back(wide);
    return bank;  // 10 functions
}

}  // namespace depauw
