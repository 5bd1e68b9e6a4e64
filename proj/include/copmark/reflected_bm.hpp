#pragma once

// Brownian motion on [0,1] reflected at both ends, unit diffusion.  The
// lag-t copula of the stationary process has the method-of-images density
//   c_t(x,y) = (1/sqrt(2 pi t)) sum_n [ e^{-(2n+y-x)^2/(2t)} + e^{-(2n-y-x)^2/(2t)} ]
// whose double primitive is evaluated in closed form for grids, and whose
// process is simulated by folding exact Gaussian increments.

#include <vector>

#include "copmark/grid_copula.hpp"
#include "copmark/simulate.hpp"

namespace copmark {

struct ReflectedBmParams {
    double t = 1.0;            // lag, > 0
    double series_tol = 1e-12;  // image-series truncation tolerance, > 0
};

// Truncated symmetric series, |n| <= N(t, series_tol); paired so that the
// result is bitwise symmetric in (x, y).
double reflected_bm_density(double x, double y, const ReflectedBmParams& p);

// Joint CDF of (X_0, X_t): the density's double primitive,
//   sum_n [K(2n+v) - K(2n+v-u) - K(2n-v) + K(2n-u-v)],
// K(z) = z Phi(z/sqrt t) + sqrt t phi(z/sqrt t).
double reflected_bm_cdf(double u, double v, const ReflectedBmParams& p);

// Smallest N with 4 exp(-(2N-2)^2/(2t))/sqrt(2 pi t) < tol.
int reflected_bm_truncation(double t, double tol);

// Cell masses by inclusion-exclusion of the CDF, then row/column (Sinkhorn)
// normalization; the normalization must stay within the series tolerance or
// the call fails.  Pre: n >= 8.
GridCopula reflected_bm_grid(const ReflectedBmParams& p, int n);

// Stationary start (uniform or cfg.x0), exact Gaussian increments folded by
// the triangle wave r(z) = min(z mod 2, 2 - (z mod 2)).
std::vector<PathSample> simulate_reflected_bm(const std::vector<double>& times,
                                              const SimConfig& cfg, int workers = 1);

// Triangle-wave fold of the real line onto [0,1] (period 2).
double fold_to_unit(double z);

}  // namespace copmark
