#pragma once

// Continuous-time copula families.  The homogeneous restart/switch process
// has lag-t copula C_t = alpha(t) W + pi Pi + beta(t) M with alpha = sigma*rho
// and beta = (1-sigma)*rho; the inhomogeneous variant replaces exponents by
// cumulative intensities and admits deterministic event times; the Poisson
// jump family mixes grid powers with Poisson weights.

#include <filesystem>
#include <functional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "copmark/frechet.hpp"
#include "copmark/grid_copula.hpp"

namespace copmark {

enum class EventMode {
    poisson,  // events arrive at the given rate
    instant   // degenerate limit: an event occurs in every interval (0, t], t > 0
};

struct HomFrechetFamily {
    double restart_rate = 0.0;  // lambda
    double switch_rate = 0.0;   // mu
    EventMode restart_mode = EventMode::poisson;
    EventMode switch_mode = EventMode::poisson;

    // P(no restart in (0, t]).
    double rho(double t) const;
    // P(odd number of switches in (0, t]); sigma = 1/2 - 1/2 e^{-2 mu t}.
    double sigma(double t) const;
    double tau(double t) const { return 1.0 - 2.0 * sigma(t); }
    FrechetCoeffs coeffs(double t) const;
};

// Max componentwise |coeffs(s) * coeffs(t) - coeffs(s+t)|.
double semigroup_check(const HomFrechetFamily& fam, double s, double t);

// Non-decreasing piecewise-linear map with value 0 at t = 0, extrapolated
// past the last breakpoint with the final slope.
struct PiecewiseLinear {
    std::vector<double> ts;
    std::vector<double> vs;

    static PiecewiseLinear from_breakpoints(const std::vector<std::pair<double, double>>& pts);
    double operator()(double t) const;
    double rate(double t) const;  // slope of the active segment
    double max_rate() const;
};

// Cumulative intensity with the data thinning needs.  The caller pre-integrates:
// `cumulative` is evaluated exactly, never numerically integrated.
struct InhomIntensity {
    std::function<double(double)> cumulative;  // Lambda(t), Lambda(0) = 0, non-decreasing
    std::function<double(double)> rate;        // instantaneous rate, for thinning
    double rate_bound = 0.0;                   // sup of rate on the horizon of interest

    static InhomIntensity zero();
    static InhomIntensity from_piecewise(PiecewiseLinear map);
    static InhomIntensity constant_rate(double rate);
};

struct InhomFrechetFamily {
    InhomIntensity restart_intensity;
    InhomIntensity switch_intensity;
    std::vector<double> restart_times;  // deterministic restarts, sorted
    std::vector<double> switch_times;   // deterministic switches, sorted

    // Coefficients of the copula of (X_s, X_t); events are assigned to
    // intervals by the half-open (s, t] convention.  Pre: 0 <= s <= t.
    FrechetCoeffs coeffs(double s, double t) const;
};

// Max componentwise |coeffs(r,s) * coeffs(s,t) - coeffs(r,t)|.  Pre: r <= s <= t.
double two_time_consistency(const InhomFrechetFamily& fam, double r, double s, double t);

struct PoissonJumpFamily {
    double a = 1.0;  // jump intensity
    GridCopula base;
};

// Truncated, renormalized mixture sum_{k<=K} pmf(k) base^{*k}, K minimal with
// Poisson tail mass <= tail_tol.  Pre: t >= 0, 0 < tail_tol < 1.
GridCopula poisson_jump_copula(const PoissonJumpFamily& fam, double t, double tail_tol,
                               int workers = 1);

using CopulaFamily = std::variant<HomFrechetFamily, InhomFrechetFamily, PoissonJumpFamily>;

// Parses {"type":"hom-frechet",...} | {"type":"inhom-frechet",...} |
// {"type":"poisson-jump","a":...,"base":<grid file>}; relative base paths are
// resolved against base_dir.
CopulaFamily family_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

}  // namespace copmark
