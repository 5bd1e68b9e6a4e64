#pragma once

// Statistical and analytic verifiers: empirical copulas from rank transforms,
// the cross-multiplied Archimedean Markov-violation gap, spreadability
// diagnostics for idempotent chains, and conditional-support structure checks.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "copmark/closed_copula.hpp"
#include "copmark/generator.hpp"
#include "copmark/grid_copula.hpp"
#include "copmark/simulate.hpp"

namespace copmark {

struct PairSample {
    std::vector<double> x;
    std::vector<double> y;  // same length as x
};

// Average-rank pseudo-observations binned into n x n cells.  The grid
// invariants hold up to the rank-tie tolerance 1/sample_size.
// Pre: sample size >= n^2.  Degenerate samples (all x or all y equal) fail.
GridCopula empirical_copula(const PairSample& s, int n);

struct GapReport {
    double max_gap = 0.0;
    std::array<double, 3> argmax{0.0, 0.0, 0.0};
    std::vector<double> lattice;  // per-axis levels; the scan runs over lattice^3
    std::string generator_name;

    nlohmann::json to_json() const;
};

// Max over the lattice cube of |psi(x1+x2+x3) psi(x2) - psi(x2+x3) psi(x1+x2)|,
// zero (to rounding) exactly when psi is exponential on the tested points.
// Ties resolve to the lexicographically smallest argmax.
GapReport archimedean_gap(const ArchimedeanGenerator& g,
                          const std::vector<double>& lattice = {0.5, 1.0, 2.0});

// sup_distance of the two empirical copulas; small values are consistent
// with idempotency (lag-1 and lag-2 pairs share a law).
double spreadability_defect(const PairSample& lag1, const PairSample& lag2, int n);

struct SupportReport {
    int64_t checked = 0;
    int64_t violations = 0;
    std::string detail;
    bool pass() const { return violations == 0; }
};

// Verifies every path value lies in the support set declared by the chain's
// initial value: block membership for ordinal sums (paths started in the
// complement must stay constant), dyadic-orbit membership
// |v - 2^{-k} m(x0)| <= tol for binary scaling.  Other variants error out.
SupportReport conditional_support_check(const ClosedCopula& c,
                                        const std::vector<PathSample>& paths,
                                        double tol = 1e-12);

// Kolmogorov-Smirnov statistic of a sample against the uniform law on [0,1].
double ks_uniform_statistic(std::vector<double> values);

// Pairs (values[i], values[j]) across paths; both indices must be in range
// for every path.
PairSample lag_pairs(const std::vector<PathSample>& paths, size_t i, size_t j);

}  // namespace copmark
