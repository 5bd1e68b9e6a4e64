#pragma once

// Closed-form bivariate copulas with pointwise CDF, conditional CDF and an
// exact transition map x -> f(x, u) that pushes Lebesgue measure on the
// uniform u to the conditional law given x.  Chaining transition calls with
// iid uniforms simulates a stationary Markov chain whose step copula is the
// given one.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "copmark/frechet.hpp"

namespace copmark {

struct PiTag {
    bool operator==(const PiTag&) const = default;
};
struct MTag {
    bool operator==(const MTag&) const = default;
};
struct WTag {
    bool operator==(const WTag&) const = default;
};

// C_L(u, v) = theta*min(u, v/theta) + (1-theta)*max(0, u - (1-v)/(1-theta)).
// theta = 1 gives M, theta = 0 gives W.
struct LTheta {
    double theta = 0.5;
    bool operator==(const LTheta&) const = default;
};

// Transpose of LTheta: C_R(u, v) = C_L(v, u).
struct RTheta {
    double theta = 0.5;
    bool operator==(const RTheta&) const = default;
};

// Disjoint closed intervals [lo_i, hi_i] inside [0,1] with positive length,
// sorted, interiors pairwise disjoint (shared endpoints allowed).
struct IntervalPartition {
    struct Interval {
        double lo = 0.0;
        double hi = 1.0;
        double length() const { return hi - lo; }
        bool contains(double x) const { return lo <= x && x <= hi; }
        bool operator==(const Interval&) const = default;
    };
    std::vector<Interval> intervals;

    static IntervalPartition from_pairs(const std::vector<std::pair<double, double>>& pairs);
    // Index of the interval containing x, or -1 when x lies in the complement.
    int find(double x) const;
    bool operator==(const IntervalPartition&) const = default;
};

// Ordinal sum of M copulas on the given intervals: inside each interval the
// chain stays put in distribution-free fashion (re-drawn uniformly within the
// interval); on the complement it is frozen at its initial value.
struct OrdinalSum {
    IntervalPartition part;
    bool operator==(const OrdinalSum&) const = default;
};

// Binary scaling: from state x the chain jumps to 2^{-n} m(x) with
// probability 2^{-(n+1)}, n = 0, 1, ..., where m(x) is the unique value
// x * 2^k in [1/2, 1).  Idempotent under the Markov product but not
// symmetric; its support given x is the dyadic orbit of m(x).
struct BinaryScalingTag {
    bool operator==(const BinaryScalingTag&) const = default;
};

class ClosedCopula {
  public:
    using Variant = std::variant<PiTag, MTag, WTag, FrechetCoeffs, LTheta, RTheta,
                                 OrdinalSum, BinaryScalingTag>;

    ClosedCopula() : v_(PiTag{}) {}
    explicit ClosedCopula(Variant v);

    static ClosedCopula independence() { return ClosedCopula(PiTag{}); }
    static ClosedCopula comonotone() { return ClosedCopula(MTag{}); }
    static ClosedCopula countermonotone() { return ClosedCopula(WTag{}); }
    static ClosedCopula frechet(double alpha, double beta);
    static ClosedCopula ltheta(double theta);
    static ClosedCopula rtheta(double theta);
    static ClosedCopula ordinal_sum(const std::vector<std::pair<double, double>>& intervals);
    static ClosedCopula binary_scaling() { return ClosedCopula(BinaryScalingTag{}); }

    // C(u, v) = P(U <= u, V <= v).  Pre: u, v in [0, 1].
    double cdf(double u, double v) const;

    // F(y | x) = P(X_{ +1} <= y | X_0 = x), right-continuous in y.
    // Pre: x, y in [0, 1].
    double conditional_cdf(double x, double y) const;

    // Exact inverse-conditional step: for U uniform, transition(x, U) has law
    // F(. | x).  Pre: x in [0, 1], u in (0, 1) (endpoints are tolerated and
    // mapped to the essential inf/sup of the conditional law).
    double transition(double x, double u) const;

    const Variant& value() const { return v_; }
    std::string variant_name() const;

    nlohmann::json to_json() const;
    static ClosedCopula from_json(const nlohmann::json& j);
    // Shorthand: "pi", "m", "w", "binary", "frechet:0.2,0.3", "ltheta:0.5",
    // "rtheta:0.5", "ordinal:0-0.5,0.5-1", inline JSON ("{...}") or "@file".
    static ClosedCopula parse_spec(const std::string& spec);

    bool operator==(const ClosedCopula&) const = default;

  private:
    Variant v_;
};

// Generic transition by bisecting the conditional CDF: smallest y with
// F(y | x) >= u, located to within tol.  Reference implementation used to
// cross-check the closed-form transition maps; exactness guarantees (bitwise
// composability) only hold for ClosedCopula::transition.
double transition_by_inversion(const ClosedCopula& c, double x, double u, double tol = 1e-12);

// m(x) = x * 2^k for the unique k with x * 2^k in [1/2, 1).  Exact (uses the
// binary exponent).  Pre: x in (0, 1].
double binary_mantissa(double x);

}  // namespace copmark
