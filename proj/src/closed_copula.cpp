#include "copmark/closed_copula.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace copmark {

namespace {

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// --- CDFs ------------------------------------------------------------------

double cdf_pi(double u, double v) { return u * v; }
double cdf_m(double u, double v) { return std::min(u, v); }
double cdf_w(double u, double v) { return std::max(u + v - 1.0, 0.0); }

double cdf_frechet(const FrechetCoeffs& c, double u, double v) {
    return c.alpha * cdf_w(u, v) + c.pi_weight() * cdf_pi(u, v) + c.beta * cdf_m(u, v);
}

// Mass theta on the graph of y = theta*x plus mass 1-theta on the graph of
// y = 1 - (1-theta)*x; both marginals stay uniform.
double cdf_ltheta(double theta, double u, double v) {
    const double rising = (theta == 0.0) ? 0.0 : theta * std::min(u, v / theta);
    const double falling = (theta == 1.0)
                               ? 0.0
                               : (1.0 - theta) * std::max(0.0, u - (1.0 - v) / (1.0 - theta));
    return rising + falling;
}

double cdf_ordinal(const OrdinalSum& o, double u, double v) {
    // M-block contribution plus the diagonal mass of the frozen complement.
    const double m = std::min(u, v);
    double total = 0.0;
    double inside = 0.0;  // Lebesgue measure of the blocks below m
    for (const auto& iv : o.part.intervals) {
        const double cu = std::max(0.0, std::min(u, iv.hi) - iv.lo);
        const double cv = std::max(0.0, std::min(v, iv.hi) - iv.lo);
        total += cu * cv / iv.length();
        inside += std::max(0.0, std::min(m, iv.hi) - iv.lo);
    }
    return total + std::max(0.0, m - inside);
}

// P(U <= u, m(U) <= w) for U uniform; the event {m(U) <= w} is a union of
// dyadic slices [2^{-k-1}, 2^{-k} w].  Zero for w < 1/2.
double bs_joint_mantissa(double u, double w) {
    if (w < 0.5) return 0.0;
    double total = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double lo = std::ldexp(0.5, -k);  // 2^{-k-1}
        const double hi = std::min(u, std::ldexp(w, -k));
        if (hi > lo) total += hi - lo;
        if (lo < 1e-21) break;  // remaining slices sum to < 4e-21
    }
    return total;
}

double cdf_binary(double u, double v) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    u = std::min(u, 1.0);
    v = std::min(v, 1.0);
    // Split on N, the dyadic level of the jump: V = 2^{-(N+1)} m(U) with
    // P(N = n) = 2^{-(n+1)}.  Levels with 2^n v >= 1 contribute u in full.
    double total = 0.0;
    int n = 0;
    double vn = v;
    while (vn < 1.0 && n < 100) {
        total += std::ldexp(bs_joint_mantissa(u, vn), -(n + 1));
        vn *= 2.0;
        ++n;
    }
    total += std::ldexp(u, -n);  // levels with 2^n v >= 1 contribute u in full
    return total;
}

// --- conditional CDFs -------------------------------------------------------

double cond_pi(double /*x*/, double y) { return y; }
double cond_m(double x, double y) { return y >= x ? 1.0 : 0.0; }
double cond_w(double x, double y) { return y >= 1.0 - x ? 1.0 : 0.0; }

double cond_frechet(const FrechetCoeffs& c, double x, double y) {
    return c.alpha * cond_w(x, y) + c.pi_weight() * y + c.beta * cond_m(x, y);
}

double cond_ltheta(double theta, double x, double y) {
    double p = 0.0;
    if (y >= theta * x) p += theta;
    if (theta < 1.0 && y >= 1.0 - (1.0 - theta) * x) p += 1.0 - theta;
    return p;
}

// From state x, R_theta moves deterministically: the L_theta pair (X, Y)
// pins X down once Y = x is known, by inverting whichever branch x fell on.
double rtheta_point(double theta, double x) {
    if (theta == 0.0) return 1.0 - x;  // R_0 = W
    if (theta == 1.0) return x;        // R_1 = M
    return x <= theta ? x / theta : (1.0 - x) / (1.0 - theta);
}

double cond_rtheta(double theta, double x, double y) {
    return y >= rtheta_point(theta, x) ? 1.0 : 0.0;
}

double cond_ordinal(const OrdinalSum& o, double x, double y) {
    const int i = o.part.find(x);
    if (i < 0) return y >= x ? 1.0 : 0.0;  // frozen outside the blocks
    const auto& iv = o.part.intervals[static_cast<size_t>(i)];
    return clamp01((y - iv.lo) / iv.length());
}

double cond_binary(double x, double y) {
    if (x <= 0.0) throw std::invalid_argument("binary-scaling conditional needs x in (0, 1]");
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    // P(V <= y | x) = sum of 2^{-(n+1)} over n with 2^{-n} m(x) <= y; the
    // admissible n form a tail set {n >= n0}, so the sum telescopes to 2^{-n0}.
    const double m = binary_mantissa(x);
    double w = m;
    int n0 = 0;
    while (w > y && n0 < 1100) {
        w *= 0.5;
        ++n0;
    }
    return std::ldexp(1.0, -n0);
}

// --- transitions -------------------------------------------------------------

double trans_ltheta(double theta, double x, double u) {
    if (u <= theta) return theta * x;
    return 1.0 - (1.0 - theta) * x;
}

double trans_rtheta(double theta, double x, double /*u*/) {
    // The innovation is ignored: R_theta steps are a function of the state.
    return rtheta_point(theta, x);
}

double trans_frechet(const FrechetCoeffs& c, double x, double u) {
    // Split the driving uniform: [0, alpha) -> W step, [alpha, alpha+pi) ->
    // fresh uniform, [alpha+pi, 1) -> M step.
    const double pi_w = c.pi_weight();
    if (u < c.alpha) return 1.0 - x;
    if (u < c.alpha + pi_w && pi_w > 0.0) return (u - c.alpha) / pi_w;
    return x;
}

double trans_ordinal(const OrdinalSum& o, double x, double u) {
    const int i = o.part.find(x);
    if (i < 0) return x;
    const auto& iv = o.part.intervals[static_cast<size_t>(i)];
    // Clamp back into the block so that repeated steps select the same block
    // bitwise even when lo + u*(hi-lo) rounds past hi.
    return std::min(iv.hi, std::max(iv.lo, iv.lo + u * iv.length()));
}

double trans_binary(double x, double u) {
    if (x <= 0.0 || x > 1.0)
        throw std::invalid_argument("binary-scaling transition needs x in (0, 1]");
    // u in [2^{-(n+1)}, 2^{-n}) selects level n; ldexp keeps the orbit exact.
    int e = 0;
    (void)std::frexp(u, &e);  // u = f * 2^e, f in [1/2, 1)
    int n = -e;
    if (n < 0) n = 0;  // u == 1 maps to the top level
    return std::ldexp(binary_mantissa(x), -n);
}

}  // namespace

// --- IntervalPartition --------------------------------------------------------

IntervalPartition IntervalPartition::from_pairs(
    const std::vector<std::pair<double, double>>& pairs) {
    IntervalPartition p;
    p.intervals.reserve(pairs.size());
    for (const auto& [lo, hi] : pairs) p.intervals.push_back({lo, hi});
    std::sort(p.intervals.begin(), p.intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double prev_hi = 0.0;
    bool first = true;
    for (const auto& iv : p.intervals) {
        if (!(iv.lo >= 0.0 && iv.hi <= 1.0))
            throw std::invalid_argument("ordinal-sum interval outside [0, 1]");
        if (!(iv.hi > iv.lo))
            throw std::invalid_argument("ordinal-sum interval has non-positive length");
        if (!first && iv.lo < prev_hi)
            throw std::invalid_argument("ordinal-sum intervals overlap");
        prev_hi = iv.hi;
        first = false;
    }
    return p;
}

int IntervalPartition::find(double x) const {
    for (size_t i = 0; i < intervals.size(); ++i)
        if (intervals[i].contains(x)) return static_cast<int>(i);
    return -1;
}

// --- ClosedCopula ---------------------------------------------------------------

ClosedCopula::ClosedCopula(Variant v) : v_(std::move(v)) {
    if (const auto* f = std::get_if<FrechetCoeffs>(&v_)) f->require_valid();
    if (const auto* l = std::get_if<LTheta>(&v_)) require_unit(l->theta, "theta");
    if (const auto* r = std::get_if<RTheta>(&v_)) require_unit(r->theta, "theta");
}

ClosedCopula ClosedCopula::frechet(double alpha, double beta) {
    return ClosedCopula(FrechetCoeffs{alpha, beta});
}
ClosedCopula ClosedCopula::ltheta(double theta) { return ClosedCopula(LTheta{theta}); }
ClosedCopula ClosedCopula::rtheta(double theta) { return ClosedCopula(RTheta{theta}); }
ClosedCopula ClosedCopula::ordinal_sum(const std::vector<std::pair<double, double>>& intervals) {
    return ClosedCopula(OrdinalSum{IntervalPartition::from_pairs(intervals)});
}

double ClosedCopula::cdf(double u, double v) const {
    require_unit(u, "u");
    require_unit(v, "v");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PiTag>) return cdf_pi(u, v);
            else if constexpr (std::is_same_v<T, MTag>) return cdf_m(u, v);
            else if constexpr (std::is_same_v<T, WTag>) return cdf_w(u, v);
            else if constexpr (std::is_same_v<T, FrechetCoeffs>) return cdf_frechet(c, u, v);
            else if constexpr (std::is_same_v<T, LTheta>) return cdf_ltheta(c.theta, u, v);
            else if constexpr (std::is_same_v<T, RTheta>) return cdf_ltheta(c.theta, v, u);
            else if constexpr (std::is_same_v<T, OrdinalSum>) return cdf_ordinal(c, u, v);
            else return cdf_binary(u, v);
        },
        v_);
}

double ClosedCopula::conditional_cdf(double x, double y) const {
    require_unit(x, "x");
    require_unit(y, "y");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PiTag>) return cond_pi(x, y);
            else if constexpr (std::is_same_v<T, MTag>) return cond_m(x, y);
            else if constexpr (std::is_same_v<T, WTag>) return cond_w(x, y);
            else if constexpr (std::is_same_v<T, FrechetCoeffs>) return cond_frechet(c, x, y);
            else if constexpr (std::is_same_v<T, LTheta>) return cond_ltheta(c.theta, x, y);
            else if constexpr (std::is_same_v<T, RTheta>) return cond_rtheta(c.theta, x, y);
            else if constexpr (std::is_same_v<T, OrdinalSum>) return cond_ordinal(c, x, y);
            else return cond_binary(x, y);
        },
        v_);
}

double ClosedCopula::transition(double x, double u) const {
    require_unit(x, "x");
    require_unit(u, "u");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PiTag>) return u;
            else if constexpr (std::is_same_v<T, MTag>) return x;
            else if constexpr (std::is_same_v<T, WTag>) return 1.0 - x;
            else if constexpr (std::is_same_v<T, FrechetCoeffs>) return trans_frechet(c, x, u);
            else if constexpr (std::is_same_v<T, LTheta>) return trans_ltheta(c.theta, x, u);
            else if constexpr (std::is_same_v<T, RTheta>) return trans_rtheta(c.theta, x, u);
            else if constexpr (std::is_same_v<T, OrdinalSum>) return trans_ordinal(c, x, u);
            else return trans_binary(x, u == 0.0 ? 1.0 : u);
        },
        v_);
}

std::string ClosedCopula::variant_name() const {
    return std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PiTag>) return "pi";
            else if constexpr (std::is_same_v<T, MTag>) return "m";
            else if constexpr (std::is_same_v<T, WTag>) return "w";
            else if constexpr (std::is_same_v<T, FrechetCoeffs>) return "frechet";
            else if constexpr (std::is_same_v<T, LTheta>) return "ltheta";
            else if constexpr (std::is_same_v<T, RTheta>) return "rtheta";
            else if constexpr (std::is_same_v<T, OrdinalSum>) return "ordinal-sum";
            else return "binary-scaling";
        },
        v_);
}

nlohmann::json ClosedCopula::to_json() const {
    nlohmann::json j;
    j["variant"] = variant_name();
    nlohmann::json params = nlohmann::json::object();
    if (const auto* f = std::get_if<FrechetCoeffs>(&v_)) {
        params["alpha"] = f->alpha;
        params["beta"] = f->beta;
    } else if (const auto* l = std::get_if<LTheta>(&v_)) {
        params["theta"] = l->theta;
    } else if (const auto* r = std::get_if<RTheta>(&v_)) {
        params["theta"] = r->theta;
    } else if (const auto* o = std::get_if<OrdinalSum>(&v_)) {
        auto arr = nlohmann::json::array();
        for (const auto& iv : o->part.intervals) arr.push_back({iv.lo, iv.hi});
        params["intervals"] = arr;
    }
    j["params"] = params;
    return j;
}

ClosedCopula ClosedCopula::from_json(const nlohmann::json& j) {
    if (!j.contains("variant"))
        throw std::invalid_argument("copula JSON: missing \"variant\" field");
    const std::string variant = j.at("variant").get<std::string>();
    const nlohmann::json params =
        j.contains("params") ? j.at("params") : nlohmann::json::object();
    if (variant == "pi") return independence();
    if (variant == "m") return comonotone();
    if (variant == "w") return countermonotone();
    if (variant == "binary-scaling") return binary_scaling();
    if (variant == "frechet")
        return frechet(params.at("alpha").get<double>(), params.at("beta").get<double>());
    if (variant == "ltheta") return ltheta(params.at("theta").get<double>());
    if (variant == "rtheta") return rtheta(params.at("theta").get<double>());
    if (variant == "ordinal-sum") {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& iv : params.at("intervals"))
            pairs.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
        return ordinal_sum(pairs);
    }
    throw std::invalid_argument("copula JSON: unknown variant \"" + variant + "\"");
}

ClosedCopula ClosedCopula::parse_spec(const std::string& spec) {
    if (spec.empty()) throw std::invalid_argument("empty copula spec");
    if (spec.front() == '{') return from_json(nlohmann::json::parse(spec));
    if (spec.front() == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw std::runtime_error("cannot open copula file: " + spec.substr(1));
        return from_json(nlohmann::json::parse(in));
    }
    std::string head = spec, args;
    if (auto pos = spec.find(':'); pos != std::string::npos) {
        head = spec.substr(0, pos);
        args = spec.substr(pos + 1);
    }
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    auto split_doubles = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
        }
        return out;
    };
    if (head == "pi") return independence();
    if (head == "m") return comonotone();
    if (head == "w") return countermonotone();
    if (head == "binary" || head == "binary-scaling") return binary_scaling();
    if (head == "frechet") {
        auto v = split_doubles(args);
        if (v.size() != 2) throw std::invalid_argument("frechet spec needs alpha,beta");
        return frechet(v[0], v[1]);
    }
    if (head == "ltheta" || head == "rtheta") {
        auto v = split_doubles(args);
        if (v.size() != 1) throw std::invalid_argument(head + " spec needs theta");
        return head == "ltheta" ? ltheta(v[0]) : rtheta(v[0]);
    }
    if (head == "ordinal") {
        std::vector<std::pair<double, double>> pairs;
        std::stringstream ss(args);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto dash = tok.find('-');
            if (dash == std::string::npos)
                throw std::invalid_argument("ordinal spec blocks look like lo-hi");
            pairs.emplace_back(std::stod(tok.substr(0, dash)), std::stod(tok.substr(dash + 1)));
        }
        return ordinal_sum(pairs);
    }
    throw std::invalid_argument("unknown copula spec: " + spec);
}

double transition_by_inversion(const ClosedCopula& c, double x, double u, double tol) {
    require_unit(x, "x");
    require_unit(u, "u");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    double lo = 0.0, hi = 1.0;  // invariant: F(hi | x) >= u
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (c.conditional_cdf(x, mid) >= u) hi = mid;
        else lo = mid;
    }
    return hi;
}

double binary_mantissa(double x) {
    if (!(x > 0.0 && x <= 1.0))
        throw std::invalid_argument("binary_mantissa: x must lie in (0, 1]");
    int e = 0;
    double f = std::frexp(x, &e);  // x = f * 2^e, f in [1/2, 1); exact
    if (f == 0.5 && e == 1) return 0.5;  // x == 1 normalises to 1/2
    return f;
}

}  // namespace copmark
