#include "copmark/families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace copmark {

namespace {

void require_nonneg_time(double t, const char* what) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument(std::string(what) + " must be a finite time >= 0");
}

// Number of event times in the half-open interval (s, t].
size_t count_in(const std::vector<double>& times, double s, double t) {
    return static_cast<size_t>(std::upper_bound(times.begin(), times.end(), t) -
                               std::upper_bound(times.begin(), times.end(), s));
}

}  // namespace

double HomFrechetFamily::rho(double t) const {
    require_nonneg_time(t, "t");
    if (restart_mode == EventMode::instant) return t == 0.0 ? 1.0 : 0.0;
    return std::exp(-restart_rate * t);
}

double HomFrechetFamily::sigma(double t) const {
    require_nonneg_time(t, "t");
    if (switch_mode == EventMode::instant) return t == 0.0 ? 0.0 : 0.5;
    return 0.5 * -std::expm1(-2.0 * switch_rate * t);
}

FrechetCoeffs HomFrechetFamily::coeffs(double t) const {
    if (!(restart_rate >= 0.0 && switch_rate >= 0.0) || !std::isfinite(restart_rate) ||
        !std::isfinite(switch_rate))
        throw std::invalid_argument("HomFrechetFamily: rates must be finite and >= 0");
    if (t == 0.0) return {0.0, 1.0};  // C_0 = M
    const double r = rho(t);
    const double s = sigma(t);
    return {s * r, (1.0 - s) * r};
}

double semigroup_check(const HomFrechetFamily& fam, double s, double t) {
    require_nonneg_time(s, "s");
    require_nonneg_time(t, "t");
    const FrechetCoeffs lhs = frechet_product(fam.coeffs(s), fam.coeffs(t));
    const FrechetCoeffs rhs = fam.coeffs(s + t);
    return std::max(std::abs(lhs.alpha - rhs.alpha), std::abs(lhs.beta - rhs.beta));
}

PiecewiseLinear PiecewiseLinear::from_breakpoints(
    const std::vector<std::pair<double, double>>& pts) {
    if (pts.empty()) throw std::invalid_argument("piecewise-linear map needs breakpoints");
    PiecewiseLinear m;
    for (const auto& [t, v] : pts) {
        m.ts.push_back(t);
        m.vs.push_back(v);
    }
    if (m.ts.front() != 0.0 || m.vs.front() != 0.0)
        throw std::invalid_argument("cumulative intensity must start at (0, 0)");
    for (size_t i = 1; i < m.ts.size(); ++i) {
        if (!(m.ts[i] > m.ts[i - 1]))
            throw std::invalid_argument("breakpoint times must be strictly increasing");
        if (m.vs[i] < m.vs[i - 1])
            throw std::invalid_argument("cumulative intensity must be non-decreasing");
    }
    return m;
}

double PiecewiseLinear::operator()(double t) const {
    require_nonneg_time(t, "t");
    const size_t k = static_cast<size_t>(
        std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    if (k == ts.size()) {
        // Extrapolate past the last breakpoint with the final slope.
        const double slope = rate(ts.back());
        return vs.back() + slope * (t - ts.back());
    }
    if (k == 0) return vs.front();
    const double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    return vs[k - 1] + w * (vs[k] - vs[k - 1]);
}

double PiecewiseLinear::rate(double t) const {
    if (ts.size() == 1) return 0.0;
    size_t k = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    if (k == 0) k = 1;
    if (k == ts.size()) k = ts.size() - 1;
    return (vs[k] - vs[k - 1]) / (ts[k] - ts[k - 1]);
}

double PiecewiseLinear::max_rate() const {
    double worst = 0.0;
    for (size_t i = 1; i < ts.size(); ++i)
        worst = std::max(worst, (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1]));
    return worst;
}

InhomIntensity InhomIntensity::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
}

InhomIntensity InhomIntensity::from_piecewise(PiecewiseLinear map) {
    auto shared = std::make_shared<PiecewiseLinear>(std::move(map));
    return {[shared](double t) { return (*shared)(t); },
            [shared](double t) { return shared->rate(t); }, shared->max_rate()};
}

InhomIntensity InhomIntensity::constant_rate(double rate) {
    if (!(rate >= 0.0)) throw std::invalid_argument("constant_rate needs rate >= 0");
    return {[rate](double t) { return rate * t; }, [rate](double) { return rate; }, rate};
}

FrechetCoeffs InhomFrechetFamily::coeffs(double s, double t) const {
    require_nonneg_time(s, "s");
    require_nonneg_time(t, "t");
    if (s > t) throw std::invalid_argument("inhom coeffs: need s <= t");
    if (s == t) return {0.0, 1.0};
    if (!restart_intensity.cumulative || !switch_intensity.cumulative)
        throw std::invalid_argument("inhom coeffs: cumulative intensities are required");
    double rho = std::exp(-(restart_intensity.cumulative(t) - restart_intensity.cumulative(s)));
    if (count_in(restart_times, s, t) > 0) rho = 0.0;  // a certain restart
    double sigma =
        0.5 * -std::expm1(-2.0 * (switch_intensity.cumulative(t) - switch_intensity.cumulative(s)));
    if (count_in(switch_times, s, t) % 2 == 1) sigma = 1.0 - sigma;  // certain parity flip
    return {sigma * rho, (1.0 - sigma) * rho};
}

double two_time_consistency(const InhomFrechetFamily& fam, double r, double s, double t) {
    if (!(r <= s && s <= t))
        throw std::invalid_argument("two_time_consistency: need r <= s <= t");
    const FrechetCoeffs lhs = frechet_product(fam.coeffs(r, s), fam.coeffs(s, t));
    const FrechetCoeffs rhs = fam.coeffs(r, t);
    return std::max(std::abs(lhs.alpha - rhs.alpha), std::abs(lhs.beta - rhs.beta));
}

GridCopula poisson_jump_copula(const PoissonJumpFamily& fam, double t, double tail_tol,
                               int workers) {
    if (!(fam.a > 0.0) || !std::isfinite(fam.a))
        throw std::invalid_argument("poisson-jump family needs finite a > 0");
    require_nonneg_time(t, "t");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw std::invalid_argument("poisson_jump_copula: tail_tol must lie in (0, 1)");

    const int n = fam.base.n();
    const double mean = fam.a * t;
    double pmf = std::exp(-mean);  // P(N = 0)
    double covered = pmf;
    std::vector<double> acc(static_cast<size_t>(n) * n, 0.0);
    auto add_weighted = [&](double w, const GridCopula& g) {
        const auto& src = g.data();
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
    };
    add_weighted(pmf, GridCopula::comonotone(n));  // C^{*0} = M
    GridCopula power = GridCopula::comonotone(n);
    int k = 0;
    while (1.0 - covered > tail_tol) {
        ++k;
        if (k > 100000)
            throw std::runtime_error("poisson_jump_copula: truncation did not converge");
        power = markov_product(power, fam.base, workers);
        pmf *= mean / k;
        covered += pmf;
        add_weighted(pmf, power);
    }
    // Renormalize the truncated mixture so the result is a valid grid copula.
    for (double& v : acc) v /= covered;
    return GridCopula::from_mass(n, std::move(acc));
}

CopulaFamily family_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.contains("type")) throw std::invalid_argument("family JSON: missing \"type\"");
    const std::string type = j.at("type").get<std::string>();

    auto parse_mode = [&](const char* key) {
        if (!j.contains(key)) return EventMode::poisson;
        const std::string m = j.at(key).get<std::string>();
        if (m == "poisson") return EventMode::poisson;
        if (m == "instant") return EventMode::instant;
        throw std::invalid_argument("family JSON: event mode must be poisson|instant");
    };

    if (type == "hom-frechet") {
        HomFrechetFamily fam;
        fam.restart_rate = j.value("lambda", 0.0);
        fam.switch_rate = j.value("mu", 0.0);
        fam.restart_mode = parse_mode("restart");
        fam.switch_mode = parse_mode("switch");
        if (!(fam.restart_rate >= 0.0 && fam.switch_rate >= 0.0))
            throw std::invalid_argument("family JSON: lambda and mu must be >= 0");
        return fam;
    }
    if (type == "inhom-frechet") {
        auto parse_intensity = [&](const char* key) {
            if (!j.contains(key) || j.at(key).empty()) return InhomIntensity::zero();
            std::vector<std::pair<double, double>> pts;
            for (const auto& bp : j.at(key))
                pts.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
            return InhomIntensity::from_piecewise(PiecewiseLinear::from_breakpoints(pts));
        };
        auto parse_times = [&](const char* key) {
            std::vector<double> out;
            if (j.contains(key))
                for (const auto& v : j.at(key)) out.push_back(v.get<double>());
            std::sort(out.begin(), out.end());
            for (double v : out)
                if (!(v > 0.0))
                    throw std::invalid_argument("family JSON: event times must be > 0");
            return out;
        };
        InhomFrechetFamily fam;
        fam.restart_intensity = parse_intensity("restart_breakpoints");
        fam.switch_intensity = parse_intensity("switch_breakpoints");
        fam.restart_times = parse_times("restart_times");
        fam.switch_times = parse_times("switch_times");
        return fam;
    }
    if (type == "poisson-jump") {
        PoissonJumpFamily fam{j.at("a").get<double>(), GridCopula::independence(1)};
        std::filesystem::path base = j.at("base").get<std::string>();
        if (base.is_relative()) base = base_dir / base;
        fam.base = GridCopula::load(base);
        return fam;
    }
    throw std::invalid_argument("family JSON: unknown type \"" + type + "\"");
}

}  // namespace copmark
