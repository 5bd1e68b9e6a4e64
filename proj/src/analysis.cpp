#include "copmark/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace copmark {

namespace {

// Average ranks mapped to (0, 1]: rank r (1-based, ties averaged) -> r / size.
std::vector<double> pseudo_observations(const std::vector<double>& v) {
    const size_t size = v.size();
    std::vector<size_t> idx(size);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> u(size);
    size_t pos = 0;
    while (pos < size) {
        size_t end = pos;
        while (end + 1 < size && v[idx[end + 1]] == v[idx[pos]]) ++end;
        // 1-based ranks pos+1 .. end+1 share the average.
        const double avg = 0.5 * (static_cast<double>(pos + 1) + static_cast<double>(end + 1));
        for (size_t k = pos; k <= end; ++k) u[idx[k]] = avg / static_cast<double>(size);
        pos = end + 1;
    }
    return u;
}

int bin_of(double u, int n) {
    // u in (0, 1]; cell k covers ((k)/n, (k+1)/n].
    int b = static_cast<int>(std::ceil(u * n)) - 1;
    return std::min(n - 1, std::max(0, b));
}

}  // namespace

GridCopula empirical_copula(const PairSample& s, int n) {
    if (n < 1) throw std::invalid_argument("empirical_copula: n must be >= 1");
    const size_t size = s.x.size();
    if (size != s.y.size() || size == 0)
        throw std::invalid_argument("empirical_copula: sample components must match and be non-empty");
    if (size < static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("empirical_copula: sample size must be >= n^2");
    for (size_t k = 0; k < size; ++k)
        if (!(s.x[k] >= 0.0 && s.x[k] <= 1.0 && s.y[k] >= 0.0 && s.y[k] <= 1.0))
            throw std::invalid_argument("empirical_copula: sample values must lie in [0, 1]");
    const auto all_equal = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<double>()) == v.end();
    };
    if (all_equal(s.x) || all_equal(s.y))
        throw std::invalid_argument("empirical_copula: degenerate sample (a coordinate is constant)");

    const std::vector<double> ux = pseudo_observations(s.x);
    const std::vector<double> uy = pseudo_observations(s.y);
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);
    const double w = 1.0 / static_cast<double>(size);
    for (size_t k = 0; k < size; ++k)
        mass[static_cast<size_t>(bin_of(ux[k], n)) * n + bin_of(uy[k], n)] += w;
    const double tie_tol = 1.0 / static_cast<double>(size) + 1e-9;
    return GridCopula::from_mass(n, std::move(mass), tie_tol);
}

nlohmann::json GapReport::to_json() const {
    return {{"max_gap", max_gap},
            {"argmax", {argmax[0], argmax[1], argmax[2]}},
            {"lattice", lattice},
            {"generator", generator_name}};
}

GapReport archimedean_gap(const ArchimedeanGenerator& g, const std::vector<double>& lattice) {
    if (!g.psi) throw std::invalid_argument("archimedean_gap: psi is empty");
    if (lattice.empty()) throw std::invalid_argument("archimedean_gap: lattice must be non-empty");
    for (double v : lattice)
        if (!(v > 0.0)) throw std::invalid_argument("archimedean_gap: lattice points must be > 0");
    std::vector<double> levels = lattice;
    std::sort(levels.begin(), levels.end());

    const auto eval = [&](double x) {
        const double v = g.psi(x);
        if (!std::isfinite(v))
            throw std::domain_error("archimedean_gap: psi evaluated to a non-finite value");
        return v;
    };

    GapReport report;
    report.lattice = levels;
    report.generator_name = g.name;
    // Lexicographic scan; strict > keeps the smallest argmax on ties.
    for (double x1 : levels)
        for (double x2 : levels)
            for (double x3 : levels) {
                const double gap =
                    std::abs(eval(x1 + x2 + x3) * eval(x2) - eval(x2 + x3) * eval(x1 + x2));
                if (gap > report.max_gap) {
                    report.max_gap = gap;
                    report.argmax = {x1, x2, x3};
                }
            }
    return report;
}

double spreadability_defect(const PairSample& lag1, const PairSample& lag2, int n) {
    return sup_distance(empirical_copula(lag1, n), empirical_copula(lag2, n));
}

SupportReport conditional_support_check(const ClosedCopula& c,
                                        const std::vector<PathSample>& paths, double tol) {
    if (!(tol >= 0.0)) throw std::invalid_argument("conditional_support_check: tol must be >= 0");
    SupportReport report;

    if (const auto* os = std::get_if<OrdinalSum>(&c.value())) {
        for (const auto& path : paths) {
            if (path.values.empty()) continue;
            const double x0 = path.values.front();
            const int block = os->part.find(x0);
            for (double v : path.values) {
                ++report.checked;
                const bool ok = block < 0
                                    ? v == x0  // complement: frozen path
                                    : os->part.intervals[static_cast<size_t>(block)].contains(v);
                if (!ok) ++report.violations;
            }
        }
        report.detail = "ordinal-sum block membership";
        return report;
    }
    if (std::holds_alternative<BinaryScalingTag>(c.value())) {
        for (const auto& path : paths) {
            if (path.values.empty()) continue;
            const double m0 = binary_mantissa(path.values.front());
            for (double v : path.values) {
                ++report.checked;
                // v must equal 2^{-k} m0 for some k >= 0.
                const bool ok = v > 0.0 && v <= m0 + tol &&
                                std::abs(binary_mantissa(v) - m0) <= tol;
                if (!ok) ++report.violations;
            }
        }
        report.detail = "binary-scaling dyadic orbit";
        return report;
    }
    throw std::invalid_argument(
        "conditional_support_check: no support descriptor for variant " + c.variant_name());
}

double ks_uniform_statistic(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ks_uniform_statistic: empty sample");
    std::sort(values.begin(), values.end());
    const double inv = 1.0 / static_cast<double>(values.size());
    double worst = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        worst = std::max(worst, std::abs(v - static_cast<double>(k) * inv));
        worst = std::max(worst, std::abs(static_cast<double>(k + 1) * inv - v));
    }
    return worst;
}

PairSample lag_pairs(const std::vector<PathSample>& paths, size_t i, size_t j) {
    PairSample s;
    s.x.reserve(paths.size());
    s.y.reserve(paths.size());
    for (const auto& p : paths) {
        if (i >= p.values.size() || j >= p.values.size())
            throw std::invalid_argument("lag_pairs: sample index out of range for a path");
        s.x.push_back(p.values[i]);
        s.y.push_back(p.values[j]);
    }
    return s;
}

}  // namespace copmark
