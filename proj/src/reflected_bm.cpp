#include "copmark/reflected_bm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "copmark/rng.hpp"

namespace copmark {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_params(const ReflectedBmParams& p) {
    if (!(p.t > 0.0) || !std::isfinite(p.t))
        throw std::invalid_argument("reflected BM: t must be finite and > 0");
    if (!(p.series_tol > 0.0))
        throw std::invalid_argument("reflected BM: series_tol must be > 0");
}

double std_normal_cdf(double w) { return 0.5 * std::erfc(-w / std::sqrt(2.0)); }
double std_normal_pdf(double w) { return std::exp(-0.5 * w * w) / std::sqrt(2.0 * kPi); }

}  // namespace

int reflected_bm_truncation(double t, double tol) {
    if (!(t > 0.0 && tol > 0.0))
        throw std::invalid_argument("reflected BM truncation: need t > 0 and tol > 0");
    const double norm = std::sqrt(2.0 * kPi * t);
    for (int n = 1; n < 300; ++n) {
        const double edge = 2.0 * n - 2.0;
        if (4.0 * std::exp(-edge * edge / (2.0 * t)) / norm < tol) return n;
    }
    return 300;
}

double reflected_bm_density(double x, double y, const ReflectedBmParams& p) {
    check_params(p);
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("reflected BM density: (x, y) must lie in the unit square");
    const int order = reflected_bm_truncation(p.t, p.series_tol);
    const double inv2t = 1.0 / (2.0 * p.t);
    const auto gauss = [inv2t](double z) { return std::exp(-(z * z) * inv2t); };
    const double d = y - x;  // antisymmetric under x <-> y
    const double s = x + y;  // symmetric
    // Pairing +n with -n keeps the truncated sum bitwise symmetric in (x, y):
    // each bracket maps to itself with its two addends exchanged.
    double acc = gauss(d) + gauss(s);
    for (int k = 1; k <= order; ++k) {
        const double two_k = 2.0 * k;
        acc += gauss(two_k + d) + gauss(-two_k + d);
        acc += gauss(two_k - s) + gauss(-two_k - s);
    }
    return acc / std::sqrt(2.0 * kPi * p.t);
}

double reflected_bm_cdf(double u, double v, const ReflectedBmParams& p) {
    check_params(p);
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("reflected BM cdf: (u, v) must lie in the unit square");
    const double rt = std::sqrt(p.t);
    // Antiderivative of Phi(z / sqrt t); K'' is the heat kernel.
    const auto big_k = [rt](double z) {
        return z * std_normal_cdf(z / rt) + rt * std_normal_pdf(z / rt);
    };
    const int order = reflected_bm_truncation(p.t, p.series_tol);
    double acc = 0.0;
    for (int n = -order; n <= order; ++n) {
        const double two_n = 2.0 * n;
        acc += big_k(two_n + v) - big_k(two_n + v - u) - big_k(two_n - v) + big_k(two_n - u - v);
    }
    return acc;
}

GridCopula reflected_bm_grid(const ReflectedBmParams& p, int n) {
    check_params(p);
    if (n < 8) throw std::invalid_argument("reflected_bm_grid: n must be >= 8");
    const size_t np1 = static_cast<size_t>(n) + 1;
    std::vector<double> cdf(np1 * np1);
    for (size_t i = 0; i < np1; ++i) {
        const double u = static_cast<double>(i) / n;
        for (size_t j = 0; j < np1; ++j)
            cdf[i * np1 + j] = reflected_bm_cdf(u, static_cast<double>(j) / n, p);
    }
    const size_t nn = static_cast<size_t>(n);
    std::vector<double> mass(nn * nn);
    for (size_t i = 0; i < nn; ++i) {
        for (size_t j = 0; j < nn; ++j) {
            double cell = cdf[(i + 1) * np1 + (j + 1)] - cdf[i * np1 + (j + 1)] -
                          cdf[(i + 1) * np1 + j] + cdf[i * np1 + j];
            if (cell < 0.0) {
                if (cell < -(100.0 * p.series_tol + 1e-12))
                    throw std::runtime_error(
                        "reflected_bm_grid: negative cell mass beyond the series tolerance");
                cell = 0.0;
            }
            mass[i * nn + j] = cell;
        }
    }

    // The truncated series leaves row/column sums off 1/n by at most the
    // series tolerance; verify, then polish with a few Sinkhorn sweeps.
    const double target = 1.0 / n;
    const double guard = 1000.0 * p.series_tol + 1e-12;
    double initial_dev = 0.0;
    for (size_t i = 0; i < nn; ++i) {
        double row = 0.0, col = 0.0;
        for (size_t j = 0; j < nn; ++j) {
            row += mass[i * nn + j];
            col += mass[j * nn + i];
        }
        initial_dev = std::max({initial_dev, std::abs(row - target), std::abs(col - target)});
    }
    if (initial_dev > guard)
        throw std::runtime_error(
            "reflected_bm_grid: marginal deviation exceeds the series tolerance");

    for (int sweep = 0; sweep < 200; ++sweep) {
        double dev = 0.0;
        for (size_t i = 0; i < nn; ++i) {
            double row = 0.0;
            for (size_t j = 0; j < nn; ++j) row += mass[i * nn + j];
            if (row > 0.0) {
                const double f = target / row;
                for (size_t j = 0; j < nn; ++j) mass[i * nn + j] *= f;
            }
        }
        for (size_t j = 0; j < nn; ++j) {
            double col = 0.0;
            for (size_t i = 0; i < nn; ++i) col += mass[i * nn + j];
            if (col > 0.0) {
                const double f = target / col;
                for (size_t i = 0; i < nn; ++i) mass[i * nn + j] *= f;
            }
            dev = std::max(dev, std::abs(col - target));
        }
        if (dev < 1e-15) break;
    }
    return GridCopula::from_mass(n, std::move(mass));
}

double fold_to_unit(double z) {
    double r = std::fmod(z, 2.0);
    if (r < 0.0) r += 2.0;
    return r <= 1.0 ? r : 2.0 - r;
}

std::vector<PathSample> simulate_reflected_bm(const std::vector<double>& times,
                                              const SimConfig& cfg, int workers) {
    if (times.empty()) throw std::invalid_argument("simulate: times must be non-empty");
    double prev = -1.0;
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw std::invalid_argument("simulate: times must be finite and >= 0");
        if (t <= prev) throw std::invalid_argument("simulate: times must be strictly increasing");
        prev = t;
    }
    if (cfg.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (cfg.x0 && !(*cfg.x0 >= 0.0 && *cfg.x0 <= 1.0))
        throw std::invalid_argument("simulate: fixed initial value must lie in [0, 1]");

    std::vector<PathSample> out(static_cast<size_t>(cfg.n_paths));
    auto body = [&](int64_t p) {
        PathRng rng(cfg.seed, static_cast<uint64_t>(p));
        PathSample& path = out[static_cast<size_t>(p)];
        path.path_id = p;
        path.times = times;
        path.values.resize(times.size());
        double x = cfg.x0 ? *cfg.x0 : rng.uniform();
        double t_prev = 0.0;
        for (size_t k = 0; k < times.size(); ++k) {
            const double dt = times[k] - t_prev;
            if (dt > 0.0) x = fold_to_unit(x + rng.normal() * std::sqrt(dt));
            path.values[k] = x;
            t_prev = times[k];
        }
    };
    workers = static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(workers, cfg.n_paths)));
    if (workers == 1) {
        for (int64_t p = 0; p < cfg.n_paths; ++p) body(p);
    } else {
        std::vector<std::thread> pool;
        const int64_t chunk = (cfg.n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int64_t lo = w * chunk;
            const int64_t hi = std::min<int64_t>(cfg.n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&body, lo, hi] {
                for (int64_t p = lo; p < hi; ++p) body(p);
            });
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

}  // namespace copmark
