#include "copmark/grid_copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace copmark {

namespace {

void check_invariants(int n, const std::vector<double>& mass, double tol) {
    const size_t nn = static_cast<size_t>(n);
    const double target = 1.0 / n;
    double total = 0.0;
    for (size_t i = 0; i < nn; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < nn; ++j) {
            const double m = mass[i * nn + j];
            if (!(m >= 0.0))
                throw std::invalid_argument("GridCopula invariant violated: negative cell mass");
            row += m;
        }
        if (std::abs(row - target) > tol)
            throw std::invalid_argument(
                "GridCopula invariant violated: row sum differs from 1/n beyond tolerance");
        total += row;
    }
    for (size_t j = 0; j < nn; ++j) {
        double col = 0.0;
        for (size_t i = 0; i < nn; ++i) col += mass[i * nn + j];
        if (std::abs(col - target) > tol)
            throw std::invalid_argument(
                "GridCopula invariant violated: column sum differs from 1/n beyond tolerance");
    }
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument(
            "GridCopula invariant violated: total mass differs from 1 beyond tolerance");
}

void run_row_partitioned(int n, int workers, const std::function<void(int, int)>& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

GridCopula GridCopula::from_mass(int n, std::vector<double> mass, double tol) {
    if (n < 1) throw std::invalid_argument("GridCopula: n must be >= 1");
    if (mass.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("GridCopula: mass must hold n*n entries");
    if (!(tol >= 0.0)) throw std::invalid_argument("GridCopula: tol must be >= 0");
    check_invariants(n, mass, tol);
    return GridCopula(n, std::move(mass));
}

GridCopula GridCopula::independence(int n) {
    if (n < 1) throw std::invalid_argument("GridCopula: n must be >= 1");
    const double cell = 1.0 / (static_cast<double>(n) * n);
    return GridCopula(n, std::vector<double>(static_cast<size_t>(n) * n, cell));
}

GridCopula GridCopula::comonotone(int n) {
    if (n < 1) throw std::invalid_argument("GridCopula: n must be >= 1");
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) mass[static_cast<size_t>(i) * n + i] = 1.0 / n;
    return GridCopula(n, std::move(mass));
}

GridCopula GridCopula::countermonotone(int n) {
    if (n < 1) throw std::invalid_argument("GridCopula: n must be >= 1");
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) mass[static_cast<size_t>(i) * n + (n - 1 - i)] = 1.0 / n;
    return GridCopula(n, std::move(mass));
}

void GridCopula::save(std::ostream& out) const {
    out << "# gridcopula n=" << n_ << "\n";
    char buf[40];
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", mass(i, j));
            out << buf << (j + 1 == n_ ? "\n" : ",");
        }
    }
}

void GridCopula::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    save(out);
    if (!out.good()) throw std::runtime_error("write failed: " + path.string());
}

GridCopula GridCopula::load(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("grid file: missing header line");
    int n = 0;
    if (std::sscanf(header.c_str(), "# gridcopula n=%d", &n) != 1 || n < 1)
        throw std::runtime_error("grid file: header must be `# gridcopula n=<N>`");
    std::vector<double> mass;
    mass.reserve(static_cast<size_t>(n) * n);
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("grid file: fewer rows than the header declares");
        std::stringstream ss(line);
        std::string tok;
        int cols = 0;
        while (std::getline(ss, tok, ',')) {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("grid file: non-numeric cell value");
            }
            mass.push_back(v);
            ++cols;
        }
        if (cols != n) throw std::runtime_error("grid file: row width differs from header n");
    }
    return from_mass(n, std::move(mass));
}

GridCopula GridCopula::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
    return load(in);
}

GridCopula discretize(const ClosedCopula& c, int n) {
    if (n < 1) throw std::invalid_argument("discretize: n must be >= 1");
    const size_t np1 = static_cast<size_t>(n) + 1;
    std::vector<double> cdf(np1 * np1);
    for (size_t i = 0; i < np1; ++i) {
        const double u = static_cast<double>(i) / n;
        for (size_t j = 0; j < np1; ++j)
            cdf[i * np1 + j] = c.cdf(u, static_cast<double>(j) / n);
    }
    std::vector<double> mass(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const size_t i1 = static_cast<size_t>(i), j1 = static_cast<size_t>(j);
            double cell = cdf[(i1 + 1) * np1 + (j1 + 1)] - cdf[i1 * np1 + (j1 + 1)] -
                          cdf[(i1 + 1) * np1 + j1] + cdf[i1 * np1 + j1];
            if (cell < 0.0) {
                if (cell < -1e-12)
                    throw std::invalid_argument(
                        "discretize: CDF is not 2-increasing (negative cell mass)");
                cell = 0.0;  // cancellation noise
            }
            mass[i1 * static_cast<size_t>(n) + j1] = cell;
        }
    }
    return GridCopula::from_mass(n, std::move(mass));
}

GridCopula markov_product(const GridCopula& a, const GridCopula& b, int workers) {
    if (a.n() != b.n())
        throw std::invalid_argument("markov_product: grids have different resolution");
    const int n = a.n();
    const size_t nn = static_cast<size_t>(n);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    std::vector<double> out(nn * nn, 0.0);
    constexpr int kBlock = 64;

    // Per output row i: out[i,:] = sum_k a[i,k] * b[k,:], k strictly ascending
    // so the result does not depend on how rows are split across workers.
    run_row_partitioned(n, workers, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            double* dst = out.data() + static_cast<size_t>(i) * nn;
            for (int k0 = 0; k0 < n; k0 += kBlock) {
                const int k1 = std::min(n, k0 + kBlock);
                for (int k = k0; k < k1; ++k) {
                    const double aik = pa[static_cast<size_t>(i) * nn + k];
                    if (aik == 0.0) continue;
                    const double* brow = pb + static_cast<size_t>(k) * nn;
                    for (int j = 0; j < n; ++j) dst[j] += aik * brow[j];
                }
            }
        }
    });
    const double scale = static_cast<double>(n);
    for (double& v : out) v *= scale;
    // Closure is mathematical; re-check defensively with the standard tol.
    return GridCopula::from_mass(n, std::move(out));
}

GridCopula grid_power(const GridCopula& a, int k, int workers) {
    if (k < 0) throw std::invalid_argument("grid_power: k must be >= 0");
    if (k == 0) return GridCopula::comonotone(a.n());
    // Square-and-multiply without an identity seed, so power(a, 1) is a
    // bitwise copy of a at every n, not M*a.
    GridCopula base = a;
    GridCopula result = a;
    bool have = false;
    int e = k;
    while (e > 0) {
        if (e & 1) {
            result = have ? markov_product(result, base, workers) : base;
            have = true;
        }
        e >>= 1;
        if (e > 0) base = markov_product(base, base, workers);
    }
    return result;
}

GridCopula mixture(const std::vector<double>& weights, const std::vector<GridCopula>& grids) {
    if (weights.empty() || weights.size() != grids.size())
        throw std::invalid_argument("mixture: need matching, non-empty weights and grids");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixture: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1 within 1e-12");
    const int n = grids.front().n();
    for (const auto& g : grids)
        if (g.n() != n) throw std::invalid_argument("mixture: grids have different resolution");
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);
    for (size_t g = 0; g < grids.size(); ++g) {
        const double w = weights[g];
        if (w == 0.0) continue;
        const auto& src = grids[g].data();
        for (size_t idx = 0; idx < mass.size(); ++idx) mass[idx] += w * src[idx];
    }
    return GridCopula::from_mass(n, std::move(mass));
}

GridCopula transpose(const GridCopula& a) {
    const int n = a.n();
    std::vector<double> mass(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            mass[static_cast<size_t>(j) * n + i] = a.mass(i, j);
    return GridCopula::from_mass(n, std::move(mass));
}

CdfLattice::CdfLattice(const GridCopula& g) : n_(g.n()) {
    const size_t np1 = static_cast<size_t>(n_) + 1;
    cum_.assign(np1 * np1, 0.0);
    // Row prefix sums accumulated downward; no subtractions, so the lattice
    // is reproducible and monotone up to rounding.
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) {
            row += g.mass(i, j);
            cum_[(static_cast<size_t>(i) + 1) * np1 + (j + 1)] =
                cum_[static_cast<size_t>(i) * np1 + (j + 1)] + row;
        }
    }
}

double CdfLattice::at(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("cdf_at: (u, v) must lie in the unit square");
    const double su = u * n_, sv = v * n_;
    const int i = std::min(static_cast<int>(su), n_ - 1);
    const int j = std::min(static_cast<int>(sv), n_ - 1);
    const double fu = su - i, fv = sv - j;
    return (1.0 - fu) * (1.0 - fv) * value(i, j) + fu * (1.0 - fv) * value(i + 1, j) +
           (1.0 - fu) * fv * value(i, j + 1) + fu * fv * value(i + 1, j + 1);
}

double cdf_at(const GridCopula& a, double u, double v) { return CdfLattice(a).at(u, v); }

double sup_distance(const GridCopula& a, const GridCopula& b) {
    if (a.n() != b.n())
        throw std::invalid_argument("sup_distance: grids have different resolution");
    const CdfLattice fa(a), fb(b);
    double worst = 0.0;
    for (int i = 0; i <= a.n(); ++i)
        for (int j = 0; j <= a.n(); ++j)
            worst = std::max(worst, std::abs(fa.value(i, j) - fb.value(i, j)));
    return worst;
}

double sup_distance(const GridCopula& a, const ClosedCopula& c) {
    const CdfLattice fa(a);
    const int n = a.n();
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        for (int j = 0; j <= n; ++j)
            worst = std::max(worst,
                             std::abs(fa.value(i, j) - c.cdf(u, static_cast<double>(j) / n)));
    }
    return worst;
}

double idempotency_defect(const GridCopula& a, int workers) {
    return sup_distance(markov_product(a, a, workers), a);
}

InverseDefect inverse_defect(const GridCopula& a, int workers) {
    const GridCopula at = transpose(a);
    const GridCopula m = GridCopula::comonotone(a.n());
    return {sup_distance(markov_product(at, a, workers), m),
            sup_distance(markov_product(a, at, workers), m)};
}

}  // namespace copmark
