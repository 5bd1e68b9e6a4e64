// Acceptance gate: each numbered check prints one [PASS]/[FAIL] line with its
// runtime; the process exit code is the number of failures.  Tolerances and
// seeds are pinned here on purpose — do not loosen them to make a run green.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "copmark/analysis.hpp"
#include "copmark/closed_copula.hpp"
#include "copmark/families.hpp"
#include "copmark/frechet.hpp"
#include "copmark/generator.hpp"
#include "copmark/grid_copula.hpp"
#include "copmark/reflected_bm.hpp"
#include "copmark/simulate.hpp"

using namespace copmark;

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "\n       failed: " << what;
        }
    }
};

// Doubly stochastic grid mixing dyadic-weight permutation matrices; all
// entries are exact binary fractions so identity laws can be checked bitwise.
GridCopula random_dyadic_grid(int n, uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);
    std::vector<int> cuts{0, 64};
    std::uniform_int_distribution<int> tick(0, 64);
    for (int k = 1; k < 4; ++k) cuts.push_back(tick(eng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double w = static_cast<double>(cuts[k + 1] - cuts[k]) / 64.0;
        if (w == 0.0) continue;
        std::shuffle(perm.begin(), perm.end(), eng);
        for (int i = 0; i < n; ++i)
            mass[static_cast<size_t>(i) * n + perm[static_cast<size_t>(i)]] += w / n;
    }
    return GridCopula::from_mass(n, std::move(mass));
}

FrechetCoeffs random_dyadic_coeffs(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> tick(0, 64);
    int a = tick(eng);
    int b = tick(eng);
    if (a + b > 64) {
        a = 64 - a;
        b = 64 - b;
    }
    return {a / 64.0, b / 64.0};
}

void criterion_1_algebraic_identities(Outcome& o) {
    const int n = 256;
    const GridCopula w = GridCopula::countermonotone(n);
    const GridCopula m = GridCopula::comonotone(n);
    const GridCopula pi = GridCopula::independence(n);
    o.require(sup_distance(markov_product(w, w, 4), m) <= 1e-12, "sup|W*W - M| <= 1e-12");
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const GridCopula a = random_dyadic_grid(n, 1000 + seed);
        o.require(markov_product(m, a, 4) == a, "M*A == A bitwise");
        o.require(markov_product(pi, a, 4) == pi, "Pi*A == Pi bitwise");
    }
}

void criterion_2_frechet_semigroup(Outcome& o) {
    std::mt19937_64 eng(2);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const HomFrechetFamily fam{unif(eng), unif(eng), EventMode::poisson, EventMode::poisson};
        worst = std::max(worst, semigroup_check(fam, unif(eng), unif(eng)));
    }
    std::ostringstream what;
    what << "semigroup defect " << worst << " <= 1e-12";
    o.require(worst <= 1e-12, what.str());
}

void criterion_3_grid_convergence(Outcome& o) {
    std::mt19937_64 eng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const FrechetCoeffs c1 = random_dyadic_coeffs(eng);
        const FrechetCoeffs c2 = random_dyadic_coeffs(eng);
        const FrechetCoeffs p = frechet_product(c1, c2);
        double err64 = 0.0, err128 = 0.0;
        for (int n : {32, 64, 128}) {
            const GridCopula g1 = discretize(ClosedCopula::frechet(c1.alpha, c1.beta), n);
            const GridCopula g2 = discretize(ClosedCopula::frechet(c2.alpha, c2.beta), n);
            const GridCopula gp = discretize(ClosedCopula::frechet(p.alpha, p.beta), n);
            const double err = sup_distance(markov_product(g1, g2, 4), gp);
            std::ostringstream what;
            what << "pair " << rep << " error " << err << " <= 2/" << n;
            o.require(err <= 2.0 / n, what.str());
            if (n == 64) err64 = err;
            if (n == 128) err128 = err;
        }
        o.require(err128 <= 0.6 * err64, "error(128) <= 0.6 * error(64)");
    }
}

void criterion_4_poisson_jump_equivalence(Outcome& o) {
    const int n = 128;
    const GridCopula base = discretize(ClosedCopula::frechet(0.5, 0.0), n);
    const GridCopula jump = poisson_jump_copula(PoissonJumpFamily{2.0, base}, kLn2, 1e-10, 4);
    const GridCopula analytic = discretize(ClosedCopula::frechet(0.1875, 0.3125), n);
    const double err = sup_distance(jump, analytic);
    std::ostringstream what;
    what << "jump-vs-analytic " << err << " <= 1e-8 + 2/128";
    o.require(err <= 1e-8 + 2.0 / 128, what.str());
}

void criterion_5_archimedean_gap(Outcome& o) {
    const GapReport clayton = archimedean_gap(clayton_generator(1.0), {0.5, 1.0, 2.0});
    std::ostringstream what;
    what << "clayton gap " << clayton.max_gap << " >= 0.039";
    o.require(clayton.max_gap >= 0.039, what.str());
    o.require(clayton.argmax[0] == 2.0 && clayton.argmax[1] == 0.5 && clayton.argmax[2] == 2.0,
              "clayton argmax == (2, 0.5, 2)");
    const GapReport expo = archimedean_gap(exponential_generator(1.0), {0.5, 1.0, 2.0});
    std::ostringstream what2;
    what2 << "exponential gap " << expo.max_gap << " <= 1e-15";
    o.require(expo.max_gap <= 1e-15, what2.str());
}

void criterion_6_idempotency(Outcome& o) {
    const ClosedCopula ordinal =
        ClosedCopula::ordinal_sum({{0.0, 0.25}, {0.5, 1.0}});
    const double idem = idempotency_defect(discretize(ordinal, 64), 4);
    std::ostringstream what;
    what << "ordinal idempotency defect " << idem << " <= 1e-12";
    o.require(idem <= 1e-12, what.str());

    SimConfig cfg;
    cfg.seed = 6001;
    cfg.n_paths = 100000;
    const auto paths = simulate_chain(ClosedCopula::binary_scaling(), 2, cfg, 4);
    const double spread =
        spreadability_defect(lag_pairs(paths, 0, 1), lag_pairs(paths, 0, 2), 32);
    std::ostringstream what2;
    what2 << "binary spreadability defect " << spread << " <= 0.02";
    o.require(spread <= 0.02, what2.str());

    SimConfig sup_cfg;
    sup_cfg.seed = 6002;
    sup_cfg.n_paths = 10000;
    const auto binary_paths = simulate_chain(ClosedCopula::binary_scaling(), 50, sup_cfg, 4);
    const SupportReport br = conditional_support_check(ClosedCopula::binary_scaling(), binary_paths);
    o.require(br.violations == 0, "binary support violations == 0");
    const auto ordinal_paths = simulate_chain(ordinal, 50, sup_cfg, 4);
    const SupportReport orr = conditional_support_check(ordinal, ordinal_paths);
    o.require(orr.violations == 0, "ordinal support violations == 0");
}

void criterion_7_invertibility(Outcome& o) {
    const InverseDefect d = inverse_defect(discretize(ClosedCopula::ltheta(0.5), 256), 4);
    std::ostringstream what;
    what << "right defect " << d.right << " <= 2/256";
    o.require(d.right <= 2.0 / 256, what.str());
    std::ostringstream what2;
    what2 << "left defect " << d.left << " >= 0.1";
    o.require(d.left >= 0.1, what2.str());

    const ClosedCopula l = ClosedCopula::ltheta(0.5);
    const ClosedCopula r = ClosedCopula::rtheta(0.5);
    bool exact = true;
    for (int i = 1; i <= 50 && exact; ++i) {
        const double x = static_cast<double>(i) / 64;  // dyadic states keep the algebra exact
        for (int j = 1; j <= 50 && exact; ++j) {
            const double u = (2.0 * j - 1.0) / 100.0;
            for (int k = 1; k <= 50; ++k) {
                const double v = static_cast<double>(k) / 51.0;
                if (r.transition(l.transition(x, u), v) != x) {
                    exact = false;
                    break;
                }
            }
        }
    }
    o.require(exact, "f_R(f_L(x,u),v) == x on the 50^3 lattice");
}

void criterion_8_reflected_bm(Outcome& o) {
    // Density rows integrate to one.
    const int m = 2000;
    for (double t : {0.01, 0.1, 1.0}) {
        const ReflectedBmParams p{t, 1e-9};
        for (double x : {0.1, 0.5, 0.9}) {
            double row = 0.0;
            for (int j = 0; j < m; ++j) row += reflected_bm_density(x, (j + 0.5) / m, p) / m;
            std::ostringstream what;
            what << "row integral at t=" << t << " x=" << x << " within 1e-5 (got " << row << ")";
            o.require(std::fabs(row - 1.0) <= 1e-5, what.str());
        }
    }

    const double to_pi = sup_distance(reflected_bm_grid({10.0, 1e-12}, 64),
                                      GridCopula::independence(64));
    std::ostringstream what;
    what << "t=10 grid vs Pi " << to_pi << " <= 1e-3";
    o.require(to_pi <= 1e-3, what.str());

    const GridCopula g1 = reflected_bm_grid({0.1, 1e-12}, 64);
    const GridCopula g2 = reflected_bm_grid({0.2, 1e-12}, 64);
    const double ck = sup_distance(markov_product(g1, g1, 4), g2);
    std::ostringstream what2;
    what2 << "chapman-kolmogorov defect " << ck << " <= 5e-3";
    o.require(ck <= 5e-3, what2.str());

    SimConfig cfg;
    cfg.seed = 8001;
    cfg.n_paths = 100000;
    const auto paths = simulate_reflected_bm({0.0, 0.5}, cfg, 4);
    const double emp =
        sup_distance(empirical_copula(lag_pairs(paths, 0, 1), 16), reflected_bm_grid({0.5, 1e-12}, 16));
    std::ostringstream what3;
    what3 << "simulator-vs-density " << emp << " <= 0.02";
    o.require(emp <= 0.02, what3.str());
}

void criterion_9_simulation_marginals(Outcome& o) {
    const double band = 1.36 / std::sqrt(10000.0);
    auto last_values = [](const std::vector<PathSample>& paths) {
        std::vector<double> v;
        v.reserve(paths.size());
        for (const PathSample& p : paths) v.push_back(p.values.back());
        return v;
    };

    SimConfig cfg;
    cfg.n_paths = 10000;

    cfg.seed = 9001;
    for (const ClosedCopula& c :
         {ClosedCopula::independence(), ClosedCopula::frechet(0.2, 0.3),
          ClosedCopula::binary_scaling(), ClosedCopula::ltheta(0.5)}) {
        const double ks = ks_uniform_statistic(last_values(simulate_chain(c, 5, cfg, 4)));
        std::ostringstream what;
        what << "chain(" << c.variant_name() << ") KS " << ks << " <= " << band;
        o.require(ks <= band, what.str());
    }

    cfg.seed = 9002;
    const HomFrechetFamily hom{1.0, 1.0, EventMode::poisson, EventMode::poisson};
    const double ks_hom =
        ks_uniform_statistic(last_values(simulate_frechet_process(hom, {0.0, 0.5, 1.5}, cfg, 4)));
    std::ostringstream what;
    what << "restart/switch process KS " << ks_hom << " <= " << band;
    o.require(ks_hom <= band, what.str());

    cfg.seed = 9003;
    InhomFrechetFamily inhom;
    inhom.restart_intensity = InhomIntensity::from_piecewise(
        PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}}));
    inhom.switch_intensity = InhomIntensity::constant_rate(0.5);
    inhom.switch_times = {0.75};
    const double ks_inhom = ks_uniform_statistic(
        last_values(simulate_frechet_process(inhom, {0.0, 0.5, 1.5}, cfg, 4)));
    std::ostringstream what2;
    what2 << "inhomogeneous process KS " << ks_inhom << " <= " << band;
    o.require(ks_inhom <= band, what2.str());

    cfg.seed = 9004;
    const double ks_bm =
        ks_uniform_statistic(last_values(simulate_reflected_bm({0.0, 0.3, 1.0}, cfg, 4)));
    std::ostringstream what3;
    what3 << "reflected bm KS " << ks_bm << " <= " << band;
    o.require(ks_bm <= band, what3.str());
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "algebraic identities (W*W = M; M, Pi act exactly)", 2.0,
         criterion_1_algebraic_identities},
        {2, "frechet semigroup closure", 0.1, criterion_2_frechet_semigroup},
        {3, "grid product converges to the closed-form product", 10.0,
         criterion_3_grid_convergence},
        {4, "poisson jump copula reproduces the restart/switch law", 5.0,
         criterion_4_poisson_jump_equivalence},
        {5, "archimedean markov-violation gap", 0.1, criterion_5_archimedean_gap},
        {6, "idempotent copulas: defects, spreadability, support", 60.0, criterion_6_idempotency},
        {7, "one-sided invertibility of the theta family", 5.0, criterion_7_invertibility},
        {8, "reflected brownian motion copulas", 60.0, criterion_8_reflected_bm},
        {9, "uniform marginals for every simulator", 30.0, criterion_9_simulation_marginals},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "\n       exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_seconds) {
            o.pass = false;
            o.detail << "\n       runtime " << secs << " s exceeded budget " << c.budget_seconds
                     << " s";
        }
        std::printf("[%s] %d. %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.str().c_str());
        failures += o.pass ? 0 : 1;
    }
    return failures;
}
