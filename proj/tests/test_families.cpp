#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "copmark/families.hpp"
#include "copmark/grid_copula.hpp"
#include "helpers.hpp"

using namespace copmark;

namespace {
const double kLn2 = 0.6931471805599453;
}

TEST_CASE("homogeneous family coefficients") {
    const HomFrechetFamily fam{1.0, 1.0, EventMode::poisson, EventMode::poisson};
    const FrechetCoeffs c = fam.coeffs(kLn2);
    CHECK(c.alpha == doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(c.beta == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(fam.rho(kLn2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fam.sigma(kLn2) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(fam.tau(kLn2) == doctest::Approx(0.25).epsilon(1e-12));

    // t = 0 is exactly the identity copula M.
    CHECK(fam.coeffs(0.0).alpha == 0.0);
    CHECK(fam.coeffs(0.0).beta == 1.0);
}

TEST_CASE("sigma matches the odd-count poisson series") {
    // sigma(t) = P(odd number of switch events) for a Poisson(mu t) count.
    for (double mu : {0.3, 1.0, 2.5}) {
        for (double t : {0.2, 1.0, 3.0}) {
            const HomFrechetFamily fam{0.0, mu, EventMode::poisson, EventMode::poisson};
            const double mean = mu * t;
            double pmf = std::exp(-mean);
            double odd = 0.0;
            for (int k = 1; k <= 80; ++k) {
                pmf *= mean / k;
                if (k % 2 == 1) odd += pmf;
            }
            CHECK(std::fabs(fam.sigma(t) - odd) <= 1e-13);
            CHECK(std::fabs(fam.rho(t) - 1.0) <= 1e-15);
        }
    }
    // rho(t) = P(no restarts).
    const HomFrechetFamily fam{0.7, 0.0, EventMode::poisson, EventMode::poisson};
    CHECK(std::fabs(fam.rho(2.0) - std::exp(-1.4)) <= 1e-15);
    CHECK(fam.sigma(2.0) == 0.0);
}

TEST_CASE("degenerate event modes") {
    // Instant restarts wipe out all dependence for t > 0.
    const HomFrechetFamily restart{1.0, 1.0, EventMode::instant, EventMode::poisson};
    CHECK(restart.coeffs(0.5).alpha == 0.0);
    CHECK(restart.coeffs(0.5).beta == 0.0);
    CHECK(restart.coeffs(0.0).beta == 1.0);

    // Instant switches balance W and M at weight rho/2.
    const HomFrechetFamily sw{1.0, 1.0, EventMode::poisson, EventMode::instant};
    const double r = std::exp(-0.5);
    CHECK(sw.coeffs(0.5).alpha == doctest::Approx(r / 2).epsilon(1e-12));
    CHECK(sw.coeffs(0.5).beta == doctest::Approx(r / 2).epsilon(1e-12));
}

TEST_CASE("homogeneous semigroup property") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        const HomFrechetFamily fam{unif(eng), unif(eng), EventMode::poisson, EventMode::poisson};
        CHECK(semigroup_check(fam, unif(eng), unif(eng)) <= 1e-12);
    }
    // s = 0 contributes the exact identity element.
    const HomFrechetFamily fam{0.8, 1.3, EventMode::poisson, EventMode::poisson};
    CHECK(semigroup_check(fam, 0.0, 1.7) == 0.0);
    // rho is exactly multiplicative up to rounding in exp.
    CHECK(std::fabs(fam.rho(0.4) * fam.rho(1.1) - fam.rho(1.5)) <= 1e-15);
}

TEST_CASE("inhomogeneous family specializes to the homogeneous one") {
    InhomFrechetFamily fam;
    fam.restart_intensity = InhomIntensity::constant_rate(1.0);
    fam.switch_intensity = InhomIntensity::constant_rate(1.0);
    const HomFrechetFamily hom{1.0, 1.0, EventMode::poisson, EventMode::poisson};
    for (double s : {0.0, 0.3, 1.1}) {
        for (double dt : {0.0, 0.5, 1.7}) {
            const FrechetCoeffs a = fam.coeffs(s, s + dt);
            const FrechetCoeffs b = hom.coeffs(dt);
            CHECK(std::fabs(a.alpha - b.alpha) <= 1e-12);
            CHECK(std::fabs(a.beta - b.beta) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(fam.coeffs(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("deterministic events use the half-open interval convention") {
    InhomFrechetFamily restart;
    restart.restart_intensity = InhomIntensity::zero();
    restart.switch_intensity = InhomIntensity::zero();
    restart.restart_times = {1.0};
    // Restart inside (s, t] forces independence.
    CHECK(restart.coeffs(0.5, 1.5).alpha == 0.0);
    CHECK(restart.coeffs(0.5, 1.5).beta == 0.0);
    CHECK(restart.coeffs(0.5, 1.0).beta == 0.0);
    // The event at s itself belongs to the previous interval.
    CHECK(restart.coeffs(1.0, 1.5).beta == 1.0);
    CHECK(restart.coeffs(1.5, 2.0).beta == 1.0);

    InhomFrechetFamily sw;
    sw.restart_intensity = InhomIntensity::zero();
    sw.switch_intensity = InhomIntensity::zero();
    sw.switch_times = {1.0, 2.0};
    // One switch in the window: exactly W.
    CHECK(sw.coeffs(0.5, 1.5).alpha == 1.0);
    CHECK(sw.coeffs(0.5, 1.5).beta == 0.0);
    // Two switches cancel: exactly M.
    CHECK(sw.coeffs(0.5, 2.5).alpha == 0.0);
    CHECK(sw.coeffs(0.5, 2.5).beta == 1.0);
}

TEST_CASE("two-time consistency") {
    InhomFrechetFamily fam;
    fam.restart_intensity = InhomIntensity::from_piecewise(
        PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}, {3.0, 4.5}}));
    fam.switch_intensity = InhomIntensity::constant_rate(0.7);
    fam.switch_times = {0.9};

    std::mt19937_64 eng(23);
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        double a = unif(eng), b = unif(eng), c = unif(eng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        CHECK(two_time_consistency(fam, a, b, c) <= 1e-12);
    }
    // Degenerate triples reduce to the identity product.
    CHECK(two_time_consistency(fam, 1.0, 1.0, 1.0) == 0.0);
    // Splitting exactly at a deterministic event keeps consistency.
    CHECK(two_time_consistency(fam, 0.5, 0.9, 1.4) <= 1e-12);
    CHECK_THROWS_AS(two_time_consistency(fam, 2.0, 1.0, 3.0), std::invalid_argument);
}

TEST_CASE("piecewise linear intensities") {
    const PiecewiseLinear f =
        PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {1.0, 2.0}, {3.0, 2.0}});
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.5) == 1.0);
    CHECK(f(2.0) == 2.0);
    CHECK(f(3.0) == 2.0);
    CHECK(f(5.0) == 2.0);  // final slope 0 extrapolation
    CHECK(f.rate(0.5) == 2.0);
    CHECK(f.rate(2.0) == 0.0);
    CHECK(f.max_rate() == 2.0);

    const PiecewiseLinear g = PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {2.0, 1.0}});
    CHECK(g(4.0) == 2.0);  // extrapolates with slope 1/2

    CHECK_THROWS_AS(PiecewiseLinear::from_breakpoints({{0.5, 0.0}, {1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLinear::from_breakpoints({{0.0, 0.0}, {0.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("poisson jump copula") {
    const int n = 64;
    // t = 0 is exactly M.
    const PoissonJumpFamily still{2.0, GridCopula::independence(n)};
    CHECK(poisson_jump_copula(still, 0.0, 1e-10) == GridCopula::comonotone(n));

    // Base Pi: C_t = e^{-at} M + (1 - e^{-at}) Pi.
    const PoissonJumpFamily pi_jump{1.0, GridCopula::independence(n)};
    const double w = std::exp(-1.0);
    const GridCopula expect =
        mixture({w, 1.0 - w}, {GridCopula::comonotone(n), GridCopula::independence(n)});
    CHECK(sup_distance(poisson_jump_copula(pi_jump, 1.0, 1e-12), expect) <= 1e-11);

    // Base (W + Pi)/2 at a = 2, t = ln 2 reproduces the lambda = mu = 1
    // restart/switch copula.
    const PoissonJumpFamily fam{2.0, discretize(ClosedCopula::frechet(0.5, 0.0), n)};
    const GridCopula jump = poisson_jump_copula(fam, kLn2, 1e-10);
    const GridCopula analytic = discretize(ClosedCopula::frechet(0.1875, 0.3125), n);
    CHECK(sup_distance(jump, analytic) <= 1e-8);

    // Chapman-Kolmogorov across the truncated sums.
    const int nn = 32;
    const PoissonJumpFamily fam2{2.0, discretize(ClosedCopula::frechet(0.5, 0.0), nn)};
    const GridCopula cs = poisson_jump_copula(fam2, 0.4, 1e-10);
    const GridCopula ct = poisson_jump_copula(fam2, 0.7, 1e-10);
    const GridCopula cst = poisson_jump_copula(fam2, 1.1, 1e-10);
    CHECK(sup_distance(markov_product(cs, ct), cst) <= 1e-9);

    CHECK_THROWS_AS(poisson_jump_copula(fam, -1.0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(poisson_jump_copula(fam, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("families parse from json") {
    const nlohmann::json hom = {{"type", "hom-frechet"}, {"lambda", 1.0}, {"mu", 1.0}};
    const CopulaFamily f1 = family_from_json(hom, ".");
    REQUIRE(std::holds_alternative<HomFrechetFamily>(f1));
    CHECK(std::get<HomFrechetFamily>(f1).coeffs(kLn2).alpha ==
          doctest::Approx(0.1875).epsilon(1e-12));

    const nlohmann::json hom2 = {{"type", "hom-frechet"},
                                 {"lambda", 2.0},
                                 {"mu", 0.5},
                                 {"restart", "instant"},
                                 {"switch", "poisson"}};
    CHECK(std::get<HomFrechetFamily>(family_from_json(hom2, ".")).coeffs(1.0).beta == 0.0);

    const nlohmann::json inhom = {
        {"type", "inhom-frechet"},
        {"restart_breakpoints", {{0.0, 0.0}, {1.0, 1.0}}},
        {"switch_breakpoints", {{0.0, 0.0}, {2.0, 1.0}}},
        {"restart_times", {0.5}},
        {"switch_times", nlohmann::json::array()},
    };
    const CopulaFamily f2 = family_from_json(inhom, ".");
    REQUIRE(std::holds_alternative<InhomFrechetFamily>(f2));
    const auto& inhom_fam = std::get<InhomFrechetFamily>(f2);
    // The restart at 0.5 lies in (0.2, 0.7], so that window collapses to independence.
    CHECK(inhom_fam.coeffs(0.2, 0.7).alpha == 0.0);
    CHECK(inhom_fam.coeffs(0.2, 0.7).beta == 0.0);
    // (0.5, 0.7] avoids it; the coefficients must reflect the parsed intensities.
    const double rho = std::exp(-0.2);
    const double sigma = 0.5 * (1.0 - std::exp(-0.2));
    const FrechetCoeffs from_json = inhom_fam.coeffs(0.5, 0.7);
    CHECK(from_json.alpha == doctest::Approx(sigma * rho).epsilon(1e-12));
    CHECK(from_json.beta == doctest::Approx((1.0 - sigma) * rho).epsilon(1e-12));

    // Poisson jump with a grid file resolved relative to base_dir.
    const std::string grid_path = "jump_base_grid.csv";
    discretize(ClosedCopula::frechet(0.5, 0.0), 16).save(grid_path);
    const nlohmann::json jump = {{"type", "poisson-jump"}, {"a", 2.0}, {"base", grid_path}};
    const CopulaFamily f3 = family_from_json(jump, ".");
    REQUIRE(std::holds_alternative<PoissonJumpFamily>(f3));
    CHECK(std::get<PoissonJumpFamily>(f3).base.n() == 16);
    std::remove(grid_path.c_str());

    CHECK_THROWS_AS(family_from_json({{"type", "unknown"}}, "."), std::invalid_argument);
    CHECK_THROWS_AS(
        family_from_json({{"type", "inhom-frechet"}, {"restart_times", {-1.0}}}, "."),
        std::invalid_argument);
}
