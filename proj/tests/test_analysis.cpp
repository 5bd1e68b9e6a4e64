#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "copmark/analysis.hpp"
#include "copmark/rng.hpp"
#include "copmark/simulate.hpp"
#include "helpers.hpp"

using namespace copmark;

TEST_CASE("empirical copulas of the basic dependence structures") {
    const int n = 16;
    const int n_samples = 4096;
    PathRng rng(1001, 0);
    PairSample como, counter, indep;
    for (int k = 0; k < n_samples; ++k) {
        const double u = rng.uniform();
        como.x.push_back(u);
        como.y.push_back(u);
        counter.x.push_back(u);
        counter.y.push_back(1.0 - u);
        indep.x.push_back(u);
        indep.y.push_back(rng.uniform());
    }
    CHECK(sup_distance(empirical_copula(como, n), GridCopula::comonotone(n)) <= 0.02);
    CHECK(sup_distance(empirical_copula(counter, n), GridCopula::countermonotone(n)) <= 0.02);
    CHECK(sup_distance(empirical_copula(indep, n), GridCopula::independence(n)) <= 0.05);
}

TEST_CASE("empirical copula of a frechet pair sample") {
    const ClosedCopula f = ClosedCopula::frechet(0.2, 0.3);
    PathRng rng(42, 1);
    PairSample s;
    for (int k = 0; k < 100000; ++k) {
        const double x = rng.uniform();
        s.x.push_back(x);
        s.y.push_back(f.transition(x, rng.uniform()));
    }
    CHECK(sup_distance(empirical_copula(s, 16), discretize(f, 16)) <= 0.01);
}

TEST_CASE("empirical copula input validation") {
    PairSample tiny{{0.1, 0.2}, {0.3, 0.4}};
    CHECK_THROWS_AS(empirical_copula(tiny, 4), std::invalid_argument);

    PairSample constant;
    for (int k = 0; k < 64; ++k) {
        constant.x.push_back(0.5);
        constant.y.push_back(k / 64.0 + 1e-3);
    }
    CHECK_THROWS_AS(empirical_copula(constant, 4), std::invalid_argument);

    PairSample out_of_range;
    PathRng rng(2, 0);
    for (int k = 0; k < 64; ++k) {
        out_of_range.x.push_back(rng.uniform());
        out_of_range.y.push_back(rng.uniform());
    }
    out_of_range.y[10] = 1.5;
    CHECK_THROWS_AS(empirical_copula(out_of_range, 4), std::invalid_argument);

    PairSample mismatched{{0.1, 0.2, 0.3}, {0.4, 0.5}};
    CHECK_THROWS_AS(empirical_copula(mismatched, 1), std::invalid_argument);
}

TEST_CASE("archimedean gap frozen values") {
    const GapReport clayton = archimedean_gap(clayton_generator(1.0));
    CHECK(clayton.max_gap == doctest::Approx(0.03957946815089673).epsilon(1e-12));
    CHECK(clayton.argmax[0] == 2.0);
    CHECK(clayton.argmax[1] == 0.5);
    CHECK(clayton.argmax[2] == 2.0);

    const GapReport gumbel = archimedean_gap(gumbel_generator(2.0));
    CHECK(gumbel.max_gap == doctest::Approx(0.016776526938751257).epsilon(1e-12));

    // Exponential generators satisfy the identity to rounding, for any rate.
    CHECK(archimedean_gap(exponential_generator(1.0)).max_gap <= 1e-15);
    CHECK(archimedean_gap(exponential_generator(0.3)).max_gap <= 1e-15);

    const nlohmann::json j = clayton.to_json();
    CHECK(j.contains("max_gap"));
    CHECK(j.contains("argmax"));
    CHECK(j.contains("lattice"));
    CHECK(j.contains("generator"));
    CHECK(j["argmax"].size() == 3);
}

TEST_CASE("gap is covariant under generator rescaling") {
    // psi(c x) scanned on lattice L/c sees exactly the same psi values as psi
    // on L; with c = 2 and a dyadic lattice the evaluations are bitwise equal.
    const ArchimedeanGenerator base = clayton_generator(1.0);
    const ArchimedeanGenerator scaled{"scaled",
                                      [&base](double x) { return base.psi(2.0 * x); }};
    const GapReport r1 = archimedean_gap(base, {0.5, 1.0, 2.0});
    const GapReport r2 = archimedean_gap(scaled, {0.25, 0.5, 1.0});
    CHECK(r1.max_gap == r2.max_gap);
    CHECK(r2.argmax[0] == r1.argmax[0] / 2.0);
    CHECK(r2.argmax[1] == r1.argmax[1] / 2.0);
    CHECK(r2.argmax[2] == r1.argmax[2] / 2.0);

    // Inexact scale factors stay within rounding noise.
    const ArchimedeanGenerator scaled17{"scaled17",
                                        [&base](double x) { return base.psi(1.7 * x); }};
    std::vector<double> lat;
    for (double v : {0.5, 1.0, 2.0}) lat.push_back(v / 1.7);
    CHECK(std::fabs(archimedean_gap(scaled17, lat).max_gap - r1.max_gap) <= 1e-12);
}

TEST_CASE("gap rejects generators that misbehave on the lattice") {
    const ArchimedeanGenerator nan_gen{"nan", [](double x) { return x > 3.0 ? std::nan("") : 1.0; }};
    CHECK_THROWS_AS(archimedean_gap(nan_gen, {0.5, 1.0, 2.0}), std::domain_error);
    CHECK_THROWS_AS(archimedean_gap(clayton_generator(1.0), {}), std::invalid_argument);
}

TEST_CASE("spreadability of an idempotent chain is sampling noise") {
    SimConfig cfg;
    cfg.seed = 14;
    cfg.n_paths = 50000;
    const auto paths = simulate_chain(ClosedCopula::comonotone(), 2, cfg);
    const double defect =
        spreadability_defect(lag_pairs(paths, 0, 1), lag_pairs(paths, 0, 2), 16);
    CHECK(defect <= 2.0 / std::sqrt(static_cast<double>(cfg.n_paths)) + 2.0 / 16.0 * 0.1);
}

TEST_CASE("spreadability separates a non-idempotent frechet chain") {
    // Lag-1 copula (0.1875, 0.3125); lag-2 its Markov square (0.1171875,
    // 0.1328125).  The analytic sup distance between them is about 0.027.
    SimConfig cfg;
    cfg.seed = 15;
    cfg.n_paths = 100000;
    const auto paths = simulate_chain(ClosedCopula::frechet(0.1875, 0.3125), 2, cfg, 4);
    const double defect =
        spreadability_defect(lag_pairs(paths, 0, 1), lag_pairs(paths, 0, 2), 16);
    CHECK(defect >= 0.015);
    CHECK(defect <= 0.045);
}

TEST_CASE("conditional support check accepts lawful paths and flags corruption") {
    const ClosedCopula d =
        ClosedCopula::ordinal_sum({{0.0, 0.25}, {0.5, 1.0}});
    SimConfig cfg;
    cfg.seed = 3;
    cfg.n_paths = 200;
    auto paths = simulate_chain(d, 30, cfg);
    CHECK(conditional_support_check(d, paths).pass());

    // Complement starts must stay constant.
    SimConfig fixed = cfg;
    fixed.x0 = 0.3;
    const auto held = simulate_chain(d, 10, fixed);
    for (const PathSample& p : held)
        for (double v : p.values) CHECK(v == 0.3);
    CHECK(conditional_support_check(d, held).pass());

    // Corrupt one value outside the start block.
    paths[7].values[5] = 0.3;
    const SupportReport bad = conditional_support_check(d, paths);
    CHECK(bad.violations >= 1);
    CHECK_FALSE(bad.detail.empty());

    const ClosedCopula e = ClosedCopula::binary_scaling();
    auto e_paths = simulate_chain(e, 30, cfg);
    CHECK(conditional_support_check(e, e_paths).pass());
    e_paths[0].values[3] = 0.37;
    CHECK(conditional_support_check(e, e_paths).violations >= 1);

    CHECK_THROWS_WITH_AS(
        static_cast<void>(conditional_support_check(ClosedCopula::independence(), paths)),
        doctest::Contains("no support descriptor"), std::invalid_argument);
}

TEST_CASE("ks statistic") {
    std::vector<double> ideal;
    const int n = 1000;
    for (int k = 0; k < n; ++k) ideal.push_back((k + 0.5) / n);
    CHECK(ks_uniform_statistic(ideal) <= 1.0 / n);

    std::vector<double> lumped(500, 0.5);
    CHECK(ks_uniform_statistic(lumped) == doctest::Approx(0.5).epsilon(1e-12));

    PathRng rng(8, 0);
    std::vector<double> sample;
    for (int k = 0; k < 10000; ++k) sample.push_back(rng.uniform());
    CHECK(ks_uniform_statistic(sample) <= 1.36 / std::sqrt(10000.0));

    CHECK_THROWS_AS(ks_uniform_statistic({}), std::invalid_argument);
}

TEST_CASE("lag pair extraction") {
    std::vector<PathSample> paths(2);
    paths[0] = {0, {0.0, 1.0, 2.0}, {0.1, 0.2, 0.3}};
    paths[1] = {1, {0.0, 1.0, 2.0}, {0.4, 0.5, 0.6}};
    const PairSample s = lag_pairs(paths, 0, 2);
    REQUIRE(s.x.size() == 2);
    CHECK(s.x[0] == 0.1);
    CHECK(s.y[0] == 0.3);
    CHECK(s.x[1] == 0.4);
    CHECK(s.y[1] == 0.6);
    CHECK_THROWS_AS(lag_pairs(paths, 0, 5), std::invalid_argument);
}
