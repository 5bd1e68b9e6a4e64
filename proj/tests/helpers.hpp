#pragma once

// Shared test fixtures: deterministic random grids and small numeric helpers.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "copmark/closed_copula.hpp"
#include "copmark/frechet.hpp"
#include "copmark/grid_copula.hpp"

namespace testutil {

// Doubly stochastic mass built as a dyadic-weight mixture of permutation
// matrices.  Weights are multiples of 1/64 summing to 1 and n is expected to
// be a power of two, so every entry, row sum, and column sum is an exact
// binary fraction.  Exactness lets identity laws (M*A = A, Pi*A = Pi) be
// checked bitwise.
inline copmark::GridCopula random_dyadic_grid(int n, uint64_t seed, int n_perms = 4) {
    std::mt19937_64 eng(seed);
    std::vector<double> mass(static_cast<size_t>(n) * n, 0.0);

    // Split 64 weight ticks across the permutations.
    std::vector<int> cuts{0, 64};
    std::uniform_int_distribution<int> tick(0, 64);
    for (int k = 1; k < n_perms; ++k) cuts.push_back(tick(eng));
    std::sort(cuts.begin(), cuts.end());

    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double w = static_cast<double>(cuts[k + 1] - cuts[k]) / 64.0;
        if (w == 0.0) continue;
        std::shuffle(perm.begin(), perm.end(), eng);
        const double cell = w / n;
        for (int i = 0; i < n; ++i) mass[static_cast<size_t>(i) * n + perm[static_cast<size_t>(i)]] += cell;
    }
    return copmark::GridCopula::from_mass(n, std::move(mass));
}

// Random Fréchet coefficients that are multiples of 1/64 with alpha+beta <= 1.
inline copmark::FrechetCoeffs random_dyadic_coeffs(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> tick(0, 64);
    int a = tick(eng);
    int b = tick(eng);
    if (a + b > 64) {
        a = 64 - a;
        b = 64 - b;
    }
    return {a / 64.0, b / 64.0};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
