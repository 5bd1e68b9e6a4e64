#pragma once

// Discretized copulas: an n x n matrix of cell masses with uniform marginals
// (every row and column sums to 1/n).  The Markov product C*D becomes the
// scaled matrix product n * A * B, which keeps the algebraic identities
// (M identity, Pi null, W*W = M) exact at machine precision.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "copmark/closed_copula.hpp"

namespace copmark {

class GridCopula {
  public:
    static constexpr double kInvariantTol = 1e-12;

    // Validates entries >= 0, total mass 1 and all row/column sums 1/n,
    // each within tol.  mass is row-major with n*n entries.
    static GridCopula from_mass(int n, std::vector<double> mass, double tol = kInvariantTol);

    static GridCopula independence(int n);     // Pi
    static GridCopula comonotone(int n);       // M
    static GridCopula countermonotone(int n);  // W

    int n() const { return n_; }
    double mass(int i, int j) const { return mass_[static_cast<size_t>(i) * n_ + j]; }
    const std::vector<double>& data() const { return mass_; }

    void save(const std::filesystem::path& path) const;
    void save(std::ostream& out) const;
    static GridCopula load(const std::filesystem::path& path);
    static GridCopula load(std::istream& in);

    bool operator==(const GridCopula&) const = default;

  private:
    GridCopula(int n, std::vector<double> mass) : n_(n), mass_(std::move(mass)) {}
    int n_ = 0;
    std::vector<double> mass_;
};

// Cell(i,j) = C(i/n, j/n) - C((i-1)/n, j/n) - C(i/n, (j-1)/n) + C((i-1)/n, (j-1)/n).
GridCopula discretize(const ClosedCopula& c, int n);

// n * A * B with a fixed k-ascending per-cell summation order; `workers`
// partitions output rows, never the reduction, so results are bitwise
// independent of the worker count.
GridCopula markov_product(const GridCopula& a, const GridCopula& b, int workers = 1);

// k-fold Markov product; k = 0 gives grid(M, n).
GridCopula grid_power(const GridCopula& a, int k, int workers = 1);

// Convex combination; weights must be nonnegative and sum to 1 within 1e-12.
GridCopula mixture(const std::vector<double>& weights, const std::vector<GridCopula>& grids);

GridCopula transpose(const GridCopula& a);

// Cumulative lattice F(i/n, j/n) on (n+1)^2 points, built by prefix sums.
class CdfLattice {
  public:
    explicit CdfLattice(const GridCopula& g);
    int n() const { return n_; }
    double value(int i, int j) const { return cum_[static_cast<size_t>(i) * (n_ + 1) + j]; }
    double at(double u, double v) const;  // bilinear interpolation

  private:
    int n_;
    std::vector<double> cum_;
};

double cdf_at(const GridCopula& a, double u, double v);

// Max over the (n+1)^2 lattice of |CDF(a) - CDF(b)|.
double sup_distance(const GridCopula& a, const GridCopula& b);

// Analytic-vs-grid distance on the same lattice.
double sup_distance(const GridCopula& a, const ClosedCopula& c);

// sup_distance(a*a, a).
double idempotency_defect(const GridCopula& a, int workers = 1);

struct InverseDefect {
    double left = 0.0;   // sup_distance(transpose(a)*a, M)
    double right = 0.0;  // sup_distance(a*transpose(a), M)
};
InverseDefect inverse_defect(const GridCopula& a, int workers = 1);

}  // namespace copmark
