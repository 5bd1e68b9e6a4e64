#pragma once

// Fréchet combinations alpha*W + (1 - alpha - beta)*Pi + beta*M and their
// algebra under the Markov product.  The family is closed under the product,
// so a pair (alpha, beta) is all the state a two-parameter copula needs.

#include <stdexcept>

namespace copmark {

struct FrechetCoeffs {
    double alpha = 0.0;  // weight of W
    double beta = 0.0;   // weight of M

    double pi_weight() const { return 1.0 - alpha - beta; }

    // Valid parameters lie in the closed simplex alpha, beta >= 0,
    // alpha + beta <= 1 (up to tol for values produced by arithmetic).
    bool valid(double tol = 1e-12) const {
        return alpha >= -tol && beta >= -tol && alpha + beta <= 1.0 + tol;
    }

    void require_valid(double tol = 1e-12) const {
        if (!valid(tol))
            throw std::invalid_argument(
                "FrechetCoeffs: (alpha, beta) outside the simplex "
                "{alpha >= 0, beta >= 0, alpha + beta <= 1}");
    }

    bool operator==(const FrechetCoeffs&) const = default;
};

// Markov product within the family:
//   (a1, b1) * (a2, b2) = (b1*a2 + a1*b2, a1*a2 + b1*b2).
// Identity element is M = (0, 1); Pi = (0, 0) absorbs everything.
inline FrechetCoeffs frechet_product(const FrechetCoeffs& c1, const FrechetCoeffs& c2) {
    c1.require_valid();
    c2.require_valid();
    return {c1.beta * c2.alpha + c1.alpha * c2.beta,
            c1.alpha * c2.alpha + c1.beta * c2.beta};
}

// Coefficients of the copula of (X_s, X_t) for a stationary Fréchet process
// with correlation-like functions f and g, f = beta - alpha and g = beta + alpha:
//   alpha(s,t) = (f_t g_s - f_s g_t) / (g_s^2 - f_s^2)
//   beta(s,t)  = (g_t g_s - f_s f_t) / (g_s^2 - f_s^2)
// Requires g_s^2 != f_s^2, i.e. the copula at lag s is not Pi or one of the
// degenerate mixtures with alpha(s) * beta(s) rank defect.  There is no
// usable characterization of the (f, g) pairs that come from a genuine
// family, so the result is validated instead of the input.
inline FrechetCoeffs frechet_coeffs_from_fg(double f_s, double g_s, double f_t, double g_t) {
    const double denom = g_s * g_s - f_s * f_s;
    if (denom == 0.0)
        throw std::domain_error(
            "frechet_coeffs_from_fg: g_s^2 == f_s^2, two-point law does not "
            "determine the transition coefficients");
    const FrechetCoeffs out{(f_t * g_s - f_s * g_t) / denom,
                            (g_t * g_s - f_s * f_t) / denom};
    out.require_valid(1e-9);
    return out;
}

}  // namespace copmark
