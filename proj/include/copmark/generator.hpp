#pragma once

// Archimedean generators psi: [0, inf) -> [0, 1], non-increasing, psi(0) = 1,
// psi(x) -> 0.  Only the generator-level checks are needed here; the copulas
// themselves are never constructed.

#include <functional>
#include <string>

namespace copmark {

struct ArchimedeanGenerator {
    std::string name;
    std::function<double(double)> psi;
};

ArchimedeanGenerator exponential_generator(double rate = 1.0);
ArchimedeanGenerator clayton_generator(double theta);  // psi(x) = (1 + theta*x)^(-1/theta)
ArchimedeanGenerator gumbel_generator(double theta);   // psi(x) = exp(-x^(1/theta))

struct GeneratorReport {
    bool unit_at_zero = false;   // psi(0) == 1 exactly
    bool non_increasing = false; // on the geometric sample grid
    bool decays = false;         // psi < 1e-6 at the top of the grid
    bool finite = false;         // no NaN/Inf anywhere on the grid
    double failure_location = -1.0;  // first x where a check failed, -1 if none
    std::string detail;

    bool pass() const { return unit_at_zero && non_increasing && decays && finite; }
};

// Samples psi on a geometric grid of sample_count points spanning
// [1e-8, 1e12] plus the endpoint x = 0.  Pre: sample_count >= 2.
GeneratorReport generator_validate(const ArchimedeanGenerator& g, int sample_count);

}  // namespace copmark
