#include "copmark/generator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace copmark {

ArchimedeanGenerator exponential_generator(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential generator needs rate > 0");
    char buf[64];
    std::snprintf(buf, sizeof buf, "exponential(rate=%g)", rate);
    return {buf, [rate](double x) { return std::exp(-rate * x); }};
}

ArchimedeanGenerator clayton_generator(double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("clayton generator needs theta > 0");
    char buf[64];
    std::snprintf(buf, sizeof buf, "clayton(theta=%g)", theta);
    return {buf, [theta](double x) { return std::pow(1.0 + theta * x, -1.0 / theta); }};
}

ArchimedeanGenerator gumbel_generator(double theta) {
    if (!(theta >= 1.0)) throw std::invalid_argument("gumbel generator needs theta >= 1");
    char buf[64];
    std::snprintf(buf, sizeof buf, "gumbel(theta=%g)", theta);
    return {buf, [theta](double x) { return std::exp(-std::pow(x, 1.0 / theta)); }};
}

GeneratorReport generator_validate(const ArchimedeanGenerator& g, int sample_count) {
    if (sample_count < 2) throw std::invalid_argument("generator_validate needs sample_count >= 2");
    if (!g.psi) throw std::invalid_argument("generator_validate: psi is empty");

    constexpr double kLo = 1e-8, kHi = 1e12, kDecay = 1e-6;
    GeneratorReport r;
    r.finite = true;

    const double at_zero = g.psi(0.0);
    if (!std::isfinite(at_zero)) {
        r.finite = false;
        r.failure_location = 0.0;
        r.detail = "psi(0) is not finite";
        return r;
    }
    r.unit_at_zero = (at_zero == 1.0);
    if (!r.unit_at_zero) r.detail = "psi(0) != 1";

    r.non_increasing = true;
    double prev = at_zero;
    double last_val = at_zero;
    const double ratio = std::pow(kHi / kLo, 1.0 / (sample_count - 1));
    double x = kLo;
    for (int i = 0; i < sample_count; ++i, x *= ratio) {
        const double val = g.psi(x);
        if (!std::isfinite(val)) {
            r.finite = false;
            r.failure_location = x;
            r.detail = "psi not finite on the grid";
            return r;
        }
        if (val > prev && r.non_increasing) {
            r.non_increasing = false;
            if (r.failure_location < 0.0) r.failure_location = x;
            if (r.detail.empty()) r.detail = "psi increases on the grid";
        }
        prev = val;
        last_val = val;
    }
    r.decays = (last_val < kDecay);
    if (!r.decays && r.detail.empty()) {
        r.detail = "psi does not decay below 1e-6 at the top of the grid";
        if (r.failure_location < 0.0) r.failure_location = x / ratio;
    }
    return r;
}

}  // namespace copmark
