#include "qmem/rng.hpp"

#include <cmath>

#include "qmem/errors.hpp"

namespace qmem {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) : engine_(seed) {}

Rng Rng::substream(uint64_t seed, uint64_t index) {
    uint64_t mixed = splitmix64(splitmix64(seed) ^ (0x55ULL + index * 0x2545F4914F6CDD1DULL));
    return Rng(mixed);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double sigma) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sigma * spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + sigma * r * std::cos(a);
}

uint64_t Rng::poisson(double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw InvalidInput("poisson: lambda must be finite and non-negative");
    if (lambda == 0.0) return 0;
    if (lambda > 64.0) {
        double half = lambda * 0.5;
        return poisson(half) + poisson(lambda - half);
    }
    // Knuth: count multiplications until the uniform product drops below e^-lambda.
    double limit = std::exp(-lambda);
    uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

uint64_t Rng::binomial(uint64_t n, double p) {
    if (p < 0.0 || p > 1.0 || !std::isfinite(p))
        throw InvalidInput("binomial: p must lie in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (static_cast<double>(n) * p > 32.0 && n > 1) {
        uint64_t half = n / 2;
        return binomial(half, p) + binomial(n - half, p);
    }
    // CDF inversion from k = 0; n*p <= 32 keeps (1-p)^n well above underflow.
    double q = 1.0 - p;
    double pmf = std::pow(q, static_cast<double>(n));
    double cdf = pmf;
    double u = uniform();
    uint64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= (static_cast<double>(n - k + 1) / static_cast<double>(k)) * (p / q);
        cdf += pmf;
    }
    return k;
}

} // namespace qmem
