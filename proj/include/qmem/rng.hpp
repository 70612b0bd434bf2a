#pragma once

#include <cstdint>
#include <random>

namespace qmem {

/// Deterministic random stream with bit-stable samplers.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the standard),
/// but all variate transforms are implemented here because the std::*_distribution
/// classes are implementation-defined and would break cross-platform
/// reproducibility of simulated counts.
class Rng {
public:
    explicit Rng(uint64_t seed);

    /// Stream for an independent logical substream (e.g. one measurement cell).
    /// Mixing is splitmix64 over (seed, index), so streams do not depend on the
    /// order in which cells are processed.
    static Rng substream(uint64_t seed, uint64_t index);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Gaussian via Box-Muller; the spare deviate is cached.
    double normal(double mean = 0.0, double sigma = 1.0);

    /// Exact Poisson sample. Knuth product method below lambda = 64,
    /// recursive halving (Poisson(l) = Poisson(l/2) + Poisson(l/2)) above,
    /// so no accuracy loss at large lambda.
    uint64_t poisson(double lambda);

    /// Exact binomial sample. CDF inversion walk for n*p <= 32, recursive
    /// halving of n above.
    uint64_t binomial(uint64_t n, double p);

    uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 mixing step; used for substream derivation and seed hashing.
uint64_t splitmix64(uint64_t x);

} // namespace qmem
