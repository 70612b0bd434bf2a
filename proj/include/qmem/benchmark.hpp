#pragma once

#include <span>
#include <vector>

namespace qmem {

/// One point of the classical measure-and-prepare fidelity bound for weak
/// coherent states stored with finite combined efficiency eta.
struct BenchmarkPoint {
    double mu;      ///< mean photon number of the input pulse
    double eta;     ///< combined channel+memory transmission in (0, 1]
    int n_min;      ///< photon-number cutoff of the optimal beam-splitter attack
    double gamma;   ///< acceptance weight of the boundary term at N = n_min
    double f_class; ///< classical fidelity bound
};

enum class Verdict { quantum, classical };

/// Poisson pmf e^-mu mu^N / N!; log-space above N = 30 to avoid overflow.
double poisson_pmf(double mu, int n);

/// Upper tail sum_{N >= n_from} P(mu, N).
double poisson_tail(double mu, int n_from);

/// Classical bound at unit efficiency: conditioned on N >= 1 photons, the
/// optimal estimate-and-resend fidelity is sum_N (N+1)/(N+2) P(mu,N)/(1-P0).
double f_class_unit_efficiency(double mu);

struct CutoffResult {
    int n_min;
    double gamma;
};

/// Photon-number cutoff of the optimal attack: smallest i such that
/// tail(i+1) <= (1 - P0) * eta, with gamma the leftover weight taken from
/// the N = n_min term.
CutoffResult n_min_for_efficiency(double mu, double eta);

/// Full finite-efficiency classical bound.
BenchmarkPoint f_class(double mu, double eta);

/// f_class evaluated over a strictly increasing mu grid.
std::vector<BenchmarkPoint> benchmark_curve(std::span<const double> mu_grid, double eta);

/// quantum iff the measured fidelity exceeds the classical bound.
Verdict assess_storage(double measured_fidelity, double mu, double eta);

} // namespace qmem
