#include "qmem/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

constexpr int kMaxTerms = 500;
constexpr double kTailEps = 1e-14;

void check_mu(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw InvalidInput("benchmark: mu must be finite and >= 0");
}

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0 || !std::isfinite(eta))
        throw InvalidInput("benchmark: eta must lie in (0, 1]");
}

/// Poisson pmf table p[0..K] with K chosen so the truncated tail is < 1e-14
/// (geometric bound P(K+1) / (1 - mu/(K+2))), capped at 500 terms.
struct PoissonSeries {
    std::vector<double> pmf;

    explicit PoissonSeries(double mu) {
        int k = std::max(32, static_cast<int>(std::ceil(mu)) + 8);
        while (k < kMaxTerms) {
            double head = poisson_pmf(mu, k + 1);
            double ratio = mu / (k + 2);
            if (ratio < 1.0 && head / (1.0 - ratio) < kTailEps) break;
            ++k;
        }
        pmf.resize(k + 1);
        for (int n = 0; n <= k; ++n) pmf[n] = poisson_pmf(mu, n);
    }

    int cutoff() const { return static_cast<int>(pmf.size()) - 1; }

    /// Suffix sums s[m] = sum_{N >= m} pmf[N], accumulated from the top so the
    /// small terms are added first.
    std::vector<double> suffix_sums() const {
        std::vector<double> s(pmf.size() + 1, 0.0);
        for (int n = cutoff(); n >= 0; --n) s[n] = s[n + 1] + pmf[n];
        return s;
    }

    /// Weighted suffix sums W[m] = sum_{N >= m} (N+1)/(N+2) pmf[N].
    std::vector<double> weighted_suffix_sums() const {
        std::vector<double> w(pmf.size() + 1, 0.0);
        for (int n = cutoff(); n >= 0; --n)
            w[n] = w[n + 1] + (n + 1.0) / (n + 2.0) * pmf[n];
        return w;
    }
};

} // namespace

double poisson_pmf(double mu, int n) {
    check_mu(mu);
    if (n < 0) throw InvalidInput("poisson_pmf: n must be >= 0");
    if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
    if (n <= 30) {
        double p = std::exp(-mu);
        for (int i = 1; i <= n; ++i) p *= mu / i;
        return p;
    }
    return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

double poisson_tail(double mu, int n_from) {
    check_mu(mu);
    if (n_from < 0) throw InvalidInput("poisson_tail: n_from must be >= 0");
    if (n_from == 0) return 1.0;
    PoissonSeries series(mu);
    if (n_from > series.cutoff()) return 0.0;
    return series.suffix_sums()[n_from];
}

double f_class_unit_efficiency(double mu) {
    check_mu(mu);
    if (mu == 0.0) return 2.0 / 3.0;
    // Direct series accumulation, kept independent of the suffix-sum route
    // used by f_class so the two can cross-check each other.
    double num = 0.0;
    double p = std::exp(-mu);     // P(mu, 0)
    int k = std::max(32, static_cast<int>(std::ceil(mu)) + 8);
    for (int n = 1; n <= kMaxTerms; ++n) {
        p *= mu / n;
        num += (n + 1.0) / (n + 2.0) * p;
        if (n > k && p < kTailEps * (1.0 - mu / (n + 2.0))) break;
    }
    double denom = -std::expm1(-mu);  // 1 - P0
    return num / denom;
}

CutoffResult n_min_for_efficiency(double mu, double eta) {
    check_mu(mu);
    check_eta(eta);
    PoissonSeries series(mu);
    std::vector<double> tail = series.suffix_sums();
    double target = -std::expm1(-mu) * eta;
    // Relative slack absorbs the rounding of tail(1) vs 1 - P0 at eta = 1,
    // where the exact answer is n_min = 0, gamma = 0.
    double slack = 1e-12 * (target + 1.0);
    int n = 0;
    while (n <= series.cutoff() && tail[n + 1] > target + slack) ++n;
    double gamma = std::max(0.0, target - tail[n + 1]);
    return {n, gamma};
}

BenchmarkPoint f_class(double mu, double eta) {
    check_mu(mu);
    check_eta(eta);
    if (mu == 0.0) return {mu, eta, 0, 0.0, 2.0 / 3.0};
    PoissonSeries series(mu);
    std::vector<double> tail = series.suffix_sums();
    std::vector<double> wtail = series.weighted_suffix_sums();
    CutoffResult cut = n_min_for_efficiency(mu, eta);
    int n = cut.n_min;     // always <= series cutoff: tail[cutoff+1] = 0
    double w_n = (n + 1.0) / (n + 2.0);
    double above = wtail[n + 1];
    double accepted = cut.gamma + tail[n + 1];
    if (!(accepted > 0.0))
        throw NumericalError("f_class: accepted weight vanished");
    double f = (w_n * cut.gamma + above) / accepted;
    return {mu, eta, n, cut.gamma, f};
}

std::vector<BenchmarkPoint> benchmark_curve(std::span<const double> mu_grid, double eta) {
    if (mu_grid.empty())
        throw InvalidInput("benchmark_curve: empty mu grid");
    for (size_t i = 1; i < mu_grid.size(); ++i)
        if (!(mu_grid[i] > mu_grid[i - 1]))
            throw InvalidInput("benchmark_curve: mu grid must be strictly increasing");
    std::vector<BenchmarkPoint> out;
    out.reserve(mu_grid.size());
    for (double mu : mu_grid) out.push_back(f_class(mu, eta));
    return out;
}

Verdict assess_storage(double measured_fidelity, double mu, double eta) {
    if (!(measured_fidelity >= 0.0) || measured_fidelity > 1.0 + 1e-12)
        throw InvalidInput("assess_storage: fidelity must lie in [0, 1]");
    return measured_fidelity > f_class(mu, eta).f_class ? Verdict::quantum
                                                        : Verdict::classical;
}

} // namespace qmem
