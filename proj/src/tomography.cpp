#include "qmem/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "qmem/rng.hpp"

namespace qmem {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// rho = T^dag T / tr(T^dag T) with lower-triangular T = [[t0,0],[t2+i t3, t1]].
DensityMatrix2 rho_from_params(const std::array<double, 4>& t) {
    double t0 = t[0], t1 = t[1];
    complexd off(t[2], t[3]);
    double a = t0 * t0 + std::norm(off);
    double d = t1 * t1;
    complexd c = std::conj(off) * t1;  // (T^dag T)_{01}
    double tr = a + d;
    DensityMatrix2 rho;
    if (!(tr > 1e-300)) {
        rho.m = 0.5 * Matrix2c::Identity();
        return rho;
    }
    rho.m << a / tr, c / tr, std::conj(c) / tr, d / tr;
    return rho;
}

/// Inverse map for a physical rho (small ridge keeps the start interior).
std::array<double, 4> params_from_rho(const DensityMatrix2& rho_in) {
    DensityMatrix2 rho = rho_in;
    double eps = 1e-6;
    rho.m = (1.0 - eps) * rho.m + eps * 0.5 * Matrix2c::Identity();
    double r11 = rho.m(1, 1).real();
    double t1 = std::sqrt(std::max(r11, 0.0));
    complexd off = t1 > 1e-12 ? rho.m(1, 0) / t1 : complexd(0.0, 0.0);
    double t0sq = rho.m(0, 0).real() - std::norm(off);
    double t0 = std::sqrt(std::max(t0sq, 0.0));
    return {t0, t1, off.real(), off.imag()};
}

/// Negative pair-conditional binomial log-likelihood of canonical counts.
double negative_loglik(const std::array<double, 6>& k, const std::array<double, 4>& t) {
    DensityMatrix2 rho = rho_from_params(t);
    auto s = rho.bloch();
    // q = <X|rho|X> for X = H, D, R; the partner projector has 1 - q.
    double q[3] = {0.5 * (1.0 + s[2]), 0.5 * (1.0 + s[0]), 0.5 * (1.0 + s[1])};
    int idx_pos[3] = {0, 2, 4};  // H, D, R in canonical order
    int idx_neg[3] = {1, 3, 5};  // V, A, L
    double nll = 0.0;
    for (int pair = 0; pair < 3; ++pair) {
        double qp = std::min(std::max(q[pair], 1e-15), 1.0 - 1e-15);
        double kp = k[idx_pos[pair]];
        double kn = k[idx_neg[pair]];
        if (kp > 0.0) nll -= kp * std::log(qp);
        if (kn > 0.0) nll -= kn * std::log(1.0 - qp);
    }
    return nll;
}

struct NelderMead {
    std::function<double(const std::array<double, 4>&)> f;
    int evals = 0;

    double eval(const std::array<double, 4>& x) {
        ++evals;
        return f(x);
    }

    /// Standard simplex iteration; returns best vertex. tol is the absolute
    /// function-value spread treated as converged.
    std::pair<std::array<double, 4>, double> minimize(const std::array<double, 4>& start,
                                                      double step, double tol, int max_iter,
                                                      int& iters_out, bool& converged_out) {
        constexpr int n = 4;
        std::array<std::array<double, 4>, n + 1> x;
        std::array<double, n + 1> fv;
        x[0] = start;
        fv[0] = eval(x[0]);
        for (int i = 0; i < n; ++i) {
            x[i + 1] = start;
            x[i + 1][i] += step * (1.0 + std::abs(start[i]));
            fv[i + 1] = eval(x[i + 1]);
        }
        auto order = [&] {
            for (int i = 0; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (fv[j] < fv[i]) { std::swap(fv[i], fv[j]); std::swap(x[i], x[j]); }
        };
        order();
        int it = 0;
        converged_out = false;
        for (; it < max_iter; ++it) {
            if (std::abs(fv[n] - fv[0]) < tol * (1.0 + std::abs(fv[0]))) {
                converged_out = true;
                break;
            }
            std::array<double, 4> centroid{};
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < 4; ++d) centroid[d] += x[i][d] / n;
            auto blend = [&](double coef) {
                std::array<double, 4> p;
                for (int d = 0; d < 4; ++d) p[d] = centroid[d] + coef * (x[n][d] - centroid[d]);
                return p;
            };
            auto xr = blend(-1.0);
            double fr = eval(xr);
            if (fr < fv[0]) {
                auto xe = blend(-2.0);
                double fe = eval(xe);
                if (fe < fr) { x[n] = xe; fv[n] = fe; }
                else { x[n] = xr; fv[n] = fr; }
            } else if (fr < fv[n - 1]) {
                x[n] = xr; fv[n] = fr;
            } else {
                auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
                double fc = eval(xc);
                if (fc < std::min(fr, fv[n])) { x[n] = xc; fv[n] = fc; }
                else {
                    for (int i = 1; i <= n; ++i) {
                        for (int d = 0; d < 4; ++d) x[i][d] = x[0][d] + 0.5 * (x[i][d] - x[0][d]);
                        fv[i] = eval(x[i]);
                    }
                }
            }
            order();
        }
        iters_out = it;
        return {x[0], fv[0]};
    }
};

double grad_norm_fd(const std::function<double(const std::array<double, 4>&)>& f,
                    const std::array<double, 4>& x) {
    double f0 = f(x);
    double g2 = 0.0;
    for (int d = 0; d < 4; ++d) {
        auto xp = x;
        double h = 1e-6 * (1.0 + std::abs(x[d]));
        xp[d] += h;
        double g = (f(xp) - f0) / h;
        g2 += g * g;
    }
    return std::sqrt(g2);
}

} // namespace

DarkSubtracted dark_subtract(const CountRecord& rec) {
    rec.validate();
    double p_meas = static_cast<double>(rec.clicks) / static_cast<double>(rec.shots);
    double p_dark = static_cast<double>(rec.dark_reference_clicks) / static_cast<double>(rec.shots);
    if (p_dark >= 1.0)
        throw InvalidInput("dark_subtract: dark reference saturated");
    double corrected = (p_meas - p_dark) / (1.0 - p_dark);
    if (corrected < 0.0) return {0.0, true};
    return {corrected, false};
}

StateLabel setting_transmitted_state(const MeasurementSetting& s) {
    Eigen::RowVector2cd row = port_row(s);
    for (StateLabel x : kAllStates) {
        double overlap = std::norm((row * canonical_state(x).vec())(0, 0));
        if (overlap > 1.0 - 1e-9) return x;
    }
    throw InvalidInput("setting_transmitted_state: analyzer matches no canonical projector");
}

std::array<double, 6> rates_from_records(std::span<const CountRecord> records,
                                         bool dark_subtracted) {
    std::array<double, 6> rates{};
    std::array<bool, 6> seen{};
    for (const CountRecord& rec : records) {
        rec.validate();
        StateLabel x = setting_transmitted_state(rec.setting);
        auto i = static_cast<size_t>(x);
        if (seen[i])
            throw InvalidInput("rates_from_records: duplicate projector " + to_string(x));
        seen[i] = true;
        rates[i] = dark_subtracted
                       ? dark_subtract(rec).rate
                       : static_cast<double>(rec.clicks) / static_cast<double>(rec.shots);
    }
    for (StateLabel x : kAllStates)
        if (!seen[static_cast<size_t>(x)])
            throw InvalidInput("rates_from_records: projector " + to_string(x) +
                               " missing from record set");
    return rates;
}

DensityMatrix2 linear_inversion(const std::array<double, 6>& rates) {
    for (double r : rates)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw InvalidInput("linear_inversion: rates must be finite and >= 0");
    double sums[3] = {rates[2] + rates[3], rates[4] + rates[5], rates[0] + rates[1]};
    const char* pair_name[3] = {"D/A", "R/L", "H/V"};
    for (int i = 0; i < 3; ++i)
        if (!(sums[i] > 0.0))
            throw InvalidInput(std::string("linear_inversion: ") + pair_name[i] +
                               " rates sum to zero");
    double s1 = (rates[2] - rates[3]) / sums[0];
    double s2 = (rates[4] - rates[5]) / sums[1];
    double s3 = (rates[0] - rates[1]) / sums[2];
    DensityMatrix2 rho;
    rho.m << 0.5 * (1.0 + s3), 0.5 * complexd(s1, -s2),
             0.5 * complexd(s1, s2), 0.5 * (1.0 - s3);
    return rho;
}

DensityMatrix2 psd_project(const DensityMatrix2& rho) {
    auto ev = rho.eigenvalues();
    if (ev[0] >= 0.0) {
        DensityMatrix2 out = rho;
        out.m /= rho.m.trace().real();
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(rho.m);
    Eigen::Vector2d vals = es.eigenvalues().cwiseMax(0.0);
    double tr = vals.sum();
    if (!(tr > 0.0))
        throw NumericalError("psd_project: matrix has no positive part");
    DensityMatrix2 out;
    out.m = es.eigenvectors() * (vals / tr).asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

MleResult max_likelihood(const std::array<double, 6>& counts) {
    double total = 0.0;
    for (double k : counts) {
        if (!(k >= 0.0) || !std::isfinite(k))
            throw InvalidInput("max_likelihood: counts must be finite and >= 0");
        total += k;
    }
    if (!(total > 0.0))
        throw InvalidInput("max_likelihood: all counts are zero");

    // Start from linear inversion on pair-conditional rates, pulled inside
    // the Bloch ball if necessary, then PSD-projected.
    std::array<double, 6> rates = counts;
    DensityMatrix2 start_rho;
    try {
        DensityMatrix2 li = linear_inversion(rates);
        auto s = li.bloch();
        double len = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
        if (len > 0.999) {
            double f = 0.999 / len;
            li = DensityMatrix2::from_bloch(s[0] * f, s[1] * f, s[2] * f);
        }
        start_rho = psd_project(li);
    } catch (const InvalidInput&) {
        start_rho = DensityMatrix2::maximally_mixed();
    }

    auto nll = [&counts](const std::array<double, 4>& t) { return negative_loglik(counts, t); };
    NelderMead nm;
    nm.f = nll;

    std::array<double, 4> x = params_from_rho(start_rho);
    double fx = 0.0;
    int total_iters = 0;
    bool converged = false;
    // Two rounds: a fresh restart around the first optimum guards against
    // simplex collapse on a likelihood ridge.
    double step = 0.05;
    for (int round = 0; round < 2; ++round) {
        int iters = 0;
        bool ok = false;
        auto [xb, fb] = nm.minimize(x, step, 1e-10, 2000, iters, ok);
        x = xb;
        fx = fb;
        total_iters += iters;
        converged = ok;
        step = 0.01;
    }

    MleResult res;
    res.rho = rho_from_params(x);
    res.loglik = -fx;
    res.iterations = total_iters;
    res.converged = converged;
    res.grad_norm = grad_norm_fd(nll, x);
    if (!converged) {
        std::ostringstream os;
        os << "max_likelihood: optimizer stalled after " << total_iters
           << " iterations (gradient norm " << res.grad_norm << ", loglik " << res.loglik << ")";
        throw MleFailure(os.str(), res);
    }
    return res;
}

FidelityEstimate fidelity_with_error(std::span<const CountRecord> records,
                                     const PureQubit& target, int resamples,
                                     uint64_t seed, double sigma_tech,
                                     bool dark_subtracted) {
    if (resamples < 10)
        throw InvalidInput("fidelity_with_error: need at least 10 resamples");
    if (sigma_tech < 0.0)
        throw InvalidInput("fidelity_with_error: sigma_tech must be >= 0");

    // Point estimate from the recorded counts. The pair-conditional
    // likelihood assumes equal acquisition length per projector.
    std::array<double, 6> rates = rates_from_records(records, dark_subtracted);
    long long shots = records.front().shots;
    for (const CountRecord& rec : records)
        if (rec.shots != shots)
            throw InvalidInput("fidelity_with_error: records must share a shot count");
    std::array<double, 6> counts;
    for (int i = 0; i < 6; ++i) counts[i] = rates[i] * static_cast<double>(shots);
    double point = fidelity(target, max_likelihood(counts).rho);

    // Parametric bootstrap over click statistics, dark statistics and a
    // multiplicative technical-drift factor.
    std::vector<double> fids;
    fids.reserve(resamples);
    int failed = 0;
    for (int r = 0; r < resamples; ++r) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(r));
        std::array<double, 6> resampled{};
        for (const CountRecord& rec : records) {
            auto i = static_cast<size_t>(setting_transmitted_state(rec.setting));
            double p_sig = static_cast<double>(rec.clicks) / static_cast<double>(rec.shots);
            double drift = 1.0 + sigma_tech * rng.normal();
            double p = std::min(1.0, std::max(0.0, p_sig * drift));
            double k = static_cast<double>(rng.binomial(static_cast<uint64_t>(rec.shots), p));
            if (dark_subtracted) {
                double p_dark = static_cast<double>(rec.dark_reference_clicks) /
                                static_cast<double>(rec.shots);
                double d = static_cast<double>(
                               rng.binomial(static_cast<uint64_t>(rec.shots), p_dark)) /
                           static_cast<double>(rec.shots);
                double corrected = d < 1.0 ? (k / static_cast<double>(rec.shots) - d) / (1.0 - d)
                                           : 0.0;
                k = std::max(0.0, corrected) * static_cast<double>(rec.shots);
            }
            resampled[i] = k;
        }
        try {
            fids.push_back(fidelity(target, max_likelihood(resampled).rho));
        } catch (const MleFailure&) {
            ++failed;
        }
    }
    if (failed * 20 > resamples) {
        std::ostringstream os;
        os << "fidelity_with_error: " << failed << " of " << resamples
           << " bootstrap resamples failed to converge";
        throw NumericalError(os.str());
    }
    double mean = 0.0;
    for (double f : fids) mean += f;
    mean /= static_cast<double>(fids.size());
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    var /= std::max<size_t>(1, fids.size() - 1);
    return {point, std::sqrt(var), failed};
}

double FringeFit::value_at(double angle_rad) const {
    return 0.5 * amplitude * (1.0 + visibility * std::cos(4.0 * angle_rad - phase_rad));
}

namespace {
FringeFit fit_fringe_core(std::span<const double> angles_rad, std::span<const double> rates) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < angles_rad.size(); ++i) {
        Eigen::Vector3d row(1.0, std::cos(4.0 * angles_rad[i]), std::sin(4.0 * angles_rad[i]));
        ata += row * row.transpose();
        atb += row * rates[i];
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
    if (!lu.isInvertible())
        throw InvalidInput("fit_fringe: angle set is degenerate for a 4-theta fringe");
    Eigen::Vector3d c = lu.solve(atb);
    if (!(c[0] > 0.0))
        throw NumericalError("fit_fringe: fitted mean level is not positive");
    FringeFit fit;
    fit.amplitude = 2.0 * c[0];
    fit.visibility = std::sqrt(c[1] * c[1] + c[2] * c[2]) / c[0];
    fit.phase_rad = std::atan2(c[2], c[1]);
    fit.visibility_err = 0.0;
    return fit;
}
} // namespace

FringeFit fit_fringe(std::span<const double> angles_rad, std::span<const double> rates,
                     long long shots_per_point, int bootstrap_resamples, uint64_t seed) {
    if (angles_rad.size() != rates.size())
        throw InvalidInput("fit_fringe: angle and rate arrays differ in length");
    std::vector<double> sorted(angles_rad.begin(), angles_rad.end());
    std::sort(sorted.begin(), sorted.end());
    size_t distinct = 1;
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] - sorted[i - 1] > 1e-12) ++distinct;
    if (distinct < 8)
        throw InvalidInput("fit_fringe: need at least 8 distinct analyzer angles");
    if (sorted.back() - sorted.front() < kPi / 4.0 - 1e-12)
        throw InvalidInput("fit_fringe: angle span must cover at least pi/4");
    for (double r : rates)
        if (!(r >= 0.0) || r > 1.0 || !std::isfinite(r))
            throw InvalidInput("fit_fringe: rates must lie in [0, 1]");

    FringeFit fit = fit_fringe_core(angles_rad, rates);
    if (shots_per_point > 0 && bootstrap_resamples > 1) {
        std::vector<double> vis;
        vis.reserve(bootstrap_resamples);
        std::vector<double> resampled(rates.size());
        for (int b = 0; b < bootstrap_resamples; ++b) {
            Rng rng = Rng::substream(seed, static_cast<uint64_t>(b));
            for (size_t i = 0; i < rates.size(); ++i)
                resampled[i] =
                    static_cast<double>(rng.binomial(static_cast<uint64_t>(shots_per_point),
                                                     rates[i])) /
                    static_cast<double>(shots_per_point);
            vis.push_back(fit_fringe_core(angles_rad, resampled).visibility);
        }
        double mean = 0.0;
        for (double v : vis) mean += v;
        mean /= static_cast<double>(vis.size());
        double var = 0.0;
        for (double v : vis) var += (v - mean) * (v - mean);
        var /= std::max<size_t>(1, vis.size() - 1);
        fit.visibility_err = std::sqrt(var);
    }
    return fit;
}

} // namespace qmem
