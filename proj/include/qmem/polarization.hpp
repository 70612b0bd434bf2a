#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace qmem {

using complexd = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

/// The six canonical polarization states: H/V linear basis, D/A diagonal
/// superpositions, R/L circular.
enum class StateLabel { H, V, D, A, R, L };

constexpr std::array<StateLabel, 6> kAllStates = {StateLabel::H, StateLabel::V, StateLabel::D,
                                                  StateLabel::A, StateLabel::R, StateLabel::L};

std::string to_string(StateLabel s);
StateLabel parse_state_label(const std::string& name);

/// Normalized Jones vector (a_h, a_v).
struct PureQubit {
    complexd a_h;
    complexd a_v;

    /// Normalizes; rejects a near-zero vector.
    PureQubit(complexd h, complexd v);

    double norm() const;

    /// True when the two states coincide up to a global phase:
    /// |<this|other>| = 1 within tol.
    bool equal_up_to_phase(const PureQubit& other, double tol = 1e-10) const;

    Eigen::Vector2cd vec() const { return Eigen::Vector2cd(a_h, a_v); }
};

PureQubit canonical_state(StateLabel s);

/// 2x2 density matrix. Construction paths keep it Hermitian; validate()
/// additionally enforces unit trace and positivity.
struct DensityMatrix2 {
    Matrix2c m;

    static DensityMatrix2 from_pure(const PureQubit& q);
    static DensityMatrix2 maximally_mixed();
    /// Bloch-vector construction rho = (I + s . sigma)/2; |s| <= 1 required.
    static DensityMatrix2 from_bloch(double s1, double s2, double s3);

    /// Eigenvalues of the Hermitian part, ascending (closed form).
    std::array<double, 2> eigenvalues() const;

    /// Hermitian, unit trace, PSD within tol.
    bool is_physical(double tol = 1e-9) const;
    /// Throws InvalidInput with a diagnostic naming the violated property.
    void validate(double tol = 1e-9) const;

    /// Bloch components (tr(rho sigma_i)); meaningful for Hermitian m.
    std::array<double, 3> bloch() const;
};

enum class WaveplateKind { half_wave, quarter_wave };

/// One retarder: kind fixes the retardance (pi or pi/2), angle_rad is the
/// fast-axis angle w.r.t. horizontal, normalized to [0, pi).
struct WaveplateSetting {
    WaveplateKind kind;
    double angle_rad;

    WaveplateSetting(WaveplateKind k, double angle);
    double retardance() const;
};

enum class Port { transmitted, reflected };

/// Analyzer: up to two waveplates followed by a polarizing beam splitter.
/// Light traverses plates in vector order; transmitted = H output port,
/// reflected = V output port.
struct MeasurementSetting {
    std::vector<WaveplateSetting> plates;
    Port port = Port::transmitted;

    MeasurementSetting() = default;
    MeasurementSetting(std::vector<WaveplateSetting> p, Port out);
};

/// Jones matrix R(theta) diag(1, e^{i Gamma}) R(-theta); unitary by
/// construction (checked to 1e-12).
Matrix2c jones_matrix(const WaveplateSetting& w);

/// Product of the plate matrices in traversal order.
Matrix2c analyzer_unitary(const MeasurementSetting& s);

/// Row vector <port| U: amplitude reaching the selected PBS output for a
/// unit input in H resp. V.
Eigen::RowVector2cd port_row(const MeasurementSetting& s);

/// Born probability of a click in the selected port: <port|U rho U^dag|port>.
/// Validates rho and clamps the tiny negative excursions of exact zeros.
double projection_probability(const DensityMatrix2& rho, const MeasurementSetting& s);
double projection_probability(const PureQubit& q, const MeasurementSetting& s);

/// Fidelity <psi|rho|psi> of a state against a pure target.
double fidelity(const PureQubit& target, const DensityMatrix2& rho);

/// Trace distance (1/2) ||a - b||_1 via the closed-form 2x2 eigenvalues.
double trace_distance(const DensityMatrix2& a, const DensityMatrix2& b);

/// The analyzer that transmits the canonical state s. Angles in degrees,
/// QWP first: H:(0,0), V:(0,45), D:(45,22.5), A:(45,67.5), R:(45,0), L:(45,45).
MeasurementSetting canonical_setting(StateLabel s);

} // namespace qmem
