#include "qmem/polarization.hpp"

#include <cmath>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {
constexpr double kPi = 3.14159265358979323846;
const complexd kI{0.0, 1.0};

double wrap_angle(double a) {
    double r = std::fmod(a, kPi);
    if (r < 0.0) r += kPi;
    return r;
}
} // namespace

std::string to_string(StateLabel s) {
    switch (s) {
        case StateLabel::H: return "H";
        case StateLabel::V: return "V";
        case StateLabel::D: return "D";
        case StateLabel::A: return "A";
        case StateLabel::R: return "R";
        case StateLabel::L: return "L";
    }
    throw InvalidInput("to_string: bad StateLabel");
}

StateLabel parse_state_label(const std::string& name) {
    if (name.size() == 1) {
        switch (name[0]) {
            case 'H': return StateLabel::H;
            case 'V': return StateLabel::V;
            case 'D': return StateLabel::D;
            case 'A': return StateLabel::A;
            case 'R': return StateLabel::R;
            case 'L': return StateLabel::L;
            default: break;
        }
    }
    throw InvalidInput("parse_state_label: unknown state '" + name + "'");
}

PureQubit::PureQubit(complexd h, complexd v) : a_h(h), a_v(v) {
    double n = std::sqrt(std::norm(a_h) + std::norm(a_v));
    if (!(n > 1e-12) || !std::isfinite(n))
        throw InvalidInput("PureQubit: amplitude vector has (near-)zero norm");
    a_h /= n;
    a_v /= n;
}

double PureQubit::norm() const {
    return std::sqrt(std::norm(a_h) + std::norm(a_v));
}

bool PureQubit::equal_up_to_phase(const PureQubit& other, double tol) const {
    complexd ov = std::conj(a_h) * other.a_h + std::conj(a_v) * other.a_v;
    return std::abs(1.0 - std::abs(ov)) < tol;
}

PureQubit canonical_state(StateLabel s) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (s) {
        case StateLabel::H: return {1.0, 0.0};
        case StateLabel::V: return {0.0, 1.0};
        case StateLabel::D: return {r, r};
        case StateLabel::A: return {r, -r};
        case StateLabel::R: return {r, r * kI};
        case StateLabel::L: return {r, -r * kI};
    }
    throw InvalidInput("canonical_state: bad StateLabel");
}

DensityMatrix2 DensityMatrix2::from_pure(const PureQubit& q) {
    DensityMatrix2 d;
    Eigen::Vector2cd v = q.vec();
    d.m = v * v.adjoint();
    return d;
}

DensityMatrix2 DensityMatrix2::maximally_mixed() {
    DensityMatrix2 d;
    d.m = 0.5 * Matrix2c::Identity();
    return d;
}

DensityMatrix2 DensityMatrix2::from_bloch(double s1, double s2, double s3) {
    double len = std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
    if (len > 1.0 + 1e-12)
        throw InvalidInput("from_bloch: Bloch vector length exceeds 1");
    DensityMatrix2 d;
    d.m << 0.5 * (1.0 + s3), 0.5 * complexd(s1, -s2),
           0.5 * complexd(s1, s2), 0.5 * (1.0 - s3);
    return d;
}

std::array<double, 2> DensityMatrix2::eigenvalues() const {
    // Hermitian 2x2: lambda = tr/2 +- sqrt((tr/2)^2 - det).
    double a = m(0, 0).real();
    double c = m(1, 1).real();
    double half_tr = 0.5 * (a + c);
    double det = a * c - std::norm(m(0, 1));
    double disc = half_tr * half_tr - det;
    double s = disc > 0.0 ? std::sqrt(disc) : 0.0;
    return {half_tr - s, half_tr + s};
}

bool DensityMatrix2::is_physical(double tol) const {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(m.trace().real() - 1.0) > tol) return false;
    if (std::abs(m.trace().imag()) > tol) return false;
    return eigenvalues()[0] > -tol;
}

void DensityMatrix2::validate(double tol) const {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw InvalidInput("DensityMatrix2: not Hermitian");
    complexd tr = m.trace();
    if (std::abs(tr.real() - 1.0) > tol || std::abs(tr.imag()) > tol) {
        std::ostringstream os;
        os << "DensityMatrix2: trace " << tr.real() << " != 1";
        throw InvalidInput(os.str());
    }
    double lo = eigenvalues()[0];
    if (lo < -tol) {
        std::ostringstream os;
        os << "DensityMatrix2: negative eigenvalue " << lo;
        throw InvalidInput(os.str());
    }
}

std::array<double, 3> DensityMatrix2::bloch() const {
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
            (m(0, 0) - m(1, 1)).real()};
}

WaveplateSetting::WaveplateSetting(WaveplateKind k, double angle) : kind(k), angle_rad(wrap_angle(angle)) {
    if (!std::isfinite(angle))
        throw InvalidInput("WaveplateSetting: angle must be finite");
}

double WaveplateSetting::retardance() const {
    return kind == WaveplateKind::half_wave ? kPi : 0.5 * kPi;
}

MeasurementSetting::MeasurementSetting(std::vector<WaveplateSetting> p, Port out)
    : plates(std::move(p)), port(out) {
    if (plates.size() > 2)
        throw InvalidInput("MeasurementSetting: at most two waveplates supported");
}

Matrix2c jones_matrix(const WaveplateSetting& w) {
    double c = std::cos(w.angle_rad);
    double s = std::sin(w.angle_rad);
    complexd e = std::exp(kI * w.retardance());
    Matrix2c rot, ret, out;
    rot << c, -s, s, c;
    ret << 1.0, 0.0, 0.0, e;
    out = rot * ret * rot.transpose();
    if ((out.adjoint() * out - Matrix2c::Identity()).cwiseAbs().maxCoeff() > 1e-12)
        throw NumericalError("jones_matrix: lost unitarity");
    return out;
}

Matrix2c analyzer_unitary(const MeasurementSetting& s) {
    if (s.plates.size() > 2)
        throw InvalidInput("analyzer_unitary: at most two waveplates supported");
    Matrix2c u = Matrix2c::Identity();
    for (const auto& p : s.plates) u = jones_matrix(p) * u;
    return u;
}

Eigen::RowVector2cd port_row(const MeasurementSetting& s) {
    Matrix2c u = analyzer_unitary(s);
    return s.port == Port::transmitted ? u.row(0) : u.row(1);
}

double projection_probability(const DensityMatrix2& rho, const MeasurementSetting& s) {
    rho.validate();
    Eigen::RowVector2cd row = port_row(s);
    double p = (row * rho.m * row.adjoint())(0, 0).real();
    if (p < -1e-9 || p > 1.0 + 1e-9)
        throw NumericalError("projection_probability: probability outside [0, 1]");
    return std::min(1.0, std::max(0.0, p));
}

double projection_probability(const PureQubit& q, const MeasurementSetting& s) {
    Eigen::RowVector2cd row = port_row(s);
    return std::norm((row * q.vec())(0, 0));
}

double fidelity(const PureQubit& target, const DensityMatrix2& rho) {
    rho.validate();
    Eigen::Vector2cd v = target.vec();
    double f = (v.adjoint() * rho.m * v)(0, 0).real();
    return std::min(1.0, std::max(0.0, f));
}

double trace_distance(const DensityMatrix2& a, const DensityMatrix2& b) {
    Matrix2c d = a.m - b.m;
    // Difference of density matrices is traceless Hermitian: eigenvalues +-s.
    double x = 0.5 * (d(0, 0) - d(1, 1)).real();
    double s = std::sqrt(x * x + std::norm(d(0, 1)));
    return s;
}

MeasurementSetting canonical_setting(StateLabel s) {
    auto deg = [](double d) { return d * kPi / 180.0; };
    double qwp = 0.0, hwp = 0.0;
    switch (s) {
        case StateLabel::H: qwp = 0.0;  hwp = 0.0;  break;
        case StateLabel::V: qwp = 0.0;  hwp = 45.0; break;
        case StateLabel::D: qwp = 45.0; hwp = 22.5; break;
        case StateLabel::A: qwp = 45.0; hwp = 67.5; break;
        case StateLabel::R: qwp = 45.0; hwp = 0.0;  break;
        case StateLabel::L: qwp = 45.0; hwp = 45.0; break;
    }
    return MeasurementSetting(
        {WaveplateSetting(WaveplateKind::quarter_wave, deg(qwp)),
         WaveplateSetting(WaveplateKind::half_wave, deg(hwp))},
        Port::transmitted);
}

} // namespace qmem
