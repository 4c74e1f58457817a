#include "satsw/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "satsw/errors.hpp"

namespace satsw {

namespace {

void requireShape(const Matrix& m, int rows, int cols, const std::string& name, int mode) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "mode " << mode << ": " << name << " is " << m.rows() << "x" << m.cols()
           << ", expected " << rows << "x" << cols;
        throw DimensionMismatch(os.str());
    }
}

/// rank of [lambda*I - A, B] via singular values, complex lambda handled
/// by stacking real and imaginary parts.
int pbhRank(const Eigen::MatrixXcd& pencil, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++r;
    return r;
}

}  // namespace

double SwitchedPlant::maxEntry() const {
    double m = 0.0;
    for (const auto& pm : modes) {
        for (const Matrix* mat : {&pm.A_p, &pm.B_p1, &pm.B_p2, &pm.C_p1, &pm.D_p11,
                                  &pm.D_p12, &pm.C_p2, &pm.D_p21, &pm.D_p22})
            if (mat->size() > 0) m = std::max(m, mat->cwiseAbs().maxCoeff());
    }
    return m;
}

void SwitchedPlant::checkDimensions() const {
    if (modes.empty()) throw DimensionMismatch("plant has no modes");
    const int nn = n(), nuu = nu(), nww = nw(), nzz = nz(), nyy = ny();
    for (int i = 0; i < numModes(); ++i) {
        const auto& m = modes[i];
        const int k = i + 1;
        requireShape(m.A_p, nn, nn, "A_p", k);
        requireShape(m.B_p1, nn, nww, "B_p1", k);
        requireShape(m.B_p2, nn, nuu, "B_p2", k);
        requireShape(m.C_p1, nzz, nn, "C_p1", k);
        requireShape(m.D_p11, nzz, nww, "D_p11", k);
        requireShape(m.D_p12, nzz, nuu, "D_p12", k);
        requireShape(m.C_p2, nyy, nn, "C_p2", k);
        requireShape(m.D_p21, nyy, nww, "D_p21", k);
        requireShape(m.D_p22, nyy, nuu, "D_p22", k);
    }
    if (u_bar.size() != nuu)
        throw DimensionMismatch("u_bar has " + std::to_string(u_bar.size()) +
                                " entries, expected " + std::to_string(nuu));
    for (int j = 0; j < u_bar.size(); ++j)
        if (!(u_bar(j) > 0.0))
            throw DimensionMismatch("u_bar(" + std::to_string(j + 1) + ") must be positive");
}

double SynthesisSpec::effectiveEpsilon(const SwitchedPlant& plant) const {
    if (epsilon > 0.0) return epsilon;
    return 1e-6 * (1.0 + plant.maxEntry());
}

void SynthesisSpec::check() const {
    if (!(lambda0 > 0.0)) throw DomainError("lambda0 must be positive");
    if (!(mu > 1.0)) throw DomainError("mu must exceed 1");
    if (!(s > 0.0)) throw DomainError("s must be positive");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (epsilon > 0.0 && !(epsilon > delta))
        throw DomainError("epsilon must exceed delta");
    if (gamma_mode == GammaMode::Fixed && !(gamma_fixed > 0.0))
        throw DomainError("fixed gamma must be positive");
    if (kappa && !(*kappa > 0.0)) throw DomainError("kappa must be positive");
}

void SwitchingSignal::check(int numModes) const {
    if (segments.empty()) throw InvalidTimes("signal has no segments");
    if (segments.front().first != 0.0)
        throw InvalidTimes("first segment must start at t = 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& [t, mode] = segments[i];
        if (mode < 1 || mode > numModes)
            throw InvalidTimes("segment mode " + std::to_string(mode) + " out of range");
        if (i > 0) {
            if (!(t > segments[i - 1].first))
                throw InvalidTimes("segment start times must be strictly increasing");
            if (mode == segments[i - 1].second)
                throw InvalidTimes("consecutive segments must switch modes");
        }
    }
    if (!(horizon > segments.back().first))
        throw InvalidTimes("horizon must exceed the last segment start");
}

int SwitchingSignal::modeAt(double t) const {
    int mode = segments.front().second;
    for (const auto& [start, m] : segments) {
        if (start <= t)
            mode = m;
        else
            break;
    }
    return mode;
}

std::vector<double> SwitchingSignal::switchTimes() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < segments.size(); ++i) out.push_back(segments[i].first);
    return out;
}

Disturbance Disturbance::zero(int nw) {
    Disturbance d;
    d.dimension = nw;
    return d;
}

Disturbance Disturbance::pulse(double magnitude, double tOn, double tOff) {
    if (!(tOn < tOff)) throw InvalidTimes("pulse requires t_on < t_off");
    Disturbance d;
    d.kind = PulseDisturbance{magnitude, tOn, tOff};
    d.dimension = 1;
    return d;
}

Disturbance Disturbance::samples(std::vector<double> times, std::vector<Vector> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw InvalidTimes("sampled disturbance needs matching times/values, at least 2");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw InvalidTimes("sample times must be strictly increasing");
    Disturbance d;
    d.dimension = static_cast<int>(values.front().size());
    d.kind = SampledDisturbance{std::move(times), std::move(values)};
    return d;
}

Vector Disturbance::at(double t) const {
    if (std::holds_alternative<std::monostate>(kind)) return Vector::Zero(dimension);
    if (const auto* p = std::get_if<PulseDisturbance>(&kind)) {
        Vector v = Vector::Zero(dimension);
        if (t >= p->t_on && t < p->t_off) v.setConstant(p->magnitude);
        return v;
    }
    const auto& sd = std::get<SampledDisturbance>(kind);
    if (t <= sd.times.front()) return sd.values.front();
    if (t >= sd.times.back()) return sd.values.back();
    auto it = std::upper_bound(sd.times.begin(), sd.times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - sd.times.begin());
    std::size_t lo = hi - 1;
    double a = (t - sd.times[lo]) / (sd.times[hi] - sd.times[lo]);
    return (1.0 - a) * sd.values[lo] + a * sd.values[hi];
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& m : modes) {
        os << "mode " << m.mode_index << ": stabilizable=" << (m.stabilizable ? "yes" : "NO")
           << " detectable=" << (m.detectable ? "yes" : "NO")
           << " D_p22=0: " << (m.feedthrough_zero ? "yes" : "NO") << "\n";
    }
    os << (pass ? "PASS" : "FAIL");
    return os.str();
}

ValidationReport validatePlant(const SwitchedPlant& plant) {
    plant.checkDimensions();
    ValidationReport report;
    const int n = plant.n();
    for (int i = 0; i < plant.numModes(); ++i) {
        const auto& pm = plant.modes[i];
        ModeValidation mv;
        mv.mode_index = i + 1;
        mv.feedthrough_zero = pm.D_p22.isZero(0.0);
        if (!mv.feedthrough_zero)
            throw AssumptionViolated(
                "mode " + std::to_string(i + 1) + ": D_p22 must be zero (A2)", '2', i + 1);

        const double tol = 1e-9 * std::max(1.0, pm.A_p.norm());
        Eigen::EigenSolver<Matrix> es(pm.A_p);
        mv.stabilizable = true;
        mv.detectable = true;
        for (int k = 0; k < n; ++k) {
            std::complex<double> lam = es.eigenvalues()(k);
            if (lam.real() < 0.0) continue;
            mv.unstable_eigenvalues.push_back(lam.real());
            Eigen::MatrixXcd pencilB(n, n + pm.B_p2.cols());
            pencilB << lam * Eigen::MatrixXcd::Identity(n, n) - pm.A_p.cast<std::complex<double>>(),
                pm.B_p2.cast<std::complex<double>>();
            if (pbhRank(pencilB, tol) < n) mv.stabilizable = false;
            Eigen::MatrixXcd pencilC(n, n + pm.C_p2.rows());
            pencilC << lam * Eigen::MatrixXcd::Identity(n, n) -
                           pm.A_p.transpose().cast<std::complex<double>>(),
                pm.C_p2.transpose().cast<std::complex<double>>();
            if (pbhRank(pencilC, tol) < n) mv.detectable = false;
        }
        report.modes.push_back(std::move(mv));
    }
    report.pass = std::all_of(report.modes.begin(), report.modes.end(), [](const auto& m) {
        return m.stabilizable && m.detectable && m.feedthrough_zero;
    });
    return report;
}

double disturbanceEnergy(const Disturbance& d) {
    if (std::holds_alternative<std::monostate>(d.kind)) return 0.0;
    if (const auto* p = std::get_if<PulseDisturbance>(&d.kind))
        return p->magnitude * p->magnitude * (p->t_off - p->t_on) * d.dimension;
    const auto& sd = std::get<SampledDisturbance>(d.kind);
    double e = 0.0;
    for (std::size_t i = 1; i < sd.times.size(); ++i) {
        double f0 = sd.values[i - 1].squaredNorm();
        double f1 = sd.values[i].squaredNorm();
        e += 0.5 * (f0 + f1) * (sd.times[i] - sd.times[i - 1]);
    }
    return e;
}

}  // namespace satsw
