#include "satsw/hybridsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "satsw/errors.hpp"

namespace satsw::hybridsim {

namespace {

Vector clamp(const Vector& u, const Vector& u_bar) {
    Vector s = u;
    for (int i = 0; i < u.size(); ++i) s(i) = std::clamp(u(i), -u_bar(i), u_bar(i));
    return s;
}

}  // namespace

std::pair<Vector, Vector> solveInputLoop(const Vector& a, const Matrix& d00,
                                         const Vector& u_bar) {
    const int nu = static_cast<int>(a.size());
    if (d00.rows() != nu || d00.cols() != nu || u_bar.size() != nu)
        throw DimensionMismatch("solveInputLoop: shape mismatch");
    Matrix wellposed = linalg::he(d00 - Matrix::Identity(nu, nu));
    if (!(linalg::symEigBounds(wellposed).second < 0.0))
        throw IllPosedLoop("solveInputLoop: He{D00 - I} not negative definite");

    Vector u;
    if (nu == 1) {
        double av = a(0), d = d00(0, 0), ub = u_bar(0);
        u = Vector::Constant(1, std::abs(av) <= ub
                                    ? av
                                    : (av - d * ub * (av > 0 ? 1.0 : -1.0)) / (1.0 - d));
    } else {
        u = a;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            Vector next = a + d00 * (u - clamp(u, u_bar));
            Vector step = 0.5 * (next - u);
            u += step;
            if (step.norm() <= 1e-10 * (1.0 + u.norm())) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NoConvergence("solveInputLoop: fixed point did not converge");
    }
    Vector dz = u - clamp(u, u_bar);
    if ((u - a - d00 * dz).norm() > 1e-9 * (1.0 + a.norm()))
        throw NoConvergence("solveInputLoop: residual too large");
    return {u, dz};
}

SimulationTrace simulate(const SwitchedPlant& plant, const synth::HybridController& ctrl,
                         const SwitchingSignal& signal, const Disturbance& dist,
                         const Vector& x0, double t_final, const SimulateOptions& opts) {
    plant.checkDimensions();
    ctrl.checkDimensions(plant);
    signal.check(plant.numModes());
    if (!(opts.h > 0.0)) throw InvalidTimes("simulate: step must be positive");
    if (!(t_final > 0.0)) throw InvalidTimes("simulate: t_final must be positive");
    const int n = plant.n();
    if (x0.size() != 2 * n) throw DimensionMismatch("simulate: x0 must have length 2n");

    SimulationTrace trace;
    trace.h = opts.h;
    trace.lambda_weight = opts.lambda_weight.value_or(ctrl.lambda0);
    const double lam = trace.lambda_weight;

    // segment boundaries clipped to [0, t_final]
    std::vector<std::pair<double, int>> segs;
    for (const auto& [t0, mode] : signal.segments)
        if (t0 < t_final) segs.emplace_back(t0, mode);
    std::vector<double> ends;
    for (std::size_t i = 1; i < segs.size(); ++i) ends.push_back(segs[i].first);
    ends.push_back(t_final);

    std::vector<synth::ClosedLoopMode> cl;
    for (int i = 0; i < plant.numModes(); ++i)
        cl.push_back(synth::assembleClosedLoop(plant.modes[i], ctrl.modes[i]));

    Vector x = x0;
    double prevWW = 0.0, prevZZ = 0.0;
    bool first = true;
    long nodeIndex = 0;

    auto evalOutputs = [&](double t, const Vector& xc, int mi, TraceStep* rec) {
        const auto& c = cl[mi];
        Vector w = dist.isZero() ? Vector::Zero(plant.nw()) : dist.at(t);
        Vector a = c.C_cl0 * xc + c.D_cl02 * w;
        auto [u, dz] = solveInputLoop(a, c.D_cl00, plant.u_bar);
        Vector z = c.C_cl2 * xc + c.D_cl20 * dz + c.D_cl22 * w;
        if (rec) {
            rec->t = t;
            rec->mode = mi + 1;
            rec->x_p = xc.head(n);
            rec->x_k = xc.tail(n);
            rec->u = u;
            rec->sat_u = u - dz;
            rec->dz_u = dz;
            rec->w = w;
            rec->z = z;
            const auto& cm = ctrl.modes[mi];
            if (cm.H1.size() > 0) {
                Vector hx = cm.H1 * rec->x_p + cm.H2 * rec->x_k;
                rec->in_region_h = true;
                for (int ch = 0; ch < hx.size(); ++ch)
                    if (std::abs(hx(ch)) > plant.u_bar(ch)) rec->in_region_h = false;
            }
            if (cm.P.size() > 0)
                rec->in_ellipsoid = xc.dot(cm.P * xc) <= ctrl.s * ctrl.s + 1e-12;
        }
        return std::make_tuple(w, dz, z);
    };

    auto deriv = [&](double t, const Vector& xc, int mi) {
        const auto& c = cl[mi];
        auto [w, dz, z] = evalOutputs(t, xc, mi, nullptr);
        (void)z;
        return Vector(c.A_cl * xc + c.B_cl0 * dz + c.B_cl2 * w);
    };

    double prevT = 0.0;
    auto accumulate = [&](double t, const Vector& w, const Vector& z) {
        double ww = w.squaredNorm();
        double zz = std::exp(-lam * t) * z.squaredNorm();
        if (!first) {
            double dt = t - prevT;
            trace.disturbance_energy += 0.5 * (prevWW + ww) * dt;
            trace.weighted_output_energy += 0.5 * (prevZZ + zz) * dt;
        }
        prevT = t;
        prevWW = ww;
        prevZZ = zz;
        first = false;
    };

    auto recordNode = [&](double t, int mi) {
        TraceStep rec;
        auto [w, dz, z] = evalOutputs(t, x, mi, &rec);
        (void)dz;
        accumulate(t, w, z);
        if (!x.allFinite()) throw NonFiniteState("simulate: state diverged", t);
        if (nodeIndex % opts.record_stride == 0) trace.steps.push_back(std::move(rec));
        ++nodeIndex;
    };

    for (std::size_t si = 0; si < segs.size(); ++si) {
        const double t0 = segs[si].first;
        const double t1 = ends[si];
        const int mi = segs[si].second - 1;

        if (si > 0) {
            // controller reset i -> j applied between steps
            const Matrix& d = ctrl.reset(segs[si - 1].second, segs[si].second);
            SwitchEvent ev;
            ev.t = t0;
            ev.from = segs[si - 1].second;
            ev.to = segs[si].second;
            ev.xk_before = x.tail(n);
            x.tail(n) = d * ev.xk_before;
            ev.xk_after = x.tail(n);
            trace.events.push_back(std::move(ev));
        }
        recordNode(t0, mi);

        long nsteps = std::max<long>(1, std::lround(std::ceil((t1 - t0) / opts.h - 1e-9)));
        double hseg = (t1 - t0) / nsteps;
        for (long k = 0; k < nsteps; ++k) {
            double t = t0 + k * hseg;
            Vector k1 = deriv(t, x, mi);
            Vector k2 = deriv(t + 0.5 * hseg, x + 0.5 * hseg * k1, mi);
            Vector k3 = deriv(t + 0.5 * hseg, x + 0.5 * hseg * k2, mi);
            Vector k4 = deriv(t + hseg, x + hseg * k3, mi);
            x += (hseg / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!x.allFinite()) throw NonFiniteState("simulate: state diverged", t + hseg);
            if (k + 1 < nsteps) recordNode(t + (k + 1) * hseg, mi);
        }
        if (si + 1 == segs.size()) recordNode(t1, mi);
        // at interior boundaries the node is recorded after the reset, above
    }
    return trace;
}

double weightedL2Ratio(const SimulationTrace& trace, double lambda) {
    if (trace.steps.size() < 2) throw ZeroDisturbance("weightedL2Ratio: empty trace");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        const auto& a = trace.steps[i - 1];
        const auto& b = trace.steps[i];
        double dt = b.t - a.t;
        num += 0.5 * dt * (std::exp(-lambda * a.t) * a.z.squaredNorm() +
                           std::exp(-lambda * b.t) * b.z.squaredNorm());
        den += 0.5 * dt * (a.w.squaredNorm() + b.w.squaredNorm());
    }
    if (!(den > 0.0)) throw ZeroDisturbance("weightedL2Ratio: zero disturbance energy");
    return std::sqrt(num / den);
}

std::string AdtReport::summary() const {
    std::ostringstream os;
    os << "switches: " << count << ", average dwell time: ";
    if (count == 0)
        os << "inf";
    else
        os << average;
    if (tau_a) {
        os << ", N0*(" << *tau_a << ") = ";
        if (chatter_bound)
            os << *chatter_bound;
        else
            os << "n/a";
    }
    return os.str();
}

AdtReport adtStats(const SwitchingSignal& signal, std::optional<double> tau_a) {
    AdtReport rep;
    auto switches = signal.switchTimes();
    switches.erase(std::remove_if(switches.begin(), switches.end(),
                                  [&](double t) { return t >= signal.horizon; }),
                   switches.end());
    rep.count = static_cast<int>(switches.size());
    rep.average = rep.count == 0 ? std::numeric_limits<double>::infinity()
                                 : signal.horizon / rep.count;
    rep.tau_a = tau_a;
    if (tau_a) {
        if (!(*tau_a > 0.0)) throw DomainError("adtStats: tau_a must be positive");
        std::vector<double> pts = {0.0, signal.horizon};
        pts.insert(pts.end(), switches.begin(), switches.end());
        std::sort(pts.begin(), pts.end());
        double best = 0.0;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a; b < pts.size(); ++b) {
                double lo = pts[a], hi = pts[b];
                // closed-window switch count (supremum over endpoint choices)
                int cnt = 0;
                for (double st : switches)
                    if (st >= lo && st <= hi) ++cnt;
                best = std::max(best, cnt - (hi - lo) / *tau_a);
            }
        rep.chatter_bound = best;
        rep.compliant = std::isfinite(best);
    }
    return rep;
}

SwitchingSignal cyclicSignal(double t_pre, int mode_pre, double period, int first_mode,
                             int second_mode, double t_tail_start, int tail_mode,
                             double t_final) {
    if (!(0.0 < t_pre && t_pre < t_tail_start && t_tail_start < t_final))
        throw InvalidTimes("cyclicSignal: need 0 < t_pre < t_tail_start < t_final");
    if (!(period > 0.0)) throw InvalidTimes("cyclicSignal: period must be positive");

    std::vector<std::pair<double, int>> raw;
    raw.emplace_back(0.0, mode_pre);
    double t = t_pre;
    int idx = 0;
    while (t < t_tail_start) {
        raw.emplace_back(t, idx % 2 == 0 ? first_mode : second_mode);
        ++idx;
        t += period;
    }
    raw.emplace_back(t_tail_start, tail_mode);

    SwitchingSignal sig;
    sig.horizon = t_final;
    for (const auto& seg : raw) {
        if (!sig.segments.empty() && sig.segments.back().second == seg.second)
            continue;  // merge equal neighbours
        sig.segments.push_back(seg);
    }
    return sig;
}

}  // namespace satsw::hybridsim
