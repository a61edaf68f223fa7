#include "qplab/flow.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <fstream>

namespace odeint = boost::numeric::odeint;

namespace qplab::flow {
namespace {

using State = std::vector<double>;
using Stepper = odeint::runge_kutta_dopri5<State>;

double norm_inf(const State& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

struct FieldSystem {
    const FieldFn* field;
    double bound;
    void operator()(const State& x, State& dxdt, double t) const {
        (*field)(x.data(), dxdt.data());
        if (norm_inf(x) > bound) throw BlowUpError(t);
    }
};

}  // namespace

const char* to_string(EqClass c) {
    switch (c) {
        case EqClass::StableNode: return "stable-node";
        case EqClass::UnstableNode: return "unstable-node";
        case EqClass::Saddle: return "saddle";
        case EqClass::StableFocus: return "stable-focus";
        case EqClass::UnstableFocus: return "unstable-focus";
        case EqClass::CenterLike: return "center-like";
        default: return "unclassified";
    }
}

Trajectory integrate_field(const FieldFn& field, int d, const StateVector& x0,
                           double T, double tol, double blowup_bound) {
    if (T <= 0) throw std::invalid_argument("integrate: T must be > 0");
    if (tol <= 0) throw std::invalid_argument("integrate: tol must be > 0");
    FieldSystem sysfn{&field, blowup_bound};
    State x = x0;
    Trajectory traj;
    auto stepper = odeint::make_controlled(tol, tol, Stepper());
    odeint::integrate_adaptive(stepper, sysfn, x, 0.0, T,
                               std::min(1e-3, T / 10),
                               [&](const State& s, double t) {
                                   traj.times.push_back(t);
                                   traj.states.push_back(s);
                               });
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("integrate: dimension mismatch");
    return traj;
}

Trajectory integrate(const SystemSpec& sys, const StateVector& x0, double T,
                     double tol) {
    return integrate_field(sys.drift, sys.d, x0, T, tol, sys.blowup_bound);
}

Trajectory integrate_sampled(const SystemSpec& sys, const StateVector& x0,
                             double T, int nsamples, double tol) {
    if (T <= 0 || nsamples < 1)
        throw std::invalid_argument("integrate_sampled: bad T or sample count");
    FieldSystem sysfn{&sys.drift, sys.blowup_bound};
    State x = x0;
    Trajectory traj;
    auto stepper = odeint::make_dense_output(tol, tol, Stepper());
    const double dt = T / nsamples;
    odeint::integrate_const(stepper, sysfn, x, 0.0, T + dt * 0.5, dt,
                            [&](const State& s, double t) {
                                traj.times.push_back(t);
                                traj.states.push_back(s);
                            });
    while (traj.size() > static_cast<size_t>(nsamples) + 1) {
        traj.times.pop_back();
        traj.states.pop_back();
    }
    return traj;
}

namespace {

Eigen::MatrixXd jacobian(const SystemSpec& sys, const StateVector& x) {
    const int d = sys.d;
    Eigen::MatrixXd J(d, d);
    if (sys.drift_jacobian) {
        std::vector<double> buf(static_cast<size_t>(d) * d);
        sys.drift_jacobian(x.data(), buf.data());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) J(i, j) = buf[i * d + j];
        return J;
    }
    // central differences
    StateVector xp = x, xm = x, bp(d), bm(d);
    for (int j = 0; j < d; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        sys.drift(xp.data(), bp.data());
        sys.drift(xm.data(), bm.data());
        for (int i = 0; i < d; ++i) J(i, j) = (bp[i] - bm[i]) / (2 * h);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return J;
}

bool newton_refine(const SystemSpec& sys, StateVector& x, double tol,
                   int max_iters, int* iters_used = nullptr) {
    const int d = sys.d;
    StateVector b(d);
    for (int it = 0; it < max_iters; ++it) {
        if (!sys.in_domain(x.data())) return false;
        sys.drift(x.data(), b.data());
        double r = 0;
        for (double v : b) r = std::max(r, std::abs(v));
        if (iters_used) *iters_used = it;
        if (r < tol) return true;
        Eigen::MatrixXd J = jacobian(sys, x);
        Eigen::VectorXd rhs(d);
        for (int i = 0; i < d; ++i) rhs(i) = -b[i];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) return false;
        for (int i = 0; i < d; ++i) x[i] += dx(i);
        if (norm_inf(x) > sys.blowup_bound) return false;
    }
    sys.drift(x.data(), b.data());
    return norm_inf(b) < tol;
}

}  // namespace

EquilibriumReport classify_equilibrium(const SystemSpec& sys,
                                       const StateVector& point) {
    EquilibriumReport rep;
    rep.point = point;
    Eigen::MatrixXd J = jacobian(sys, point);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) return rep;
    const auto ev = es.eigenvalues();
    double maxmod = 0;
    for (int i = 0; i < ev.size(); ++i) {
        rep.eigenvalues.push_back(ev(i));
        maxmod = std::max(maxmod, std::abs(ev(i)));
    }
    const double tol = 1e-8 * std::max(1.0, maxmod);
    bool has_pos = false, has_neg = false, has_zero = false, has_imag = false;
    for (const auto& l : rep.eigenvalues) {
        if (std::abs(l.real()) <= tol) has_zero = true;
        else if (l.real() > 0) has_pos = true;
        else has_neg = true;
        if (std::abs(l.imag()) > tol) has_imag = true;
    }
    if (has_zero) rep.classification = EqClass::CenterLike;
    else if (has_pos && has_neg) rep.classification = EqClass::Saddle;
    else if (has_imag)
        rep.classification = has_pos ? EqClass::UnstableFocus : EqClass::StableFocus;
    else
        rep.classification = has_pos ? EqClass::UnstableNode : EqClass::StableNode;
    return rep;
}

std::vector<EquilibriumReport> find_equilibria(const SystemSpec& sys,
                                               const GridSpec& seeds,
                                               double newton_tol) {
    const int d = sys.d;
    if (static_cast<int>(seeds.lo.size()) != d ||
        static_cast<int>(seeds.hi.size()) != d ||
        static_cast<int>(seeds.counts.size()) != d)
        throw std::invalid_argument("find_equilibria: grid spec dimension");

    std::vector<EquilibriumReport> found;
    std::vector<int> idx(d, 0);
    while (true) {
        StateVector x(d);
        for (int i = 0; i < d; ++i) {
            const int c = std::max(1, seeds.counts[i]);
            x[i] = c == 1 ? 0.5 * (seeds.lo[i] + seeds.hi[i])
                          : seeds.lo[i] +
                                (seeds.hi[i] - seeds.lo[i]) * idx[i] / (c - 1);
        }
        if (sys.in_domain(x.data())) {
            StateVector z = x;
            if (newton_refine(sys, z, newton_tol, 60)) {
                bool dup = false;
                for (const auto& r : found) {
                    double dist = 0;
                    for (int i = 0; i < d; ++i)
                        dist = std::max(dist, std::abs(r.point[i] - z[i]));
                    if (dist < 1e-6) { dup = true; break; }
                }
                bool inside = true;
                for (int i = 0; i < d; ++i)
                    if (z[i] < seeds.lo[i] - 1e-6 || z[i] > seeds.hi[i] + 1e-6)
                        inside = false;
                if (!dup && inside) found.push_back(classify_equilibrium(sys, z));
            }
        }
        int k = d - 1;
        for (; k >= 0; --k) {
            if (++idx[k] < std::max(1, seeds.counts[k])) break;
            idx[k] = 0;
        }
        if (k < 0) break;
    }
    std::sort(found.begin(), found.end(),
              [](const EquilibriumReport& a, const EquilibriumReport& b) {
                  return a.point < b.point;
              });
    return found;
}

namespace {

// Solves H(c + r u) = level for r > 0 along direction u by bracketing.
double ray_solve(const ScalarFn& H, const StateVector& c, double ux, double uy,
                 double level, double rmax) {
    double x[2];
    auto val = [&](double r) {
        x[0] = c[0] + r * ux;
        x[1] = c[1] + r * uy;
        return H(x) - level;
    };
    const double f0 = val(0.0);
    double rlo = 0.0, rhi = rmax;
    double flo = f0;
    // march outward to find a sign change
    bool bracketed = false;
    const int kMarch = 400;
    for (int i = 1; i <= kMarch; ++i) {
        const double r = rmax * i / kMarch;
        const double f = val(r);
        if (std::isfinite(f) && f * flo <= 0.0) {
            rlo = rmax * (i - 1) / kMarch;
            rhi = r;
            bracketed = true;
            break;
        }
        flo = f;
    }
    if (!bracketed) return -1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (rlo + rhi);
        const double fm = val(mid);
        if (fm == 0.0) return mid;
        if (fm * val(rlo) < 0) rhi = mid;
        else rlo = mid;
        if (rhi - rlo < 1e-14 * std::max(1.0, rhi)) break;
    }
    return 0.5 * (rlo + rhi);
}

}  // namespace

CycleMeasure cycle_measure(const SystemSpec& sys, double level, int n,
                           const StateVector& center_hint) {
    if (!sys.hamiltonian)
        throw std::invalid_argument(sys.name + " carries no Hamiltonian");
    if (sys.d != 2)
        throw std::invalid_argument("cycle_measure supports planar systems");
    if (n < 8) throw std::invalid_argument("cycle_measure: need n >= 8");

    // Center: caller hint, or the minimum of H over a coarse scan.
    StateVector c = center_hint;
    if (c.empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 80; ++i)
            for (int j = 0; j <= 80; ++j) {
                double x[2] = {-4.0 + 8.0 * i / 80, -4.0 + 8.0 * j / 80};
                const double h = sys.hamiltonian(x);
                if (h < best && h < level) {
                    best = h;
                    c = {x[0], x[1]};
                }
            }
        if (c.empty())
            throw std::runtime_error("cycle_measure: level set empty in search box");
    }

    CycleMeasure cm;
    cm.points.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2 * M_PI * k / n;
        const double r = ray_solve(sys.hamiltonian, c, std::cos(th),
                                   std::sin(th), level, 50.0);
        if (r <= 0)
            throw std::runtime_error(
                "cycle_measure: level set not closed around center");
        cm.points.push_back({c[0] + r * std::cos(th), c[1] + r * std::sin(th)});
    }

    // Flow return period from the first sample: integrate until the polar
    // angle around the center wraps by 2*pi.
    {
        StateVector x = cm.points[0];
        const double th0 = std::atan2(x[1] - c[1], x[0] - c[0]);
        double prev = 0.0, accum = 0.0, t = 0.0;
        const double dt = 1e-3;
        State dx(2);
        auto stepper = odeint::make_dense_output(1e-11, 1e-11, Stepper());
        FieldSystem f{&sys.drift, sys.blowup_bound};
        State s = x;
        stepper.initialize(s, 0.0, dt);
        double prev_angle = th0;
        (void)prev;
        while (accum < 2 * M_PI - 1e-9 && t < 1e5) {
            stepper.do_step(f);
            t = stepper.current_time();
            const auto& cur = stepper.current_state();
            double ang = std::atan2(cur[1] - c[1], cur[0] - c[0]);
            double dth = ang - prev_angle;
            while (dth > M_PI) dth -= 2 * M_PI;
            while (dth < -M_PI) dth += 2 * M_PI;
            accum += std::abs(dth);
            prev_angle = ang;
            if (accum >= 2 * M_PI) {
                // bisect the overshoot inside the last step for the period
                double tlo = stepper.previous_time(), thi = t;
                double alo = accum - std::abs(dth);
                for (int it = 0; it < 60; ++it) {
                    const double tm = 0.5 * (tlo + thi);
                    State sm(2);
                    stepper.calc_state(tm, sm);
                    double am = std::atan2(sm[1] - c[1], sm[0] - c[0]);
                    double d2 = am - prev_angle;  // relative to step start
                    (void)d2;
                    // recompute winding from the step start
                    double dd = am - std::atan2(
                        stepper.previous_state()[1] - c[1],
                        stepper.previous_state()[0] - c[0]);
                    while (dd > M_PI) dd -= 2 * M_PI;
                    while (dd < -M_PI) dd += 2 * M_PI;
                    if (alo + std::abs(dd) >= 2 * M_PI) thi = tm;
                    else tlo = tm;
                }
                cm.period = 0.5 * (tlo + thi);
                break;
            }
        }
        if (cm.period == 0.0)
            throw std::runtime_error("cycle_measure: flow did not close a loop");
    }

    // Weights: trapezoid arc lengths times 1/|grad H|, normalized.
    cm.density.resize(n);
    cm.weights.assign(n, 0.0);
    std::vector<double> invgrad(n);
    for (int k = 0; k < n; ++k) {
        const auto& p = cm.points[k];
        double x[2] = {p[0], p[1]};
        // |grad H| from the Hamiltonian by central differences when no
        // closed form is exposed; the built-in models all have smooth H.
        const double h = 1e-6;
        double xp[2], xm[2];
        double g2 = 0;
        for (int i = 0; i < 2; ++i) {
            xp[0] = x[0]; xp[1] = x[1];
            xm[0] = x[0]; xm[1] = x[1];
            xp[i] += h;
            xm[i] -= h;
            const double gi = (sys.hamiltonian(xp) - sys.hamiltonian(xm)) / (2 * h);
            g2 += gi * gi;
        }
        invgrad[k] = 1.0 / std::sqrt(g2);
        cm.density[k] = invgrad[k] / cm.period;
    }
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        const auto& a = cm.points[k];
        const auto& b = cm.points[(k + 1) % n];
        const auto& pr = cm.points[(k + n - 1) % n];
        const double seg =
            0.5 * (std::hypot(b[0] - a[0], b[1] - a[1]) +
                   std::hypot(a[0] - pr[0], a[1] - pr[1]));
        cm.weights[k] = seg * invgrad[k];
        sum += cm.weights[k];
    }
    for (double& w : cm.weights) w /= sum;
    return cm;
}

double hopf_curve(double LC_ratio) {
    if (LC_ratio <= 0)
        throw std::invalid_argument("hopf_curve: L/C must be > 0");
    return -LC_ratio + std::sqrt(LC_ratio * LC_ratio + 3 * LC_ratio);
}

namespace {

// First return to the section {x[1] == section, x[0] > 0, decreasing x[1]}.
// Returns (x-coordinate at crossing, time of crossing).
std::pair<double, double> next_section_crossing(const SystemSpec& sys,
                                                const StateVector& start,
                                                double section, double t_max) {
    FieldSystem f{&sys.drift, sys.blowup_bound};
    auto stepper = odeint::make_dense_output(1e-11, 1e-11, Stepper());
    State s = start;
    stepper.initialize(s, 0.0, 1e-3);
    double t = 0.0;
    double burn = 1e-6;
    while (t < t_max) {
        stepper.do_step(f);
        const double t0 = stepper.previous_time();
        t = stepper.current_time();
        const auto& a = stepper.previous_state();
        const auto& b = stepper.current_state();
        const double fa = a[1] - section, fb = b[1] - section;
        if (t0 > burn && fa > 0 && fb <= 0 && 0.5 * (a[0] + b[0]) > 0) {
            double lo = t0, hi = t;
            State mid(2);
            for (int it = 0; it < 80; ++it) {
                const double tm = 0.5 * (lo + hi);
                stepper.calc_state(tm, mid);
                if (mid[1] - section > 0) lo = tm;
                else hi = tm;
            }
            stepper.calc_state(0.5 * (lo + hi), mid);
            return {mid[0], 0.5 * (lo + hi)};
        }
    }
    throw std::runtime_error("poincare: no section crossing before t_max");
}

}  // namespace

Trajectory locate_limit_cycle(const SystemSpec& sys, const StateVector& x0,
                              double section_tol, int max_iters) {
    if (sys.d != 2)
        throw std::invalid_argument("locate_limit_cycle is planar only");
    const double section = 0.0;
    // settle onto the attractor first
    Trajectory tr = integrate(sys, x0, 60.0, 1e-10);
    StateVector x = tr.back_state();
    auto [a, tcross] = next_section_crossing(sys, x, section, 1e4);
    double prev = a;
    double period_guess = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        StateVector start = {prev, section};
        auto [nxt, tau] = next_section_crossing(sys, start, section, 1e4);
        period_guess = tau;
        if (std::abs(nxt - prev) < section_tol) {
            prev = nxt;
            break;
        }
        prev = nxt;
        if (it + 1 == max_iters)
            throw std::runtime_error("poincare iteration did not converge");
    }
    // one full period sampled densely from the fixed point
    StateVector start = {prev, section};
    return integrate_sampled(sys, start, period_guess, 2000, 1e-11);
}

double polyline_distance(const std::vector<StateVector>& pts, const double* x,
                         bool closed) {
    double best = std::numeric_limits<double>::infinity();
    const size_t n = pts.size();
    if (n == 0) return best;
    const size_t segs = closed ? n : n - 1;
    const size_t dim = pts[0].size();
    for (size_t k = 0; k < segs; ++k) {
        const auto& a = pts[k];
        const auto& b = pts[(k + 1) % n];
        double ab2 = 0, apx = 0;
        for (size_t i = 0; i < dim; ++i) {
            const double d = b[i] - a[i];
            ab2 += d * d;
            apx += (x[i] - a[i]) * d;
        }
        double t = ab2 > 0 ? std::clamp(apx / ab2, 0.0, 1.0) : 0.0;
        double d2 = 0;
        for (size_t i = 0; i < dim; ++i) {
            const double diff = x[i] - (a[i] + t * (b[i] - a[i]));
            d2 += diff * diff;
        }
        best = std::min(best, d2);
    }
    return std::sqrt(best);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const size_t d = traj.states.empty() ? 0 : traj.states[0].size();
    out << "t";
    for (size_t i = 1; i <= d; ++i) out << ",x" << i;
    out << "\n";
    out.precision(17);
    for (size_t k = 0; k < traj.size(); ++k) {
        out << traj.times[k];
        for (double v : traj.states[k]) out << "," << v;
        out << "\n";
    }
}

}  // namespace qplab::flow
