#pragma once

#include <complex>

#include "qplab/system.hpp"

namespace qplab::flow {

struct Trajectory {
    std::vector<double> times;        // strictly increasing
    std::vector<StateVector> states;  // same length as times

    size_t size() const { return times.size(); }
    const StateVector& back_state() const { return states.back(); }
};

enum class EqClass {
    StableNode,
    UnstableNode,
    Saddle,
    StableFocus,
    UnstableFocus,
    CenterLike,
    Unclassified
};

struct EquilibriumReport {
    StateVector point;
    std::vector<std::complex<double>> eigenvalues;
    EqClass classification = EqClass::Unclassified;
};

const char* to_string(EqClass c);

/// Thrown when |state| exceeds the system's blow-up bound during integration.
struct BlowUpError : std::runtime_error {
    double escape_time;
    explicit BlowUpError(double t)
        : std::runtime_error("trajectory blow-up at t = " + std::to_string(t)),
          escape_time(t) {}
};

/// Adaptive Dormand-Prince 5(4) integration of dx/dt = b(x), observed at the
/// solver's natural steps.
Trajectory integrate(const SystemSpec& sys, const StateVector& x0, double T,
                     double tol = 1e-9);

/// Same, sampled on a uniform grid with nsamples+1 points (dense output).
Trajectory integrate_sampled(const SystemSpec& sys, const StateVector& x0,
                             double T, int nsamples, double tol = 1e-10);

/// Integrates an arbitrary autonomous field (same adaptive scheme).
Trajectory integrate_field(const FieldFn& field, int d, const StateVector& x0,
                           double T, double tol = 1e-9,
                           double blowup_bound = 1e6);

struct GridSpec {
    StateVector lo, hi;
    std::vector<int> counts;  // seeds per axis
};

/// Newton-refined, deduplicated equilibria from a seed grid, classified by
/// the eigenvalues of the drift Jacobian. Singular Jacobians leave the
/// candidate Unclassified.
std::vector<EquilibriumReport> find_equilibria(const SystemSpec& sys,
                                               const GridSpec& seeds,
                                               double newton_tol = 1e-12);

/// Classification of a single refined equilibrium.
EquilibriumReport classify_equilibrium(const SystemSpec& sys,
                                       const StateVector& point);

struct CycleMeasure {
    std::vector<StateVector> points;  // ordered along the cycle
    double period = 0.0;              // flow return time
    std::vector<double> density;      // 1/(T |grad H|) per point
    std::vector<double> weights;      // arc-length * density, normalized
};

/// Samples the closed curve {H = level} around its enclosed center, computes
/// the flow return period, and assigns normalized weights proportional to
/// 1/|grad H| (the arc-length ergodic measure). Throws if the system has no
/// Hamiltonian or no closed level curve is found in the search box.
CycleMeasure cycle_measure(const SystemSpec& sys, double level, int n,
                           const StateVector& center_hint = {});

/// Hopf bifurcation curve h(L/C) = -L/C + sqrt((L/C)^2 + 3 L/C) of the diode
/// circuit; strictly increasing to 3/2.
double hopf_curve(double LC_ratio);

/// Locates a stable limit cycle by Poincare return-map iteration on the
/// section {x2 = section_value, x1 > 0}; returns one period sampled densely.
/// section_tol is the fixed-point tolerance on the section coordinate.
Trajectory locate_limit_cycle(const SystemSpec& sys, const StateVector& x0,
                              double section_tol = 1e-8, int max_iters = 200);

/// Euclidean distance from x to the polyline through pts (closed if loop).
double polyline_distance(const std::vector<StateVector>& pts,
                         const double* x, bool closed = true);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace qplab::flow
