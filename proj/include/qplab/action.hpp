#pragma once

#include <variant>

#include "qplab/flow.hpp"
#include "qplab/system.hpp"

namespace qplab::action {

/// Time-gridded candidate trajectory with fixed endpoints: n interior nodes
/// on the uniform grid t_k = k T/(n+1), k = 0..n+1.
struct DiscretePath {
    double T = 0.0;
    int n = 0;          // interior node count
    int d = 0;
    std::vector<double> states;  // (n+2) * d row-major

    int nodes() const { return n + 2; }
    double dt() const { return T / (n + 1); }
    double* node(int k) { return states.data() + static_cast<size_t>(k) * d; }
    const double* node(int k) const {
        return states.data() + static_cast<size_t>(k) * d;
    }
};

/// Scalar path for second-order systems: position samples only; velocity and
/// acceleration come from centered differences.
struct ScalarPath {
    double T = 0.0;
    int n = 0;  // total node count
    std::vector<double> values;

    double dt() const { return T / (n - 1); }
};

struct ActionValue {
    double value = 0.0;
    std::vector<double> residuals;  // |h(t_k)|^2 per node
};

/// Straight-line path from x to y (the default optimizer initialization).
DiscretePath linear_path(const StateVector& x, const StateVector& y, double T,
                         int n);

/// Resamples a trajectory onto the uniform grid by linear interpolation.
DiscretePath resample(const flow::Trajectory& traj, int n);
ScalarPath resample_scalar(const flow::Trajectory& traj, int n,
                           int component = 0);

/// Freidlin-Wentzell action (non-degenerate form): trapezoid quadrature of
/// L(phi, phi') with centered-difference velocities (one-sided second-order
/// stencils at the endpoints). Requires sigma sigma* invertible along the
/// path (condition number below 1e12); a singular node is reported by index.
ActionValue rate_full(const SystemSpec& sys, const DiscretePath& path);

/// Degenerate second-order action: quadrature of |h|^2/2 with
/// h = (phi'' - b(phi, phi')) / sigma(phi, phi').
ActionValue rate_second_order(const SystemSpec& sys, const ScalarPath& path);

/// Gradient of the discrete action with respect to the interior nodes
/// (analytic chain rule through the quadrature; finite differences where the
/// model lacks analytic Jacobians). Exposed for the optimizer's tests.
std::vector<double> rate_full_gradient(const SystemSpec& sys,
                                       const DiscretePath& path);

struct MinimizeOptions {
    int max_iters = 4000;
    double grad_tol = 1e-8;     // on the sup-norm of the gradient
    double step_shrink = 0.5;
    double armijo = 1e-4;
    const DiscretePath* warm_start = nullptr;  // optional initial path
};

struct MinimizeResult {
    std::variant<DiscretePath, ScalarPath> path;
    ActionValue value;
    bool converged = false;
    int iterations = 0;

    const DiscretePath& full_path() const {
        return std::get<DiscretePath>(path);
    }
    const ScalarPath& scalar_path() const { return std::get<ScalarPath>(path); }
};

/// Local minimum of the discrete action over interior nodes, fixed endpoints,
/// by gradient descent with backtracking line search (objective is monotone
/// across accepted iterations). For second-order systems x and y are
/// (position, velocity) pairs and the result is a ScalarPath.
MinimizeResult minimize_action(const SystemSpec& sys, const StateVector& x,
                               const StateVector& y, double T, int n,
                               const MinimizeOptions& opts = {});

struct QuasipotentialEstimate {
    double value = 0.0;
    double argmin_T = 0.0;
    bool edge_of_grid = false;  // argmin at a grid endpoint: extend the grid
    bool converged = true;      // all contributing solves converged
    MinimizeResult best;
};

/// min over Tgrid of minimize_action, with warm starts from the extremal /
/// descent flow chains on decomposable systems. Ties break toward smaller T.
QuasipotentialEstimate quasipotential_estimate(const SystemSpec& sys,
                                               const StateVector& x,
                                               const StateVector& y,
                                               const std::vector<double>& Tgrid,
                                               int n,
                                               const MinimizeOptions& opts = {});

/// 2 (U(Y) - U(X)), clipped below at zero: the exact quasipotential between
/// classes connected by the extremal flow of a decomposable system.
double analytic_quasipotential(const SystemSpec& sys, const StateVector& X,
                               const StateVector& Y);

/// Integrates the extremal system dX/dt = grad U(X) + l(X) from x0 and
/// resamples onto the uniform grid with n interior nodes.
DiscretePath extremal_path(const SystemSpec& sys, const StateVector& x0,
                           double T, int n);

/// Piecewise-linear bump theta_j^{+/-} supported on [0, (2+sqrt 2) j]; its
/// running integral and double integral are exact closed forms.
class ThetaBump {
  public:
    ThetaBump(double j, int sign);  // sign = +1 or -1
    double operator()(double t) const;
    double integral(double t) const;         // int_0^t theta
    double double_integral(double t) const;  // int_0^t int_0^s theta
    double support_end() const { return (2.0 + kSqrt2) * j_; }

  private:
    static constexpr double kSqrt2 = 1.4142135623730951;
    double j_;
    double sign_;
};

struct ConnectResult {
    ScalarPath path;
    ActionValue value;          // from the analytic profile quadrature
    StateVector start_state;    // (zeta, zeta1) at 0 — exact
    StateVector end_state;      // (zeta, zeta1) at T — exact
    double T = 0.0;
    std::string branch;         // "trivial", "interpolant", "case1a", ...
};

/// Control-path construction connecting (position, velocity) endpoints of a
/// second-order system. Without a base path it is the cutoff interpolant
/// alpha f1 + (1-alpha) f2; with a base path connecting nearby reference
/// endpoints it repairs the base with unit-acceleration segments plus a
/// theta bump (Case 1 both subcases, Case 2 mirrored, Case 3), selected by
/// the sign of the base terminal velocity. Action is evaluated on the
/// analytic profile; fails only if sigma vanishes along the built path.
ConnectResult connect_second_order(const SystemSpec& sys, const StateVector& x,
                                   const StateVector& y,
                                   const ScalarPath* base = nullptr,
                                   double T_interp = 1.0, int n_out = 400);

/// The two chart actions of the diode circuit for a path in the constrained
/// (v, i) class: (action via the (v,i) integrand, action of the transformed
/// (v,w) path). Throws if the path violates C v' = i - f(v) beyond
/// discretization tolerance.
std::pair<double, double> transform_invariance_check(const DiscretePath& path_vi,
                                                     const SystemSpec& diode);

/// Projects a (v,i) path onto the constraint manifold i = C v' + f(v).
DiscretePath project_to_diode_constraint(const DiscretePath& path_vi,
                                         const SystemSpec& diode);

void write_path_csv(const DiscretePath& path, const std::string& file);

}  // namespace qplab::action
