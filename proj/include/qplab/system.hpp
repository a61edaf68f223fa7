#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qplab {

/// State of a d-dimensional system, in model units.
using StateVector = std::vector<double>;

/// In-place field evaluation: out has length d (or d*m for matrices, row-major).
using FieldFn = std::function<void(const double* x, double* out)>;
using ScalarFn = std::function<double(const double* x)>;

enum class Domain { FullSpace, PositiveOrthant };

enum class ClassKind { Equilibrium, LevelCycle, Annulus };

/// One node K_i of the transition graph: an equilibrium, a closed level set
/// of the Hamiltonian, or an annulus of H-levels.
struct EquivalenceClassSpec {
    int label = 0;              // 1-based, matches the K_i numbering
    std::string name;           // "K1", "E", ...
    ClassKind kind = ClassKind::Equilibrium;
    StateVector point;          // equilibrium location
    double level = 0.0;         // level cycle {H = level}
    double level_lo = 0.0;      // annulus {level_lo <= H <= level_hi}
    double level_hi = 0.0;
};

/// Lyapunov data for the coercivity/trace inequalities. theta/eta/C/M of 0
/// mean "not fixed by the model"; the verifier then takes them as inputs or
/// reports the smallest admissible constant.
struct LyapunovCertificate {
    ScalarFn V;
    FieldFn grad;   // length d
    FieldFn hess;   // d*d row-major
    double theta = 0.0;
    double eta = 0.0;
    double C = 0.0;
    double M = 0.0;
};

/// An SDE model dX = b(X)dt + sqrt(eps) sigma(X) dB with whatever analytic
/// structure the model supports. Immutable after construction; all callbacks
/// are pure, so a SystemSpec can be shared freely across threads.
struct SystemSpec {
    std::string name;
    int d = 0;  // state dimension
    int m = 0;  // noise dimension
    Domain domain = Domain::FullSpace;
    bool second_order = false;   // d=2, m=1, noise only in the velocity row
    bool decomposable = false;   // b = -grad U + l with <grad U, l> == 0
    std::map<std::string, double> params;

    FieldFn drift;               // length d
    FieldFn diffusion;           // d*m row-major
    FieldFn drift_jacobian;      // d*d row-major; may be null (FD fallback)

    ScalarFn hamiltonian;        // may be null
    ScalarFn potential;          // U; set iff decomposable
    FieldFn grad_potential;      // grad U
    FieldFn rotation;            // l

    // Scalar second-order form x'' = b(x, x') + sqrt(eps) sigma(x, x') dB.
    std::function<double(double, double)> so_drift;
    std::function<double(double, double)> so_sigma;
    std::function<void(double, double, double*)> so_drift_grad;  // (d/dx, d/dv)

    // Per-capita form for positive-orthant models: drift_i = x_i * a_i(x),
    // sigma_i = x_i * s_i(x). Required by the log-Euler scheme.
    FieldFn percap_drift;
    FieldFn percap_sigma;

    std::optional<LyapunovCertificate> lyapunov;
    std::vector<EquivalenceClassSpec> classes;

    double blowup_bound = 1e6;

    bool in_domain(const double* x) const {
        if (domain == Domain::PositiveOrthant) {
            for (int i = 0; i < d; ++i)
                if (!(x[i] > 0.0)) return false;
        }
        return true;
    }

    const EquivalenceClassSpec& class_by_label(int label) const {
        for (const auto& c : classes)
            if (c.label == label) return c;
        throw std::invalid_argument(name + ": no equivalence class with label " +
                                    std::to_string(label));
    }
};

/// Convenience wrappers returning by value.
StateVector eval_drift(const SystemSpec& sys, const StateVector& x);
std::vector<double> eval_diffusion(const SystemSpec& sys, const StateVector& x);
double hamiltonian(const SystemSpec& sys, const StateVector& x);

struct Decomposition {
    double U;
    StateVector grad_U;
    StateVector l;
};
/// U, grad U, l at x for decomposable systems; throws otherwise.
Decomposition decomposition(const SystemSpec& sys, const StateVector& x);

}  // namespace qplab
