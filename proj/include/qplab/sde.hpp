#pragma once

#include <cstdint>
#include <functional>

#include "qplab/flow.hpp"
#include "qplab/system.hpp"

namespace qplab::sde {

enum class Scheme { EulerMaruyama, LogEuler };

struct SimConfig {
    double epsilon = 0.0;   // noise intensity; increments have variance eps*h
    double step = 1e-3;     // h
    double horizon = 1.0;   // total time
    double burn_in = 0.0;   // discarded prefix (occupation statistics only)
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::EulerMaruyama;

    void validate() const;
};

/// Counter-based generator: every normal variate is a pure function of
/// (key, step index, channel), so replicas are reproducible independently of
/// scheduling and a run can resume mid-stream.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);
    double normal(std::uint64_t step, std::uint32_t channel) const;
    double uniform(std::uint64_t step, std::uint32_t channel) const;  // (0,1)

  private:
    std::uint64_t key_;
};

struct PositivityError : std::runtime_error {
    double time;
    explicit PositivityError(double t)
        : std::runtime_error(
              "positivity lost at t = " + std::to_string(t) +
              "; use the log-euler scheme for positive-orthant systems"),
          time(t) {}
};

/// Euler-Maruyama (or log-Euler, for positive-orthant per-capita models)
/// path. Identical (seed, cfg, x0) gives a bit-identical trajectory. Throws
/// BlowUpError / PositivityError with the escape time.
flow::Trajectory simulate(const SystemSpec& sys, const SimConfig& cfg,
                          const StateVector& x0, std::uint64_t replica = 0);

/// Streaming form: visit(t, x) is called after each step with t > burn_in;
/// the trajectory is not stored. Returns the final state.
StateVector simulate_visit(
    const SystemSpec& sys, const SimConfig& cfg, const StateVector& x0,
    const std::function<void(double, const double*)>& visit,
    std::uint64_t replica = 0, std::uint64_t start_step = 0,
    StateVector resume_state = {});

struct BoxGrid {
    StateVector lo, hi;
    std::vector<int> bins;

    int dim() const { return static_cast<int>(bins.size()); }
    std::size_t cell_count() const;
    /// Flat index of the cell containing x, or npos if outside the box.
    std::size_t locate(const double* x) const;
    StateVector cell_center(std::size_t flat) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct OccupationMeasure {
    BoxGrid grid;
    std::vector<double> mass;   // normalized over in-box + overflow
    double overflow = 0.0;      // mass recorded outside the box
    double total_time = 0.0;
    bool left_box = false;      // emitted as a warning upstream
};

/// Time-weighted normalized histogram of a stored trajectory (burn-in is
/// assumed already removed).
OccupationMeasure occupation(const flow::Trajectory& traj, const BoxGrid& grid);

/// Accumulator for streaming occupation (and for merging replicas).
class OccupationAccumulator {
  public:
    explicit OccupationAccumulator(const BoxGrid& grid);
    void add(const double* x, double dt);
    void merge(const OccupationAccumulator& other);
    OccupationMeasure finish() const;
    const BoxGrid& grid() const { return grid_; }

  private:
    BoxGrid grid_;
    std::vector<double> mass_;
    double overflow_ = 0.0;
    double total_ = 0.0;
};

/// Mass of the rho-neighborhood of a class: Euclidean ball for equilibria,
/// |H - c| <= rho tube for level cycles, H in [lo-rho, hi+rho] for annuli.
/// The system supplies H for the level-set kinds.
double neighborhood_mass(const SystemSpec& sys, const OccupationMeasure& occ,
                         const EquivalenceClassSpec& cls, double rho);

/// Mass within Euclidean distance rho of a polyline (numerically located
/// cycles that have no H-level description).
double mass_near_polyline(const OccupationMeasure& occ,
                          const std::vector<StateVector>& pts, double rho);

struct ExitResult {
    double time = 0.0;
    bool censored = false;  // horizon reached without exit
    StateVector state;      // state at exit (or at horizon)
};

using DomainPredicate = std::function<bool(const double*)>;

/// First time the simulated path violates the predicate; censored at the
/// horizon (never silently dropped).
ExitResult exit_time(const SystemSpec& sys, const SimConfig& cfg,
                     const StateVector& x0, const DomainPredicate& domain,
                     std::uint64_t replica = 0);

void write_occupation_csv(const OccupationMeasure& occ, const std::string& path);

}  // namespace qplab::sde
