#include "qplab/sde.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace qplab::sde {

void SimConfig::validate() const {
    if (!(epsilon >= 0)) throw std::invalid_argument("sim: epsilon must be >= 0");
    if (!(step > 0)) throw std::invalid_argument("sim: step must be > 0");
    if (!(step < horizon))
        throw std::invalid_argument("sim: step must be < horizon");
    if (!(burn_in >= 0 && burn_in < horizon))
        throw std::invalid_argument("sim: burn_in must be in [0, horizon)");
}

namespace {

inline std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t key, std::uint64_t step,
                           std::uint64_t channel) {
    std::uint64_t h = splitmix(key ^ splitmix(step));
    h = splitmix(h ^ splitmix(channel * 0xda942042e4dd58b5ULL));
    return h;
}

inline double to_unit(std::uint64_t h) {
    // (0,1): 53-bit mantissa, offset away from zero
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed ^ splitmix(stream ^ 0x3c79ac492ba7b653ULL))) {}

double CounterRng::uniform(std::uint64_t step, std::uint32_t channel) const {
    return to_unit(hash3(key_, step, channel));
}

double CounterRng::normal(std::uint64_t step, std::uint32_t channel) const {
    // Box-Muller from two counter-derived uniforms.
    const double u1 = to_unit(hash3(key_, step, 2ULL * channel));
    const double u2 = to_unit(hash3(key_, step, 2ULL * channel + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

struct Stepper {
    const SystemSpec& sys;
    const SimConfig& cfg;
    CounterRng rng;
    double sqeh;
    std::vector<double> drift_buf, sig_buf, percap_buf, psig_buf, logx;
    bool log_scheme;

    Stepper(const SystemSpec& s, const SimConfig& c, std::uint64_t replica)
        : sys(s),
          cfg(c),
          rng(c.seed, replica),
          sqeh(std::sqrt(c.epsilon * c.step)),
          drift_buf(s.d),
          sig_buf(static_cast<size_t>(s.d) * s.m),
          percap_buf(s.d),
          psig_buf(s.d),
          logx(s.d),
          log_scheme(c.scheme == Scheme::LogEuler) {
        if (log_scheme) {
            if (sys.domain != Domain::PositiveOrthant || !sys.percap_drift ||
                !sys.percap_sigma)
                throw std::invalid_argument(
                    "log-euler requires a positive-orthant system with "
                    "per-capita structure");
        }
    }

    void advance(StateVector& x, std::uint64_t k, double t_next) {
        const int d = sys.d, m = sys.m;
        if (log_scheme) {
            sys.percap_drift(x.data(), percap_buf.data());
            sys.percap_sigma(x.data(), psig_buf.data());
            for (int i = 0; i < d; ++i) {
                const double s = psig_buf[i];
                const double corr = 0.5 * cfg.epsilon * s * s;
                logx[i] = std::log(x[i]) + (percap_buf[i] - corr) * cfg.step +
                          sqeh * s * rng.normal(k, static_cast<std::uint32_t>(i));
                x[i] = std::exp(logx[i]);
            }
        } else {
            sys.drift(x.data(), drift_buf.data());
            if (cfg.epsilon > 0) {
                sys.diffusion(x.data(), sig_buf.data());
                for (int j = 0; j < m; ++j) {
                    const double xi =
                        rng.normal(k, static_cast<std::uint32_t>(j));
                    const double w = sqeh * xi;
                    for (int i = 0; i < d; ++i)
                        x[i] += sig_buf[static_cast<size_t>(i) * m + j] * w;
                }
            }
            for (int i = 0; i < d; ++i) x[i] += drift_buf[i] * cfg.step;
            if (sys.domain == Domain::PositiveOrthant) {
                for (int i = 0; i < d; ++i)
                    if (!(x[i] > 0)) throw PositivityError(t_next);
            }
        }
        double nrm = 0;
        for (int i = 0; i < d; ++i) nrm = std::max(nrm, std::abs(x[i]));
        if (!(nrm <= sys.blowup_bound)) throw flow::BlowUpError(t_next);
    }
};

}  // namespace

StateVector simulate_visit(
    const SystemSpec& sys, const SimConfig& cfg, const StateVector& x0,
    const std::function<void(double, const double*)>& visit,
    std::uint64_t replica, std::uint64_t start_step, StateVector resume_state) {
    cfg.validate();
    if (static_cast<int>(x0.size()) != sys.d)
        throw std::invalid_argument("simulate: x0 has wrong dimension");
    if (!sys.in_domain(x0.data()))
        throw std::domain_error("simulate: x0 outside the domain");

    Stepper st(sys, cfg, replica);
    StateVector x = resume_state.empty() ? x0 : std::move(resume_state);
    const auto nsteps = static_cast<std::uint64_t>(
        std::llround(cfg.horizon / cfg.step));
    for (std::uint64_t k = start_step; k < nsteps; ++k) {
        const double t_next = (k + 1) * cfg.step;
        st.advance(x, k, t_next);
        if (visit && t_next > cfg.burn_in) visit(t_next, x.data());
    }
    return x;
}

flow::Trajectory simulate(const SystemSpec& sys, const SimConfig& cfg,
                          const StateVector& x0, std::uint64_t replica) {
    flow::Trajectory traj;
    const auto nsteps =
        static_cast<std::uint64_t>(std::llround(cfg.horizon / cfg.step));
    traj.times.reserve(nsteps + 1);
    traj.states.reserve(nsteps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    SimConfig c = cfg;
    c.burn_in = 0.0;  // trajectories carry everything; burn-in is for stats
    simulate_visit(sys, c, x0,
                   [&](double t, const double* x) {
                       traj.times.push_back(t);
                       traj.states.push_back(StateVector(x, x + sys.d));
                   },
                   replica);
    return traj;
}

std::size_t BoxGrid::cell_count() const {
    std::size_t n = 1;
    for (int b : bins) n *= static_cast<std::size_t>(b);
    return n;
}

std::size_t BoxGrid::locate(const double* x) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
        if (x[i] < lo[i] || x[i] >= hi[i]) return npos;
        const double u = (x[i] - lo[i]) / (hi[i] - lo[i]);
        auto b = static_cast<std::size_t>(u * bins[i]);
        if (b >= static_cast<std::size_t>(bins[i]))
            b = static_cast<std::size_t>(bins[i]) - 1;
        flat = flat * static_cast<std::size_t>(bins[i]) + b;
    }
    return flat;
}

StateVector BoxGrid::cell_center(std::size_t flat) const {
    const int d = dim();
    StateVector c(d);
    for (int i = d - 1; i >= 0; --i) {
        const auto b = flat % static_cast<std::size_t>(bins[i]);
        flat /= static_cast<std::size_t>(bins[i]);
        c[i] = lo[i] + (hi[i] - lo[i]) * (static_cast<double>(b) + 0.5) / bins[i];
    }
    return c;
}

OccupationAccumulator::OccupationAccumulator(const BoxGrid& grid)
    : grid_(grid), mass_(grid.cell_count(), 0.0) {
    if (grid_.lo.size() != grid_.hi.size() ||
        grid_.lo.size() != grid_.bins.size())
        throw std::invalid_argument("occupation: inconsistent grid spec");
}

void OccupationAccumulator::add(const double* x, double dt) {
    const auto idx = grid_.locate(x);
    if (idx == BoxGrid::npos) overflow_ += dt;
    else mass_[idx] += dt;
    total_ += dt;
}

void OccupationAccumulator::merge(const OccupationAccumulator& other) {
    for (size_t i = 0; i < mass_.size(); ++i) mass_[i] += other.mass_[i];
    overflow_ += other.overflow_;
    total_ += other.total_;
}

OccupationMeasure OccupationAccumulator::finish() const {
    OccupationMeasure occ;
    occ.grid = grid_;
    occ.mass = mass_;
    occ.total_time = total_;
    if (total_ > 0) {
        for (double& v : occ.mass) v /= total_;
        occ.overflow = overflow_ / total_;
    }
    occ.left_box = overflow_ > 0;
    return occ;
}

OccupationMeasure occupation(const flow::Trajectory& traj, const BoxGrid& grid) {
    OccupationAccumulator acc(grid);
    for (size_t k = 1; k < traj.size(); ++k)
        acc.add(traj.states[k].data(), traj.times[k] - traj.times[k - 1]);
    return acc.finish();
}

double neighborhood_mass(const SystemSpec& sys, const OccupationMeasure& occ,
                         const EquivalenceClassSpec& cls, double rho) {
    if (!(rho > 0)) throw std::invalid_argument("neighborhood_mass: rho > 0");
    double total = 0.0;
    const auto cells = occ.grid.cell_count();
    for (std::size_t i = 0; i < cells; ++i) {
        if (occ.mass[i] == 0.0) continue;
        const StateVector c = occ.grid.cell_center(i);
        bool inside = false;
        switch (cls.kind) {
            case ClassKind::Equilibrium: {
                double d2 = 0;
                for (size_t j = 0; j < c.size(); ++j) {
                    const double d = c[j] - cls.point[j];
                    d2 += d * d;
                }
                inside = d2 <= rho * rho;
                break;
            }
            case ClassKind::LevelCycle:
                inside = std::abs(sys.hamiltonian(c.data()) - cls.level) <= rho;
                break;
            case ClassKind::Annulus: {
                const double h = sys.hamiltonian(c.data());
                inside = h >= cls.level_lo - rho && h <= cls.level_hi + rho;
                break;
            }
        }
        if (inside) total += occ.mass[i];
    }
    return total;
}

double mass_near_polyline(const OccupationMeasure& occ,
                          const std::vector<StateVector>& pts, double rho) {
    double total = 0.0;
    const auto cells = occ.grid.cell_count();
    for (std::size_t i = 0; i < cells; ++i) {
        if (occ.mass[i] == 0.0) continue;
        const StateVector c = occ.grid.cell_center(i);
        if (flow::polyline_distance(pts, c.data(), true) <= rho)
            total += occ.mass[i];
    }
    return total;
}

ExitResult exit_time(const SystemSpec& sys, const SimConfig& cfg,
                     const StateVector& x0, const DomainPredicate& domain,
                     std::uint64_t replica) {
    if (!domain) throw std::invalid_argument("exit_time: malformed predicate");
    if (!domain(x0.data()))
        throw std::invalid_argument("exit_time: x0 violates the predicate");
    ExitResult res;
    res.censored = true;
    struct Done {};
    SimConfig c = cfg;
    c.burn_in = 0.0;
    try {
        res.state = simulate_visit(
            sys, c, x0,
            [&](double t, const double* x) {
                if (!domain(x)) {
                    res.time = t;
                    res.censored = false;
                    res.state.assign(x, x + sys.d);
                    throw Done{};
                }
            },
            replica);
        res.time = cfg.horizon;
    } catch (const Done&) {
    }
    return res;
}

void write_occupation_csv(const OccupationMeasure& occ, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const int d = occ.grid.dim();
    for (int i = 1; i <= d; ++i) out << "x" << i << ",";
    out << "mass\n";
    out.precision(17);
    const auto cells = occ.grid.cell_count();
    for (std::size_t i = 0; i < cells; ++i) {
        if (occ.mass[i] == 0.0) continue;
        const StateVector c = occ.grid.cell_center(i);
        for (double v : c) out << v << ",";
        out << occ.mass[i] << "\n";
    }
}

}  // namespace qplab::sde
