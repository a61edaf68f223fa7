#include "qplab/models.hpp"

#include <cmath>
#include <sstream>

namespace qplab {

StateVector eval_drift(const SystemSpec& sys, const StateVector& x) {
    if (static_cast<int>(x.size()) != sys.d)
        throw std::invalid_argument(sys.name + ": state has wrong dimension");
    if (!sys.in_domain(x.data()))
        throw std::domain_error(sys.name +
                                ": state outside the positive orthant");
    StateVector out(sys.d);
    sys.drift(x.data(), out.data());
    return out;
}

std::vector<double> eval_diffusion(const SystemSpec& sys, const StateVector& x) {
    std::vector<double> out(static_cast<size_t>(sys.d) * sys.m);
    sys.diffusion(x.data(), out.data());
    return out;
}

double hamiltonian(const SystemSpec& sys, const StateVector& x) {
    if (!sys.hamiltonian)
        throw std::invalid_argument(sys.name + " carries no Hamiltonian");
    return sys.hamiltonian(x.data());
}

Decomposition decomposition(const SystemSpec& sys, const StateVector& x) {
    if (!sys.decomposable)
        throw std::invalid_argument(sys.name + " is not decomposable");
    Decomposition dec;
    dec.U = sys.potential(x.data());
    dec.grad_U.resize(sys.d);
    dec.l.resize(sys.d);
    sys.grad_potential(x.data(), dec.grad_U.data());
    sys.rotation(x.data(), dec.l.data());
    return dec;
}

}  // namespace qplab

namespace qplab::models {
namespace {

[[noreturn]] void bad_param(const std::string& model, const std::string& what) {
    throw std::invalid_argument(model + ": " + what);
}

double get_param(const std::map<std::string, double>& p, const std::string& key,
                 const std::string& model) {
    auto it = p.find(key);
    if (it == p.end()) bad_param(model, "missing required parameter '" + key + "'");
    return it->second;
}

void reject_unknown(const std::map<std::string, double>& p,
                    std::initializer_list<const char*> allowed,
                    const std::string& model) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) bad_param(model, "unknown parameter '" + k + "'");
    }
}

// ---------------------------------------------------------------------------
// Planar cycle systems (examples 4.1 / 4.2). F and its derivatives differ in
// one cubic coefficient; everything else is shared.
//   b(x) = (x2 - F'(x1)(H+1), -F'(x1) - x2 (H+1)),  H = x2^2/2 + F(x1)
//   U = H^2/2 + H,  l = (x2, -F'(x1)),  b = -grad U + l
// ---------------------------------------------------------------------------
struct CycleFamily {
    double c3;  // F = x^4/4 + c3 x^3/3 - x^2

    double F(double x) const {
        return x * x * x * x / 4 + c3 * x * x * x / 3 - x * x;
    }
    double Fp(double x) const { return x * x * x + c3 * x * x - 2 * x; }
    double Fpp(double x) const { return 3 * x * x + 2 * c3 * x - 2; }
    double H(const double* x) const { return x[1] * x[1] / 2 + F(x[0]); }

    void drift(const double* x, double* out) const {
        const double hp1 = H(x) + 1.0;
        const double fp = Fp(x[0]);
        out[0] = x[1] - fp * hp1;
        out[1] = -fp - x[1] * hp1;
    }
    void drift_jac(const double* x, double* J) const {
        // d b / d x, row-major 2x2; H_x1 = F', H_x2 = x2.
        const double hp1 = H(x) + 1.0;
        const double fp = Fp(x[0]);
        const double fpp = Fpp(x[0]);
        J[0] = -fpp * hp1 - fp * fp;
        J[1] = 1.0 - fp * x[1];
        J[2] = -fpp - x[1] * fp;
        J[3] = -hp1 - x[1] * x[1];
    }
    double U(const double* x) const {
        const double h = H(x);
        return h * h / 2 + h;
    }
    void gradU(const double* x, double* out) const {
        const double hp1 = H(x) + 1.0;
        out[0] = hp1 * Fp(x[0]);
        out[1] = hp1 * x[1];
    }
    void l(const double* x, double* out) const {
        out[0] = x[1];
        out[1] = -Fp(x[0]);
    }
};

SystemSpec make_cycle_system(const std::string& name, double c3,
                             std::vector<EquivalenceClassSpec> classes) {
    CycleFamily fam{c3};
    SystemSpec sys;
    sys.name = name;
    sys.d = 2;
    sys.m = 2;
    sys.decomposable = true;
    sys.drift = [fam](const double* x, double* out) { fam.drift(x, out); };
    sys.diffusion = [](const double*, double* s) {
        s[0] = 1.0; s[1] = 0.0; s[2] = 0.0; s[3] = 1.0;
    };
    sys.drift_jacobian = [fam](const double* x, double* J) {
        fam.drift_jac(x, J);
    };
    sys.hamiltonian = [fam](const double* x) { return fam.H(x); };
    sys.potential = [fam](const double* x) { return fam.U(x); };
    sys.grad_potential = [fam](const double* x, double* g) { fam.gradU(x, g); };
    sys.rotation = [fam](const double* x, double* out) { fam.l(x, out); };

    // V = H + 3 with theta = 2, eta = 1; H >= -8/3 keeps V positive.
    LyapunovCertificate cert;
    cert.V = [fam](const double* x) { return fam.H(x) + 3.0; };
    cert.grad = [fam](const double* x, double* g) {
        g[0] = fam.Fp(x[0]);
        g[1] = x[1];
    };
    cert.hess = [fam](const double* x, double* h) {
        h[0] = fam.Fpp(x[0]); h[1] = 0.0; h[2] = 0.0; h[3] = 1.0;
    };
    cert.theta = 2.0;
    cert.eta = 1.0;
    cert.M = 2.0;  // Trace = 3 x1^2 + 2 c3 x1 - 1 > -2
    sys.lyapunov = cert;
    sys.classes = std::move(classes);
    return sys;
}

// ---------------------------------------------------------------------------
// van der Pol
// ---------------------------------------------------------------------------
SystemSpec make_vdp(std::function<double(double, double)> sigma) {
    SystemSpec sys;
    sys.name = "vdp";
    sys.d = 2;
    sys.m = 1;
    sys.second_order = true;
    sys.so_drift = [](double x, double v) { return -((x * x - 1) * v + x); };
    sys.so_sigma = std::move(sigma);
    sys.so_drift_grad = [](double x, double v, double* g) {
        g[0] = -(2 * x * v + 1);
        g[1] = -(x * x - 1);
    };
    sys.drift = [](const double* x, double* out) {
        out[0] = x[1];
        out[1] = -((x[0] * x[0] - 1) * x[1] + x[0]);
    };
    auto so_sigma = sys.so_sigma;
    sys.diffusion = [so_sigma](const double* x, double* s) {
        s[0] = 0.0;
        s[1] = so_sigma(x[0], x[1]);
    };
    sys.drift_jacobian = [](const double* x, double* J) {
        J[0] = 0.0;
        J[1] = 1.0;
        J[2] = -(2 * x[0] * x[1] + 1);
        J[3] = -(x[0] * x[0] - 1);
    };
    sys.lyapunov = vdp_certificate(0.0);  // theta/eta filled per epsilon
    sys.classes = {{1, "O", ClassKind::Equilibrium, {0.0, 0.0}, 0, 0, 0}};
    return sys;
}

// ---------------------------------------------------------------------------
// Diode circuit, state (v, i): C dv = (i - f(v)) dt, L di = (E - R i - v) dt
// + noise on the i equation; f(v) = (v-E)^3 - (v-E).
// ---------------------------------------------------------------------------
struct DiodeParams {
    double L, C, R, E;
    double f(double v) const {
        const double u = v - E;
        return u * u * u - u;
    }
    double fp(double v) const {
        const double u = v - E;
        return 3 * u * u - 1;
    }
};

SystemSpec make_diode(const std::map<std::string, double>& params) {
    reject_unknown(params, {"L", "C", "R", "E"}, "diode");
    DiodeParams p{get_param(params, "L", "diode"), get_param(params, "C", "diode"),
                  get_param(params, "R", "diode"), get_param(params, "E", "diode")};
    if (p.L <= 0) bad_param("diode", "L must be > 0");
    if (p.C <= 0) bad_param("diode", "C must be > 0");
    if (p.R <= 0) bad_param("diode", "R must be > 0");
    if (p.E <= 0) bad_param("diode", "E must be > 0");

    SystemSpec sys;
    sys.name = "diode";
    sys.d = 2;
    sys.m = 1;
    sys.params = params;
    sys.drift = [p](const double* x, double* out) {
        const double v = x[0], i = x[1];
        out[0] = (i - p.f(v)) / p.C;
        out[1] = (p.E - p.R * i - v) / p.L;
    };
    sys.diffusion = [p](const double*, double* s) {
        s[0] = 0.0;
        s[1] = 1.0 / p.L;  // sigma(v,i) = 1 by default
    };
    sys.drift_jacobian = [p](const double* x, double* J) {
        J[0] = -p.fp(x[0]) / p.C;
        J[1] = 1.0 / p.C;
        J[2] = -1.0 / p.L;
        J[3] = -p.R / p.L;
    };

    LyapunovCertificate cert;  // V = L i^2 + C v^2
    cert.V = [p](const double* x) {
        return p.L * x[1] * x[1] + p.C * x[0] * x[0];
    };
    cert.grad = [p](const double* x, double* g) {
        g[0] = 2 * p.C * x[0];
        g[1] = 2 * p.L * x[1];
    };
    cert.hess = [p](const double*, double* h) {
        h[0] = 2 * p.C; h[1] = 0.0; h[2] = 0.0; h[3] = 2 * p.L;
    };
    cert.theta = p.L / 4;   // theta = L/(4 c1), eta = 16 c1/L with c1 = 1
    cert.eta = 16 / p.L;
    sys.lyapunov = cert;

    std::vector<EquivalenceClassSpec> cls;
    cls.push_back({1, "S", ClassKind::Equilibrium, {p.E, 0.0}, 0, 0, 0});
    if (p.R > 1.0) {
        const double s = std::sqrt(1.0 - 1.0 / p.R);
        cls.push_back({2, "A", ClassKind::Equilibrium,
                       {p.E + s, -s / p.R}, 0, 0, 0});
        cls.push_back({3, "B", ClassKind::Equilibrium,
                       {p.E - s, s / p.R}, 0, 0, 0});
    }
    sys.classes = std::move(cls);
    return sys;
}

// ---------------------------------------------------------------------------
// May-Leonard on Int R^3_+ with per-capita multiplicative noise.
// ---------------------------------------------------------------------------
SystemSpec make_mayleonard(const std::map<std::string, double>& params) {
    reject_unknown(params, {"alpha", "beta"}, "mayleonard");
    const double a = get_param(params, "alpha", "mayleonard");
    const double b = get_param(params, "beta", "mayleonard");
    if (!(a + b > -1.0 && a + b < 2.0)) {
        std::ostringstream os;
        os << "mayleonard: alpha+beta=" << a + b
           << " violates -1 < alpha+beta < 2";
        throw std::invalid_argument(os.str());
    }
    const double e = 1.0 / (1.0 + a + b);

    SystemSpec sys;
    sys.name = "mayleonard";
    sys.d = 3;
    sys.m = 3;
    sys.domain = Domain::PositiveOrthant;
    sys.params = params;
    sys.percap_drift = [a, b](const double* x, double* out) {
        out[0] = 1 - x[0] - a * x[1] - b * x[2];
        out[1] = 1 - b * x[0] - x[1] - a * x[2];
        out[2] = 1 - a * x[0] - b * x[1] - x[2];
    };
    sys.percap_sigma = [](const double*, double* s) { s[0] = s[1] = s[2] = 1.0; };
    auto percap = sys.percap_drift;
    sys.drift = [percap](const double* x, double* out) {
        percap(x, out);
        for (int i = 0; i < 3; ++i) out[i] *= x[i];
    };
    sys.diffusion = [](const double* x, double* s) {
        for (int i = 0; i < 9; ++i) s[i] = 0.0;
        s[0] = x[0];
        s[4] = x[1];
        s[8] = x[2];
    };
    sys.drift_jacobian = [a, b](const double* x, double* J) {
        const double r[3] = {1 - x[0] - a * x[1] - b * x[2],
                             1 - b * x[0] - x[1] - a * x[2],
                             1 - a * x[0] - b * x[1] - x[2]};
        const double A[9] = {1, a, b, b, 1, a, a, b, 1};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                J[3 * i + j] = (i == j ? r[i] : 0.0) - x[i] * A[3 * i + j];
    };

    LyapunovCertificate cert;  // V = sum x_i - e_i - e_i ln(x_i/e_i)
    cert.V = [e](const double* x) {
        double v = 0;
        for (int i = 0; i < 3; ++i) v += x[i] - e - e * std::log(x[i] / e);
        return v;
    };
    cert.grad = [e](const double* x, double* g) {
        for (int i = 0; i < 3; ++i) g[i] = (x[i] - e) / x[i];
    };
    cert.hess = [e](const double* x, double* h) {
        for (int i = 0; i < 9; ++i) h[i] = 0.0;
        for (int i = 0; i < 3; ++i) h[4 * i] = e / (x[i] * x[i]);
    };
    sys.lyapunov = cert;
    sys.classes = {{1, "E", ClassKind::Equilibrium, {e, e, e}, 0, 0, 0}};
    return sys;
}

// ---------------------------------------------------------------------------
// Figure-eight systems: b = Ham(H) - F(H) grad H with a variant-dependent F.
// ---------------------------------------------------------------------------
double quintic_step(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    return u * u * u * (10 + u * (-15 + 6 * u));
}

// Numerically robust derivative of F on the sin^2 band; closed form.
double f8_band(double s) {  // s in [0,1]
    if (s <= 0) return 0.0;
    const double q = std::sin(M_PI / s);
    return std::pow(s, 5) * q * q;
}

SystemSpec make_figure8(const std::map<std::string, double>& params) {
    reject_unknown(params, {"variant"}, "figure8");
    const double vraw = get_param(params, "variant", "figure8");
    const int variant = static_cast<int>(vraw);
    if (variant < 1 || variant > 4 || vraw != variant)
        bad_param("figure8", "variant must be an integer in {1,2,3,4}");

    SystemSpec sys;
    sys.name = "figure8";
    sys.d = 2;
    sys.m = 2;
    sys.params = params;
    auto H = [](const double* x) {
        return x[1] * x[1] / 2 + x[0] * x[0] * x[0] * x[0] / 4 -
               x[0] * x[0] / 2;
    };
    sys.hamiltonian = H;
    sys.drift = [H, variant](const double* x, double* out) {
        const double hx = x[0] * x[0] * x[0] - x[0];
        const double hy = x[1];
        const double F = figure8_damping(H(x), variant);
        out[0] = hy - F * hx;
        out[1] = -hx - F * hy;
    };
    sys.diffusion = [](const double*, double* s) {
        s[0] = 1.0; s[1] = 0.0; s[2] = 0.0; s[3] = 1.0;
    };

    LyapunovCertificate cert;  // V = H + 1/4 >= 0
    cert.V = [H](const double* x) { return H(x) + 0.25; };
    cert.grad = [](const double* x, double* g) {
        g[0] = x[0] * x[0] * x[0] - x[0];
        g[1] = x[1];
    };
    cert.hess = [](const double* x, double* h) {
        h[0] = 3 * x[0] * x[0] - 1; h[1] = 0.0; h[2] = 0.0; h[3] = 1.0;
    };
    sys.lyapunov = cert;
    sys.classes = {
        {1, "P+", ClassKind::Equilibrium, {1.0, 0.0}, 0, 0, 0},
        {2, "P-", ClassKind::Equilibrium, {-1.0, 0.0}, 0, 0, 0},
        {3, "O", ClassKind::Equilibrium, {0.0, 0.0}, 0, 0, 0},
    };
    return sys;
}

}  // namespace

double figure8_gap_function(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 2.0) return 1.0;
    if (s > 1.0) return quintic_step(s - 1.0);
    // zero intervals: I_1 = [5/8, 1], I_n = [(5/8) 2^(1-n), (7/8) 2^(1-n)].
    if (s >= 0.625) return 0.0;
    // find the gap (b_{n+1}, a_n) containing s
    double a = 0.625, scale = 1.0;
    while (true) {
        const double b_next = 0.4375 * scale;  // (7/8) * 2^-1 * scale
        if (s > b_next) {
            // bump on (b_next, a), flat-zero at both ends
            const double u = (s - b_next) / (a - b_next);
            const double env = std::exp(-1.0 / a);  // superpolynomial decay
            return env * std::exp(4.0 - 1.0 / (u * (1.0 - u)));
        }
        const double a_next = 0.3125 * scale;
        if (s >= a_next) return 0.0;  // inside I_{n+1}
        scale *= 0.5;
        a = a_next;
        if (scale < 1e-30) return 0.0;  // below resolution; G underflows anyway
    }
}

double figure8_damping(double s, int variant) {
    const double sgn = (variant % 2 == 0) ? 1.0 : -1.0;
    if (s < 0.0) return sgn * std::abs(s) * std::abs(s) * std::abs(s);
    if (variant <= 2) {
        if (s <= 1.0) return f8_band(s);
        if (s < 2.0) return quintic_step(s - 1.0);
        return 1.0;
    }
    return figure8_gap_function(s);
}

LyapunovCertificate vdp_certificate(double eps) {
    const double r5 = std::sqrt(5.0);
    LyapunovCertificate cert;
    cert.V = [r5](const double* x) {
        const double w = x[1] + x[0] * x[0] * x[0] / 3 - (r5 + 1) / 2 * x[0];
        return (r5 - 1) / 24 * std::pow(x[0], 4) + 0.5 * w * w;
    };
    cert.grad = [r5](const double* x, double* g) {
        const double y1 = x[0], y2 = x[1];
        g[0] = std::pow(y1, 5) / 3 - (3 * r5 + 5) / 6 * y1 * y1 * y1 +
               y1 * y1 * y2 + (r5 + 3) / 2 * y1 - (r5 + 1) / 2 * y2;
        g[1] = y1 * y1 * y1 / 3 - (r5 + 1) / 2 * y1 + y2;
    };
    cert.hess = [r5](const double* x, double* h) {
        const double y1 = x[0], y2 = x[1];
        h[0] = 5.0 / 3 * std::pow(y1, 4) - (3 * r5 + 5) / 2 * y1 * y1 +
               2 * y1 * y2 + (r5 + 3) / 2;
        h[1] = y1 * y1 - (r5 + 1) / 2;
        h[2] = h[1];
        h[3] = 1.0;
    };
    if (eps > 0) {
        cert.theta = eps / 2;
        cert.eta = 8.0 / eps;
    }
    return cert;
}

SystemSpec build_vdp(std::function<double(double, double)> sigma) {
    return make_vdp(std::move(sigma));
}

SystemSpec diode_second_order(const std::map<std::string, double>& params) {
    reject_unknown(params, {"L", "C", "R", "E"}, "diode");
    DiodeParams p{get_param(params, "L", "diode"), get_param(params, "C", "diode"),
                  get_param(params, "R", "diode"), get_param(params, "E", "diode")};
    SystemSpec sys;
    sys.name = "diode_vw";
    sys.d = 2;
    sys.m = 1;
    sys.second_order = true;
    sys.params = params;
    sys.so_drift = [p](double v, double w) {
        return -((p.fp(v) + p.C * p.R / p.L) * w + p.R / p.L * p.f(v) +
                 (v - p.E) / p.L) / p.C;
    };
    sys.so_sigma = [p](double, double) { return 1.0 / (p.L * p.C); };
    sys.so_drift_grad = [p](double v, double w, double* g) {
        const double u = v - p.E;
        g[0] = -(6 * u * w + p.R / p.L * p.fp(v) + 1.0 / p.L) / p.C;
        g[1] = -(p.fp(v) + p.C * p.R / p.L) / p.C;
    };
    sys.drift = [p, so = sys.so_drift](const double* x, double* out) {
        out[0] = x[1];
        out[1] = so(x[0], x[1]);
    };
    sys.diffusion = [p](const double*, double* s) {
        s[0] = 0.0;
        s[1] = 1.0 / (p.L * p.C);
    };
    return sys;
}

SystemSpec build_system(const std::string& name,
                        const std::map<std::string, double>& params) {
    if (name == "example41") {
        reject_unknown(params, {}, "example41");
        return make_cycle_system(
            "example41", 1.0,
            {{1, "K1", ClassKind::Equilibrium, {-2.0, 0.0}, 0, 0, 0},
             {2, "K2", ClassKind::LevelCycle, {}, -1.0, 0, 0},
             {3, "K3", ClassKind::Equilibrium, {1.0, 0.0}, 0, 0, 0},
             {4, "K4", ClassKind::Equilibrium, {0.0, 0.0}, 0, 0, 0}});
    }
    if (name == "example42") {
        reject_unknown(params, {}, "example42");
        return make_cycle_system(
            "example42", -1.0,
            {{1, "K1", ClassKind::Equilibrium, {-1.0, 0.0}, 0, 0, 0},
             {2, "K2", ClassKind::LevelCycle, {}, -1.0, 0, 0},
             {3, "K3", ClassKind::Equilibrium, {0.0, 0.0}, 0, 0, 0},
             {4, "K4", ClassKind::Equilibrium, {2.0, 0.0}, 0, 0, 0}});
    }
    if (name == "vdp") {
        reject_unknown(params, {}, "vdp");
        return make_vdp([](double, double) { return 1.0; });
    }
    if (name == "diode") return make_diode(params);
    if (name == "mayleonard") return make_mayleonard(params);
    if (name == "figure8") return make_figure8(params);
    throw std::invalid_argument("unknown system '" + name +
                                "'; known: example41, example42, vdp, diode, "
                                "mayleonard, figure8");
}

std::vector<std::string> model_names() {
    return {"example41", "example42", "vdp", "diode", "mayleonard", "figure8"};
}

}  // namespace qplab::models
