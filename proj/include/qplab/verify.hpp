#pragma once

#include "qplab/system.hpp"

namespace qplab::verify {

struct Box {
    StateVector lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
};

struct VerificationReport {
    std::string check;
    std::string region;
    long samples = 0;
    double margin = 0.0;      // signed; >= 0 means satisfied
    double statistic = 0.0;   // check-specific scalar (L_R, smallest C/c1, ...)
    StateVector witness;      // location of the worst margin
    bool pass = false;

    std::string to_json() const;
    std::string to_text() const;
};

/// Deterministic low-discrepancy samples (Halton) in a box; the first k
/// points of sample(n) equal sample(k) for k <= n, so refining the sample
/// count can only worsen margins. skip offsets the sequence.
std::vector<StateVector> halton_box(const Box& region, long n, long skip = 0);

/// J(x) of the Lyapunov inequality: <b, grad V> + (theta/2) Tr(sigma* H V
/// sigma) + |sigma* grad V|^2 / (eta V). Exposed for model-specific bound
/// comparisons in tests.
double lyapunov_J(const SystemSpec& sys, const LyapunovCertificate& cert,
                  double theta, double eta, const double* x);

/// Generator L^eps V = <b, grad V> + (eps/2) Tr(sigma* H V sigma).
double generator_LV(const SystemSpec& sys, const LyapunovCertificate& cert,
                    double eps, const double* x);

/// Local monotonicity: empirical L_R over pairs |x-y| <= eps0 in the region.
/// Passes when the statistic is finite; margin = cap - L_R against the
/// report's stated cap.
VerificationReport check_monotonicity(const SystemSpec& sys, const Box& region,
                                      double eps0, long samples,
                                      double cap = 1e6);

/// Both Lyapunov inequalities over the region: J <= C (1 + V) and
/// Tr(sigma* H V sigma) >= -M - C V. If cert.C == 0 the report's statistic
/// is the smallest C making the first inequality hold on the sample.
VerificationReport check_lyapunov(const SystemSpec& sys,
                                  const LyapunovCertificate& cert,
                                  const Box& region, long samples,
                                  double theta = 0.0, double eta = 0.0);

/// Dissipativity: max of L^eps V over the shell r1 <= |x| <= r2 (centered at
/// `center` when given); the statistic is the empirical -gamma.
VerificationReport check_dissipativity(const SystemSpec& sys,
                                       const LyapunovCertificate& cert,
                                       double eps, double r1, double r2,
                                       long samples,
                                       const StateVector& center = {});

/// Eigenvalues of the May-Leonard quadratic form (closed form
/// {1 + a+b, 1 - (a+b)/2 double}); passes iff all positive.
VerificationReport check_positive_definite(double alpha, double beta);

/// Smallest c1 with ||sigma(x)||^2 <= c1 * bound(x) over the region.
VerificationReport check_growth_bound(const SystemSpec& sys,
                                      const ScalarFn& bound, const Box& region,
                                      long samples);

/// The model's documented growth-bound polynomial (throws when the paper
/// fixes none for the model).
ScalarFn default_growth_poly(const SystemSpec& sys);

}  // namespace qplab::verify
