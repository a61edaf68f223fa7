#pragma once

#include "qplab/system.hpp"

namespace qplab::models {

/// Builds one of the six built-in systems by name:
///   example41, example42  — planar polynomial systems with a stable limit
///                           cycle {H = -1}; additive identity noise
///   vdp                   — van der Pol oscillator, degenerate noise
///   diode                 — single diode circuit in (v, i) coordinates
///                           (params L, C, R, E all > 0)
///   mayleonard            — three-species competition on the open orthant
///                           (params alpha, beta with -1 < alpha+beta < 2)
///   figure8               — double-well Hamiltonian with level-dependent
///                           damping (param variant in {1,2,3,4})
/// Unknown names and out-of-range parameters throw std::invalid_argument
/// naming the violated constraint.
SystemSpec build_system(const std::string& name,
                        const std::map<std::string, double>& params = {});

/// Registered model names, in registry order.
std::vector<std::string> model_names();

/// van der Pol with a caller-supplied noise coefficient sigma(x, v) > 0
/// (growth-checked by the verify module, not here).
SystemSpec build_vdp(std::function<double(double, double)> sigma);

/// The diode circuit transformed to the (v, w) chart, a genuine second-order
/// system; used by the action module's chart-invariance machinery.
SystemSpec diode_second_order(const std::map<std::string, double>& params);

/// Lyapunov certificate for the van der Pol system at noise level eps
/// (theta = eps/2, eta = 8/eps).
LyapunovCertificate vdp_certificate(double eps);

/// Cutoff-based zero-set function used by the figure-eight variants 3/4:
/// vanishes exactly on [5/8, 1] and on [(5/8)*2^(1-n), (7/8)*2^(1-n)] for
/// n >= 2, is positive elsewhere on (0, inf), and is identically 1 on
/// [2, inf). One admissible instance of the construction; the intervals
/// satisfy b_{n+1} < a_n and b_n -> 0 with b_1 = 1.
double figure8_gap_function(double s);

/// F_variant(s) for the figure-eight family.
double figure8_damping(double s, int variant);

}  // namespace qplab::models
