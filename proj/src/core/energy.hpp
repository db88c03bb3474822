#pragma once

#include <map>
#include <optional>
#include <vector>

#include "conv.hpp"
#include "diffusion.hpp"
#include "grid.hpp"
#include "kernel.hpp"

namespace aggdiff {

// Per-snapshot diagnostics of a simulated trajectory.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double linf = 0.0;
    std::map<double, double> lp;  // p -> ||u||_p
    double S = 0.0;               // entropy
    double W = 0.0;               // interaction energy
    double F = 0.0;               // free energy S - W
    double I = 0.0;               // second moment
    double D = 0.0;               // entropy production rate
    double dt_used = 0.0;
};

// S(u) = int Phi(u) dx.
double entropy(const GridField& u, const EntropyDensity& phi);

// W(u) = 1/2 int int u K u.
double interaction(const GridField& u, const ConvOperator& conv);

double free_energy(const GridField& u, const EntropyDensity& phi, const ConvOperator& conv);

// I(u) = int |x|^2 u dx (origin at the domain center).
double second_moment(const GridField& u);

// Entropy production D = int u |grad h(u) - grad K*u|^2 dx, assembled from
// face differences. Cells below the vacuum floor contribute nothing.
double entropy_production(const GridField& u, const EntropyDensity& phi, const ConvOperator& conv,
                          double vacuum_floor = 1e-14);

// int int u(x) u(y) |x-y|^{-alpha} / (||u||_1^{2-m*} ||u||_{m*}^{m*}),
// m* = 1 + alpha/d > 1. Uses a unit-strength power-law convolution operator.
double hls_ratio(const GridField& u, const ConvOperator& power_conv, double alpha, double m_star);

struct CmstarEstimate {
    double value = 0.0;
    double best_shape = 0.0;  // exponent of the (1 - r^2)_+^beta extremal candidate
    double best_scale = 0.0;
};

// Lower-bound estimate of the best constant C_{m*} by coordinate ascent over
// radial profile families ((1 - (r/s)^2)_+^beta and exp(-(r/s)^p)) on the
// given radial grid.
CmstarEstimate estimate_cmstar(double alpha, int d, int nr = 512, double radius = 4.0);

// Pinned estimate for configurations used by the built-in experiments; falls
// back to a fresh coordinate-ascent run for unknown (alpha, d).
double cmstar_constant(double alpha, int d);

enum class MassRegime { PowerLaw, Logarithmic, Infinite };

struct CriticalMassPrediction {
    double m_star = 1.0;
    MassRegime regime = MassRegime::Infinite;
    double mass = 0.0;  // +inf encoded as infinity()
    double kernel_c = 0.0;
    double entropy_limit = 0.0;  // L
    double cmstar = 0.0;
    Criticality criticality = Criticality::Subcritical;
};

// Critical-mass prediction from the kernel singularity (c, m*), the entropy
// growth limit L, and the HLS constant:
//   m* > 1:  M_c = (2 L / (C_{m*} c))^{1/(2-m*)}
//   m* = 1:  M_c = 2 d L / c
// Subcritical diffusion, c = 0, or L = inf give the infinite regime.
CriticalMassPrediction critical_mass(const KernelSpec& kernel, const DiffusionSpec& diff);

}  // namespace aggdiff
