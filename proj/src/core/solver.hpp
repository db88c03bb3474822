#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conv.hpp"
#include "diffusion.hpp"
#include "energy.hpp"
#include "grid.hpp"
#include "kernel.hpp"

namespace aggdiff {

struct BlowupParams {
    double umax_multiplier = 10.0;
    std::vector<double> k_rel = {2.0, 4.0, 8.0};  // thresholds as multiples of linf(u0)
    int window = 4;                                // consecutive records of tail-norm growth
    double q_override = 0.0;                       // 0 = derive (2-m)/(2-m*) from the specs
};

struct SimConfig {
    KernelSpec kernel = KernelSpec::none(2);
    DiffusionSpec diffusion = DiffusionSpec::power_law(2.0);
    double epsilon = 0.0;  // parabolic regularization strength (0 = degenerate scheme)
    std::shared_ptr<const Grid> grid;
    double t_end = 1.0;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double cfl_safety = 0.4;
    BlowupParams blowup;
    int cadence_steps = 50;
    std::vector<double> p_list = {2.0};
    bool check_dissipation = false;
    double dissipation_slack_c = 1e3;  // C in the per-step slack 1e-8 (1+|F|) + C dt^2
    bool record_virial = false;        // also record int A(u), the virial
                                       // interaction term, and the boundary term
};

enum class RunStatus { Completed, NumericalBlowup, DtFloor, Error };

struct TrajectoryPoint {
    DiagnosticsRecord diag;
    std::vector<double> tail_norms;  // ||(u-k)_+||_q for the configured k-list
    // Populated when SimConfig::record_virial is set.
    double int_a = 0.0;          // int A(u) dx
    double virial_w = 0.0;       // int int (x-y).grad K(x-y) u(x) u(y)
    double boundary_term = 0.0;  // oint A(u) x.nu dS
};

struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    double t_star = std::numeric_limits<double>::quiet_NaN();  // blow-up time estimate
    double t_final = 0.0;
    long steps = 0;
    long dissipation_violations = 0;
    double tail_exponent_q = 0.0;
    std::vector<TrajectoryPoint> trajectory;
    GridField final_field;
    std::string message;
};

// Face-centered velocity v = grad(K * u) plus the cell potential it came
// from. Boundary faces carry zero normal velocity; together with the zero
// boundary diffusive flux this enforces the no-flux condition on the total
// flux. Cartesian: vx has (nx+1) x ny entries, vy nx x (ny+1). Radial: vr has
// nr+1 entries with vr[0] the r = 0 symmetry face.
struct FaceVelocity {
    std::vector<double> vx, vy;  // cartesian
    std::vector<double> vr;      // radial
    std::vector<double> potential;
    double max_abs = 0.0;
};

FaceVelocity velocity(const GridField& u, const ConvOperator& conv);

// One conservative finite-volume update: upwind advection + centered
// two-point flux for the nonlinear diffusion, explicit in time. Conserves
// mass exactly (telescoping) and preserves nonnegativity under the adaptive
// dt bound; a negative cell aborts the run.
GridField step(const GridField& u, double dt, const FaceVelocity& v, const SimConfig& cfg);

// dt = safety * min(dx^2 / (2 dim max_face a'), dx / max |v|), clamped to
// [dt_min, dt_max].
double adaptive_dt(const GridField& u, const FaceVelocity& v, const SimConfig& cfg);

// Blow-up proxy: the L^inf threshold must have fired AND the continuation
// tail norm ||(u-k)_+||_q for the largest k must be increasing across the
// last window of records.
RunStatus detect_blowup(const std::vector<TrajectoryPoint>& traj, const BlowupParams& params,
                        double linf0, double* t_star);

// Largest fitted tail exponent m with liminf A'(z) z^{1-m} > 0, clamped to
// [1, m*]; used for the continuation-criterion exponent q = (2-m)/(2-m*).
double continuation_exponent(const DiffusionSpec& diff, double m_star);

RunOutcome run(const SimConfig& cfg, const GridField& u0);
// Variant reusing a prebuilt convolution operator for cfg.grid/cfg.kernel.
RunOutcome run(const SimConfig& cfg, const GridField& u0, const ConvOperator& conv);

}  // namespace aggdiff
