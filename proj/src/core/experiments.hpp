#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "energy.hpp"
#include "solver.hpp"

namespace aggdiff {

// Concentrating family h_lambda(x) = lambda^d h*(lambda mu |x|) with
// mu = (||h*||_1 / M)^{1/d}, so every member has mass M. The default base
// profile is the standard smooth bump exp(-1/(1 - r^2)) on r < 1.
struct BlowupCandidateSpec {
    double mass = 1.0;
    double lambda = 1.0;
    std::function<double(double)> base_profile;  // radial, supported in [0, base_radius)
    double base_radius = 1.0;
};

GridField make_blowup_candidate(const BlowupCandidateSpec& spec,
                                std::shared_ptr<const Grid> grid);

// Measured constants of the virial inequality
//   dI/dt <= 2d(m-1) F(u0) + C(M, C1),  C(M, C1) = 2d C(M) + C1 M^2,
// with m the effective tail exponent of A', C1 the (B2) fit
// max_+ (r k'(r) + alpha k(r)), and C(M) = M sup_{(0,R]} A(z)/z for an R
// found from the A <= (m-1) Phi tail scan.
struct VirialThreshold {
    double m = 1.0;
    double alpha = 0.0;
    double c1 = 0.0;
    double cm = 0.0;
    double r_cut = 0.0;
    bool b4_holds = false;  // informational; the threshold is used regardless
    double c_total = 0.0;   // C(M, C1)
    double threshold = 0.0; // C(M, C1) / (2d(m-1)); inf when m = 1
};

VirialThreshold virial_threshold(const SimConfig& cfg, double mass);

struct BlowupSearchResult {
    bool success = false;
    GridField field;
    double lambda = 0.0;
    double achieved_f = 0.0;
    VirialThreshold vt;
    std::string message;
};

// Ladder search over lambda = 1, 2, 4, ... until F(h_lambda) drops below the
// virial threshold; stops when the bump support falls under a few cells.
BlowupSearchResult find_blowup_initial_data(double mass, const SimConfig& cfg);
// Largest lambda whose support still spans at least min_cells cells; used by
// the sweep to probe with the most concentrated representable data.
GridField most_concentrated_candidate(double mass, const SimConfig& cfg, int min_cells = 6);

struct ProbeResult {
    double mass = 0.0;
    RunStatus status = RunStatus::Error;
    double t_star = 0.0;
    double linf_max = 0.0;
    // Completed run whose L^inf was still strictly increasing across the last
    // records and ended above its initial value: counted on the blow-up side
    // of the bisection (the fixed horizon cut it off mid-collapse).
    bool concentrating = false;
};

struct SweepResult {
    double m_lo = 0.0, m_hi = 0.0;  // bracket: completed at m_lo, blow-up at m_hi
    bool bracket_valid = false;
    bool no_finite_bracket = false;  // every probe completed (e.g. M_c = inf)
    bool protocol_error = false;
    std::vector<ProbeResult> probes;
    CriticalMassPrediction predicted;
    std::string message;
};

// Outcome bisection on the probe mass. Endpoints must separate (completed
// below, blow-up above); non-monotone outcomes across the collected probes
// are a protocol error, never silently accepted.
SweepResult bisect_critical_mass(const SimConfig& cfg, double m_lo, double m_hi, int budget,
                                 double tolerance);

struct VirialReport {
    double max_rel_residual = 0.0;
    std::vector<double> residuals;       // per interior record
    double boundary_term_max = 0.0;      // sup of the recorded boundary flux term
    bool boundary_sign_ok = true;
    int records_used = 0;
};

// Centered-difference dI/dt against 2d int A(u) + int int (x-y).grad K u u
// minus the boundary term, over the interior records of a trajectory run
// with cfg.record_virial set.
VirialReport virial_check(const RunOutcome& run, const SimConfig& cfg);

// Exact porous-medium self-similar solution of u_t = Delta u^m:
//   u(r, t) = t^{-d beta} (C - kappa r^2 t^{-2 beta})_+^{1/(m-1)},
//   beta = 1/(d(m-1)+2), kappa = (m-1) beta / (2m).
double barenblatt_profile(double m, int d, double c, double r, double t);

struct ConvergenceRow {
    int n = 0;
    double l1_error = 0.0;
    double mass_error = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;
    double t0 = 0.0, t1 = 0.0;
};

// K = 0, A = u^m run from the exact profile at t0 to t1 on a ladder of radial
// resolutions; L^1 errors against the closed form and the fitted order.
ConvergenceResult barenblatt_convergence(double m, const std::vector<int>& resolutions, int d = 2,
                                         double radius = 6.0, double t0 = 1.0, double t1 = 2.0,
                                         double c = 1.0);

}  // namespace aggdiff
