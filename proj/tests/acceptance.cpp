// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "io/config.hpp"
#include "io/output.hpp"

using namespace aggdiff;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("criterion %2d: %s - %s (%s)\n", criterion, pass ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

RunConfig pks_fixture(int n, double mass, const std::string& lambda_mode) {
    RunConfig c;
    c.kernel_type = "logarithmic";
    c.kernel_c = 1.0 / (2.0 * M_PI);
    c.dim = 2;
    c.diffusion_type = "saturated_linear";
    c.grid_type = "cartesian2d";
    c.n = n;
    c.extent = 8.0;
    c.t_end = 10.0;
    c.mass = mass;
    c.lambda_mode = lambda_mode;
    c.snapshots = false;
    return c;
}

SimConfig supercritical_fixture(int nr) {
    SimConfig cfg;
    cfg.kernel = KernelSpec::newtonian(3);
    cfg.diffusion = DiffusionSpec::power_law(1.1);
    cfg.grid = std::make_shared<Grid>(Grid::radial(3, nr, 2.0));
    cfg.t_end = 1e-3;
    cfg.cadence_steps = 10;
    return cfg;
}

// ---- criterion 1 -------------------------------------------------------

void criterion_1() {
    const double t0 = now_seconds();
    const bool ok = critical_exponent(KernelSpec::newtonian(3)) == 4.0 / 3.0 &&
                    critical_exponent(KernelSpec::newtonian(4)) == 1.5 &&
                    critical_exponent(KernelSpec::logarithmic(1.0)) == 1.0 &&
                    critical_exponent(KernelSpec::gaussian(1.0, 2)) == 1.0;
    const double dt = now_seconds() - t0;
    report(1, ok && dt < 1.0, "critical exponent exactness", "elapsed " + fmt(dt) + " s");
}

// ---- criterion 2 -------------------------------------------------------

void criterion_2() {
    const CriticalMassPrediction pred =
        critical_mass(KernelSpec::logarithmic(1.0 / (2.0 * M_PI)), DiffusionSpec::saturated_linear());
    const double rel = std::abs(pred.mass - 8.0 * M_PI) / (8.0 * M_PI);
    report(2, rel <= 1e-6, "classical 2D chemotaxis critical mass 8 pi",
           "relative error " + fmt(rel));
}

// ---- criterion 3 -------------------------------------------------------

void criterion_3() {
    const double t0 = now_seconds();
    double worst = 0.0;
    for (double m : {4.0 / 3.0, 1.5, 2.0, 3.0}) {
        EntropyDensity phi(DiffusionSpec::power_law(m));
        for (int i = 0; i <= 24; ++i) {
            const double z = std::pow(10.0, -3.0 + 0.25 * i);
            const double exact = (std::pow(z, m) - m * z) / (m - 1.0);
            const double got = phi.phi_quadrature(z);
            // Relative to the analytic value, guarded where it crosses zero.
            const double denom = std::max(std::abs(exact), 1e-3 * (std::pow(z, m) + m * z));
            worst = std::max(worst, std::abs(got - exact) / denom);
        }
    }
    const double dt = now_seconds() - t0;
    report(3, worst <= 1e-8 && dt < 10.0, "entropy density quadrature oracle",
           "worst relative error " + fmt(worst) + ", elapsed " + fmt(dt) + " s");
}

// ---- criteria 4 and 5 --------------------------------------------------

void criteria_4_and_5() {
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    long total_violations = 0;
    double worst_drift = 0.0, worst_min = 0.0;
    int runs = 0;
    bool all_completed = true;

    for (int trial = 0; trial < 12; ++trial) {
        SimConfig cfg;
        const bool radial = trial % 3 == 2;
        if (radial) {
            cfg.grid = std::make_shared<Grid>(Grid::radial(3, 48 + 16 * (trial % 2), 2.0));
            cfg.kernel = uni(rng) < 0.5 ? KernelSpec::newtonian(3) : KernelSpec::none(3);
        } else {
            const int n = 24 + 8 * (trial % 3);
            cfg.grid = std::make_shared<Grid>(Grid::cartesian2d(n, n, 4.0));
            const double pick = uni(rng);
            if (pick < 0.4) cfg.kernel = KernelSpec::gaussian(0.3 + 0.5 * uni(rng), 2);
            else if (pick < 0.7) cfg.kernel = KernelSpec::logarithmic(0.05 + 0.1 * uni(rng));
            else cfg.kernel = KernelSpec::none(2);
        }
        const double pick = uni(rng);
        if (pick < 0.5) cfg.diffusion = DiffusionSpec::power_law(1.5 + 1.5 * uni(rng));
        else if (pick < 0.75) cfg.diffusion = DiffusionSpec::saturated_linear();
        else cfg.diffusion = DiffusionSpec::power_plus_linear(2.0, uni(rng));
        cfg.t_end = 0.01 + 0.01 * uni(rng);
        cfg.check_dissipation = true;

        GridField u0(cfg.grid, 0.0);
        for (std::size_t i = 0; i < u0.size(); ++i) {
            const double r2 = cfg.grid->center_radius2(i);
            u0[i] = std::exp(-r2 / (0.2 + 0.4 * uni(rng))) + 0.1 * uni(rng);
        }
        u0.normalize_mass(0.5 + 1.5 * uni(rng));
        const double m0 = u0.mass();

        const RunOutcome out = run(cfg, u0);
        ++runs;
        if (out.status != RunStatus::Completed) all_completed = false;
        total_violations += out.dissipation_violations;
        const double per_1e4 = std::max(1.0, out.steps / 1e4);
        worst_drift = std::max(worst_drift,
                               std::abs(out.final_field.mass() - m0) / (m0 * per_1e4));
        worst_min = std::min(worst_min, out.final_field.min_value());
    }

    report(4, all_completed && runs >= 10 && worst_drift <= 1e-12 && worst_min >= 0.0,
           "conservation and positivity over random configs",
           std::to_string(runs) + " runs, worst drift " + fmt(worst_drift) + ", min " +
               fmt(worst_min));

    // Heat-only: D against -dF/dt mid-run.
    SimConfig heat;
    heat.kernel = KernelSpec::none(2);
    heat.diffusion = DiffusionSpec::power_law(2.0);
    heat.grid = std::make_shared<Grid>(Grid::radial(2, 96, 2.0));
    heat.t_end = 2e-3;
    heat.cadence_steps = 1;
    heat.check_dissipation = true;
    GridField h0(heat.grid, 0.0);
    for (int i = 0; i < heat.grid->nr(); ++i) {
        const double r = heat.grid->r_center(i);
        h0[i] = 0.5 + std::exp(-4.0 * r * r);
    }
    const RunOutcome hout = run(heat, h0);
    double worst_rel = 0.0;
    int compared = 0;
    for (std::size_t k = 3; k + 3 < hout.trajectory.size(); k += 5) {
        const auto& a = hout.trajectory[k];
        const auto& b = hout.trajectory[k + 1];
        const double dfdt = (b.diag.F - a.diag.F) / (b.diag.t - a.diag.t);
        const double dmid = 0.5 * (a.diag.D + b.diag.D);
        worst_rel = std::max(worst_rel, std::abs(dmid + dfdt) / std::abs(dfdt));
        ++compared;
    }
    report(5,
           total_violations == 0 && hout.dissipation_violations == 0 && compared > 5 &&
               worst_rel <= 0.05,
           "free-energy dissipation",
           std::to_string(total_violations) + " violations, heat-only |D + dF/dt|/|dF/dt| max " +
               fmt(worst_rel));
}

// ---- criterion 6 -------------------------------------------------------

void criterion_6() {
    const double t0 = now_seconds();
    const ConvergenceResult res = barenblatt_convergence(2.0, {64, 128, 256}, 2, 6.0, 1.0, 2.0);
    const double dt = now_seconds() - t0;
    const bool decreasing = res.rows.size() == 3 && res.rows[1].l1_error < res.rows[0].l1_error &&
                            res.rows[2].l1_error < res.rows[1].l1_error;
    report(6, decreasing && res.fitted_order >= 0.8 && dt < 300.0, "Barenblatt convergence",
           "order " + fmt(res.fitted_order) + ", elapsed " + fmt(dt) + " s");
}

// ---- criterion 7 -------------------------------------------------------

void criterion_7() {
    // Heat-only virial identity.
    SimConfig heat;
    heat.kernel = KernelSpec::none(2);
    heat.diffusion = DiffusionSpec::power_law(2.0);
    heat.grid = std::make_shared<Grid>(Grid::radial(2, 96, 2.0));
    heat.t_end = 5e-3;
    heat.cadence_steps = 5;
    heat.record_virial = true;
    GridField h0(heat.grid, 0.0);
    for (int i = 0; i < heat.grid->nr(); ++i) {
        const double r = heat.grid->r_center(i);
        h0[i] = std::exp(-4.0 * r * r);
    }
    h0.normalize_mass(1.0);
    const RunOutcome hout = run(heat, h0);
    const VirialReport hrep = virial_check(hout, heat);

    // Power-kernel homogeneity on operator weights: (x-y).grad K = -alpha K,
    // alpha = 1 for the Newtonian kernel in d = 3.
    auto grid = std::make_shared<Grid>(Grid::radial(3, 64, 1.5));
    const KernelSpec kernel = KernelSpec::newtonian(3);
    auto conv_k = ConvOperator::build(grid, kernel);
    auto conv_v =
        ConvOperator::build_profile(grid, [kernel](double s) { return s * kernel.eval(s).kp; });
    double worst_hom = 0.0;
    for (std::size_t i = 0; i < 64; i += 3)
        for (std::size_t j = 0; j < 64; j += 3) {
            const double wk = conv_k.weight(i, j);
            worst_hom = std::max(worst_hom, std::abs(conv_v.weight(i, j) + wk) /
                                                std::max(std::abs(wk), 1e-300));
        }

    // Supercritical fixture: recorded identity parts satisfy the inequality
    // dI/dt <= 2d(m-1) F + C along the smooth window.
    SimConfig sup = supercritical_fixture(256);
    sup.record_virial = true;
    const double mass = 100.0;
    const BlowupSearchResult search = find_blowup_initial_data(mass, sup);
    bool inequality_ok = search.success;
    std::string sup_detail = "search failed";
    if (search.success) {
        const RunOutcome sout = run(sup, search.field);
        const VirialThreshold vt = search.vt;
        const int d = 3;
        int used = 0;
        for (const TrajectoryPoint& p : sout.trajectory) {
            if (p.diag.linf > 2.0 * sout.trajectory.front().diag.linf) break;  // smooth window
            const double lhs = 2.0 * d * p.int_a + p.virial_w - p.boundary_term;
            const double rhs = 2.0 * d * (vt.m - 1.0) * p.diag.F + vt.c_total;
            if (!(lhs <= rhs + 1e-6 * (std::abs(lhs) + std::abs(rhs)))) inequality_ok = false;
            ++used;
        }
        if (used == 0) inequality_ok = false;
        sup_detail = std::to_string(used) + " supercritical records";
    }

    report(7, hrep.max_rel_residual <= 0.02 && worst_hom <= 1e-10 && inequality_ok,
           "virial identity",
           "heat residual " + fmt(hrep.max_rel_residual) + ", homogeneity " + fmt(worst_hom) +
               ", " + sup_detail);
}

// ---- criterion 8 -------------------------------------------------------

void criterion_8() {
    const double t0 = now_seconds();
    const double mc = 8.0 * M_PI;

    RunConfig sub_rc = pks_fixture(128, 0.5 * mc, "auto_spread");
    SimConfig sub = to_sim_config(sub_rc);
    const GridField sub0 = make_initial_data(sub_rc, sub);
    const RunOutcome sub_out = run(sub, sub0);
    double linf_max = 0.0;
    for (const TrajectoryPoint& p : sub_out.trajectory)
        linf_max = std::max(linf_max, p.diag.linf);
    const bool sub_ok =
        sub_out.status == RunStatus::Completed && linf_max <= 3.0 * sub0.linf();

    RunConfig sup_rc = pks_fixture(128, 1.5 * mc, "auto_concentrated");
    SimConfig sup = to_sim_config(sup_rc);
    const GridField sup0 = make_initial_data(sup_rc, sup);
    const RunOutcome sup_out = run(sup, sup0);
    const bool sup_ok = sup_out.status == RunStatus::NumericalBlowup;

    const double dt = now_seconds() - t0;
    report(8, sub_ok && sup_ok && dt < 900.0, "2D chemotaxis dichotomy at 128^2",
           "subcritical sup/initial " + fmt(linf_max / sub0.linf()) + ", supercritical " +
               status_name(sup_out.status) + " t* " + fmt(sup_out.t_star) + ", elapsed " +
               fmt(dt) + " s");
}

// ---- criterion 9 -------------------------------------------------------

double sweep_center(int n, bool* valid, double* width) {
    const double mc = 8.0 * M_PI;
    RunConfig rc = pks_fixture(n, 1.0, "auto_concentrated");
    SimConfig sim = to_sim_config(rc);
    const SweepResult res = bisect_critical_mass(sim, 0.5 * mc, 1.5 * mc, 12, 0.1 * mc);
    *valid = res.bracket_valid;
    *width = res.m_hi - res.m_lo;
    return 0.5 * (res.m_lo + res.m_hi);
}

void criterion_9() {
    const double mc = 8.0 * M_PI;
    bool v64 = false, v128 = false;
    double w64 = 0.0, w128 = 0.0;
    const double c64 = sweep_center(64, &v64, &w64);
    const double c128 = sweep_center(128, &v128, &w128);
    const bool overlap = v128 && w128 <= 0.1 * mc + 1e-9 &&
                         c128 + 0.5 * w128 >= 0.8 * mc && c128 - 0.5 * w128 <= 1.2 * mc;
    const bool trend = v64 && std::abs(c128 - mc) <= std::abs(c64 - mc) + 0.1;
    report(9, overlap && trend, "empirical vs predicted critical mass",
           "center 64^2 " + fmt(c64) + ", center 128^2 " + fmt(c128) + " (8 pi = " + fmt(mc) +
               "), width " + fmt(w128));
}

// ---- criterion 10 ------------------------------------------------------

void criterion_10() {
    const double alpha = 1.0, m_star = 4.0 / 3.0;
    const double pinned = cmstar_constant(alpha, 3);
    auto grid = std::make_shared<Grid>(Grid::radial(3, 256, 4.0));
    auto conv = ConvOperator::build(grid, KernelSpec::power_law(1.0, alpha, 3, 16.0));
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        GridField u(grid, 0.0);
        const int bumps = 1 + static_cast<int>(3.0 * uni(rng));
        for (int b = 0; b < bumps; ++b) {
            const double s = 0.3 + 2.5 * uni(rng);
            const double a = 0.1 + uni(rng);
            const double beta = 0.5 + 3.0 * uni(rng);
            for (int i = 0; i < grid->nr(); ++i) {
                const double t = 1.0 - std::pow(grid->r_center(i) / s, 2.0);
                if (t > 0.0) u[i] += a * std::pow(t, beta);
            }
        }
        worst = std::max(worst, hls_ratio(u, conv, alpha, m_star));
    }
    const CmstarEstimate lo = estimate_cmstar(alpha, 3, 256, 4.0);
    const CmstarEstimate hi = estimate_cmstar(alpha, 3, 512, 4.0);
    const double stability = std::abs(hi.value - lo.value) / hi.value;
    report(10, worst <= pinned * (1.0 + 1e-3) && stability <= 0.02,
           "HLS ratio bounded by the pinned constant",
           "max ratio " + fmt(worst) + " vs " + fmt(pinned) + ", stability " + fmt(stability));
}

// ---- criterion 11 ------------------------------------------------------

void criterion_11() {
    SimConfig cfg = supercritical_fixture(256);
    const double mass = 100.0;
    const ConvOperator conv = ConvOperator::build(cfg.grid, cfg.kernel);
    const EntropyDensity phi(cfg.diffusion);
    // lambda multipliers {1, 2, 4, 8} over the smallest lambda that fits.
    double base = 8.0;
    bool ok = true;
    double prev_f = std::numeric_limits<double>::infinity();
    double prev_i = std::numeric_limits<double>::infinity();
    std::string detail;
    for (double mult : {1.0, 2.0, 4.0, 8.0}) {
        BlowupCandidateSpec spec;
        spec.mass = mass;
        spec.lambda = base * mult;
        const GridField u = make_blowup_candidate(spec, cfg.grid);
        const double f = free_energy(u, phi, conv);
        const double i2 = u.second_moment();
        ok = ok && std::abs(u.mass() - mass) / mass <= 1e-10 && f < prev_f && i2 < prev_i;
        prev_f = f;
        prev_i = i2;
    }
    report(11, ok, "blow-up candidate family laws",
           "F and I strictly decreasing along lambda, final F " + fmt(prev_f));
}

// ---- criterion 12 ------------------------------------------------------

std::string diagnostics_bytes(const SimConfig& cfg, const GridField& u0, const std::string& path) {
    const RunOutcome out = run(cfg, u0);
    write_diagnostics_csv(path, out, cfg);
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_12() {
    RunConfig rc = pks_fixture(64, 2.0 * M_PI, "auto_spread");
    rc.t_end = 0.2;
    SimConfig sim = to_sim_config(rc);
    const GridField u0 = make_initial_data(rc, sim);
    const std::string a = diagnostics_bytes(sim, u0, "/tmp/agd_acc_diag_a.csv");
    const std::string b = diagnostics_bytes(sim, u0, "/tmp/agd_acc_diag_b.csv");
    report(12, !a.empty() && a == b, "byte-identical diagnostics on repeated runs",
           std::to_string(a.size()) + " bytes");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criteria_4_and_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria failed\n", g_failures);
    return 1;
}
