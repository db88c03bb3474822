#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "core/experiments.hpp"

using namespace aggdiff;

namespace {

// Supercritical reference configuration: Newtonian attraction in d = 3
// against the slowly growing diffusion A = z^{1.1}.
SimConfig supercritical_cfg(int nr) {
    SimConfig cfg;
    cfg.kernel = KernelSpec::newtonian(3);
    cfg.diffusion = DiffusionSpec::power_law(1.1);
    cfg.grid = std::make_shared<Grid>(Grid::radial(3, nr, 2.0));
    cfg.t_end = 1e-3;
    cfg.cadence_steps = 10;
    return cfg;
}

}  // namespace

TEST_CASE("blow-up candidates carry the requested mass at every lambda") {
    auto grid = std::make_shared<Grid>(Grid::radial(3, 128, 2.0));
    double prev_i = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
        BlowupCandidateSpec spec;
        spec.mass = 1.0;
        spec.lambda = lambda;
        GridField u = make_blowup_candidate(spec, grid);
        CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(u.min_value() >= 0.0);
        // Concentration shrinks the second moment monotonically.
        const double I = u.second_moment();
        CHECK(I < prev_i);
        prev_i = I;
    }
}

TEST_CASE("candidates that do not fit or resolve are rejected") {
    auto grid = std::make_shared<Grid>(Grid::radial(3, 64, 2.0));
    BlowupCandidateSpec wide;
    wide.mass = 100.0;  // mu tiny: the support overflows the ball
    wide.lambda = 1.0;
    CHECK_THROWS_AS(make_blowup_candidate(wide, grid), std::runtime_error);

    BlowupCandidateSpec sharp;
    sharp.mass = 1.0;
    sharp.lambda = 1e9;  // support far below one cell
    CHECK_THROWS_AS(make_blowup_candidate(sharp, grid), std::runtime_error);
}

TEST_CASE("virial threshold composes its measured constants") {
    SimConfig cfg = supercritical_cfg(64);
    const double M = 100.0;
    VirialThreshold vt = virial_threshold(cfg, M);
    const int d = 3;
    CHECK(vt.alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(vt.m == doctest::Approx(1.1).epsilon(1e-6));
    // Newtonian: r k'(r) + alpha k(r) = 0 identically.
    CHECK(std::abs(vt.c1) < 1e-12);
    // A = z^{1.1}: sup A/z on (0,1] is 1, and the (B4) linear deficit is
    // exactly 1.1 z, absorbed as kappa = 1.1.
    CHECK_FALSE(vt.b4_holds);
    CHECK(vt.cm == doctest::Approx(2.1 * M).epsilon(1e-6));
    CHECK(vt.c_total == doctest::Approx(2.0 * d * vt.cm + vt.c1 * M * M).epsilon(1e-12));
    CHECK(vt.threshold == doctest::Approx(vt.c_total / (2.0 * d * (vt.m - 1.0))).epsilon(1e-12));
    CHECK(vt.threshold == doctest::Approx(21.0 * M).epsilon(1e-3));
}

TEST_CASE("free energy of the concentrating family decreases without bound") {
    SimConfig cfg = supercritical_cfg(256);
    const double M = 100.0;
    const ConvOperator conv = ConvOperator::build(cfg.grid, cfg.kernel);
    const EntropyDensity phi(cfg.diffusion);
    double prev_f = std::numeric_limits<double>::infinity();
    for (double lambda : {8.0, 16.0, 32.0, 64.0}) {
        BlowupCandidateSpec spec;
        spec.mass = M;
        spec.lambda = lambda;
        GridField u = make_blowup_candidate(spec, cfg.grid);
        const double f = free_energy(u, phi, conv);
        CHECK(f < prev_f);
        prev_f = f;
    }
    CHECK(prev_f < 0.0);
}

TEST_CASE("blow-up search certifies supercritical data and it then blows up") {
    SimConfig cfg = supercritical_cfg(256);
    const double M = 100.0;
    BlowupSearchResult res = find_blowup_initial_data(M, cfg);
    REQUIRE(res.success);
    CHECK(res.field.mass() == doctest::Approx(M).epsilon(1e-12));
    CHECK(res.achieved_f < -res.vt.threshold);
    CHECK(res.lambda >= 1.0);

    RunOutcome out = run(cfg, res.field);
    CHECK(out.status == RunStatus::NumericalBlowup);
    CHECK(out.t_star > 0.0);
    CHECK(out.t_star < cfg.t_end);
}

TEST_CASE("blow-up search reports failure for subcritical diffusion") {
    SimConfig cfg = supercritical_cfg(64);
    cfg.diffusion = DiffusionSpec::power_law(2.0);
    BlowupSearchResult res = find_blowup_initial_data(10.0, cfg);
    CHECK_FALSE(res.success);
    CHECK_FALSE(res.message.empty());
}

TEST_CASE("most concentrated candidate resolves over at least min_cells cells") {
    SimConfig cfg = supercritical_cfg(128);
    GridField u = most_concentrated_candidate(1.0, cfg, 6);
    CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-12));
    int occupied = 0;
    for (int i = 0; i < cfg.grid->nr(); ++i)
        if (u[i] > 1e-9 * u.linf()) ++occupied;
    CHECK(occupied >= 5);
    CHECK(occupied < cfg.grid->nr() / 2);
}

TEST_CASE("virial interaction weights obey the power-kernel homogeneity") {
    // Newtonian d = 3: s k'(s) = -alpha k(s) with alpha = 1, so the virial
    // operator is the exact negative of the kernel operator.
    auto grid = std::make_shared<Grid>(Grid::radial(3, 64, 1.5));
    const KernelSpec kernel = KernelSpec::newtonian(3);
    auto conv_k = ConvOperator::build(grid, kernel);
    auto conv_v = ConvOperator::build_profile(
        grid, [kernel](double s) { return s * kernel.eval(s).kp; });
    GridField u(grid, 0.0);
    for (int i = 0; i < grid->nr(); ++i) {
        const double r = grid->r_center(i);
        u[i] = std::exp(-3.0 * r * r);
    }
    CHECK(conv_v.bilinear(u) == doctest::Approx(-conv_k.bilinear(u)).epsilon(1e-12));
    for (std::size_t i : {0u, 7u, 33u})
        for (std::size_t j : {2u, 18u, 60u})
            CHECK(conv_v.weight(i, j) == doctest::Approx(-conv_k.weight(i, j)).epsilon(1e-10));
}

TEST_CASE("virial identity holds along a pure diffusion trajectory") {
    SimConfig cfg;
    cfg.kernel = KernelSpec::none(2);
    cfg.diffusion = DiffusionSpec::power_law(2.0);
    cfg.grid = std::make_shared<Grid>(Grid::radial(2, 96, 2.0));
    cfg.t_end = 5e-3;
    cfg.cadence_steps = 5;
    cfg.record_virial = true;
    GridField u0(cfg.grid, 0.0);
    for (int i = 0; i < cfg.grid->nr(); ++i) {
        const double r = cfg.grid->r_center(i);
        u0[i] = std::exp(-4.0 * r * r);
    }
    u0.normalize_mass(1.0);
    RunOutcome out = run(cfg, u0);
    REQUIRE(out.status == RunStatus::Completed);
    VirialReport rep = virial_check(out, cfg);
    CHECK(rep.records_used >= 3);
    CHECK(rep.max_rel_residual <= 0.02);
    CHECK(rep.boundary_sign_ok);
}

TEST_CASE("virial identity holds with a smooth attractive kernel") {
    // First-order upwinding: the residual is O(dx); check the level at 48^2
    // and that refinement shrinks it.
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {48, 96}) {
        SimConfig cfg;
        cfg.kernel = KernelSpec::gaussian(0.5, 2);
        cfg.diffusion = DiffusionSpec::power_law(2.0);
        cfg.grid = std::make_shared<Grid>(Grid::cartesian2d(n, n, 4.0));
        cfg.t_end = 5e-3;
        cfg.cadence_steps = 5;
        cfg.record_virial = true;
        GridField u0(cfg.grid, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double r2 = cfg.grid->x_center(i) * cfg.grid->x_center(i) +
                                  cfg.grid->y_center(j) * cfg.grid->y_center(j);
                u0[cfg.grid->idx(i, j)] = std::exp(-4.0 * r2);
            }
        u0.normalize_mass(2.0);
        RunOutcome out = run(cfg, u0);
        REQUIRE(out.status == RunStatus::Completed);
        VirialReport rep = virial_check(out, cfg);
        CHECK(rep.records_used >= 3);
        CHECK(rep.max_rel_residual <= 0.06);
        CHECK(rep.max_rel_residual < prev);
        prev = rep.max_rel_residual;
    }
}

TEST_CASE("virial_check refuses runs without the extra records") {
    SimConfig cfg;
    cfg.kernel = KernelSpec::none(2);
    cfg.diffusion = DiffusionSpec::power_law(2.0);
    cfg.grid = std::make_shared<Grid>(Grid::radial(2, 32, 1.0));
    cfg.t_end = 1e-3;
    GridField u0(cfg.grid, 1.0);
    RunOutcome out = run(cfg, u0);
    CHECK_THROWS_AS(virial_check(out, cfg), std::invalid_argument);
}

TEST_CASE("sweep with a bounded kernel reports no finite bracket, deterministically") {
    SimConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.5, 2);
    cfg.diffusion = DiffusionSpec::saturated_linear();
    cfg.grid = std::make_shared<Grid>(Grid::cartesian2d(32, 32, 4.0));
    cfg.t_end = 0.05;

    SweepResult a = bisect_critical_mass(cfg, 1.0, 5.0, 6, 0.5);
    CHECK(a.no_finite_bracket);
    CHECK_FALSE(a.protocol_error);
    CHECK_FALSE(a.bracket_valid);
    CHECK(a.probes.size() == 2);
    CHECK(std::isinf(a.predicted.mass));

    SweepResult b = bisect_critical_mass(cfg, 1.0, 5.0, 6, 0.5);
    REQUIRE(a.probes.size() == b.probes.size());
    for (std::size_t i = 0; i < a.probes.size(); ++i) {
        CHECK(a.probes[i].mass == b.probes[i].mass);
        CHECK(a.probes[i].linf_max == b.probes[i].linf_max);
    }
}

TEST_CASE("sweep rejects an invalid mass range") {
    SimConfig cfg = supercritical_cfg(32);
    CHECK_THROWS_AS(bisect_critical_mass(cfg, 2.0, 1.0, 4, 0.1), std::invalid_argument);
}

TEST_CASE("barenblatt profile closed form") {
    const double m = 2.0;
    const int d = 2;
    const double beta = 1.0 / (d * (m - 1.0) + 2.0);
    const double kappa = (m - 1.0) * beta / (2.0 * m);
    CHECK(barenblatt_profile(m, d, 1.0, 0.0, 1.0) == doctest::Approx(1.0));
    // Front position at t = 1: r_f = sqrt(1/kappa); zero beyond.
    const double rf = std::sqrt(1.0 / kappa);
    CHECK(barenblatt_profile(m, d, 1.0, rf + 1e-6, 1.0) == 0.0);
    CHECK(barenblatt_profile(m, d, 1.0, 0.9 * rf, 1.0) > 0.0);
}

TEST_CASE("porous-medium runs converge to the exact self-similar solution") {
    ConvergenceResult res = barenblatt_convergence(2.0, {32, 64}, 2, 6.0, 1.0, 1.5);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[1].l1_error < res.rows[0].l1_error);
    CHECK(res.fitted_order > 0.8);
    for (const auto& row : res.rows) CHECK(row.mass_error < 1e-12);
}
