#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "io/config.hpp"

using namespace aggdiff;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("serialize then parse is the identity on a non-default config") {
    RunConfig c;
    c.kernel_type = "logarithmic";
    c.kernel_c = 1.0 / (2.0 * 3.14159265358979323846);
    c.dim = 2;
    c.diffusion_type = "saturated_linear";
    c.grid_type = "cartesian2d";
    c.n = 128;
    c.extent = 10.0;
    c.t_end = 0.75;
    c.cadence = 25;
    c.k_rel = {3.0, 9.0};
    c.mass = 7.5;
    c.lambda_mode = "auto_spread";
    c.p_list = {2.0, 3.0};
    c.check_dissipation = true;
    CHECK(parse_config(serialize_config(c)) == c);

    RunConfig s;
    s.experiment = "sweep";
    s.sweep_m_lo = 20.0;
    s.sweep_m_hi = 30.0;
    s.sweep_budget = 9;
    s.sweep_tolerance = 0.25;
    CHECK(parse_config(serialize_config(s)) == s);

    RunConfig b;
    b.experiment = "barenblatt";
    b.pm_m = 1.5;
    b.pm_resolutions = {32, 64, 96};
    b.grid_type = "radial";
    b.dim = 3;
    CHECK(parse_config(serialize_config(b)) == b);
}

TEST_CASE("unknown sections and keys fail with the offending line number") {
    try {
        parse_config("[kernel]\ntype = gaussian\n\n[nonsense]\nfoo = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(contains(e.what(), "line 4"));
        CHECK(contains(e.what(), "nonsense"));
    }
    try {
        parse_config("[kernel]\ntype = gaussian\nsgima = 0.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(contains(e.what(), "line 3"));
        CHECK(contains(e.what(), "sgima"));
    }
}

TEST_CASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(parse_config("[grid]\nn = 32\nn = 64\n"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("[grid]\nn = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn = 32.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[time]\nt_end = 1.0x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\nsnapshots = yes\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[kernel]\ntype\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("type = gaussian\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[kernel\ntype = gaussian\n"), ConfigError);
}

TEST_CASE("enum values are validated after parsing") {
    CHECK_THROWS_AS(parse_config("[kernel]\ntype = yukawa\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[diffusion]\ntype = linear\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\ntype = hexagonal\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\ntype = magic\n"), ConfigError);
    // cartesian2d is inherently two dimensional.
    CHECK_THROWS_AS(parse_config("[kernel]\ndim = 3\n[grid]\ntype = cartesian2d\n"), ConfigError);
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
    RunConfig c = parse_config(
        "# leading comment\n"
        "\n"
        "[grid]\n"
        "  n   =  48   # inline comment\n"
        "extent = 5.0\n");
    CHECK(c.n == 48);
    CHECK(c.extent == 5.0);
}

TEST_CASE("lists parse from comma-separated values") {
    RunConfig c = parse_config("[blowup]\nk_rel = 2, 4, 8, 16\n[output]\np_list = 1.5,2\n");
    CHECK(c.k_rel == std::vector<double>{2.0, 4.0, 8.0, 16.0});
    CHECK(c.p_list == std::vector<double>{1.5, 2.0});
    CHECK_THROWS_AS(parse_config("[blowup]\nk_rel = ,\n"), ConfigError);
}

TEST_CASE("lambda accepts a number or an auto mode") {
    RunConfig v = parse_config("[init]\nlambda = 2.5\n");
    CHECK(v.lambda_mode == "value");
    CHECK(v.lambda == 2.5);
    RunConfig a = parse_config("[init]\nlambda = auto_spread\n");
    CHECK(a.lambda_mode == "auto_spread");
    RunConfig b = parse_config("[init]\nlambda = auto_concentrated\n");
    CHECK(b.lambda_mode == "auto_concentrated");
    CHECK_THROWS_AS(parse_config("[init]\nlambda = auto\n"), ConfigError);
}

TEST_CASE("to_sim_config materializes the solver setup") {
    RunConfig c;
    c.kernel_type = "logarithmic";
    c.kernel_c = 0.5;
    c.diffusion_type = "saturated_linear";
    c.grid_type = "cartesian2d";
    c.n = 32;
    c.extent = 8.0;
    c.t_end = 0.25;
    SimConfig sim = to_sim_config(c);
    CHECK(sim.kernel.family() == KernelFamily::Logarithmic);
    CHECK(sim.kernel.strength() == 0.5);
    // Default r_max covers 1.25 x the domain diameter.
    CHECK(sim.kernel.r_max() == doctest::Approx(1.25 * 8.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sim.diffusion.family() == DiffusionFamily::SaturatedLinear);
    CHECK(sim.grid->mode() == GridMode::Cartesian2D);
    CHECK(sim.grid->nx() == 32);
    CHECK(sim.t_end == 0.25);
}

TEST_CASE("bump initial data respects mass and lambda modes") {
    RunConfig c;
    c.kernel_type = "none";
    c.grid_type = "radial";
    c.dim = 2;
    c.n = 64;
    c.extent = 4.0;
    c.mass = 3.0;
    c.lambda_mode = "auto_spread";
    SimConfig sim = to_sim_config(c);
    GridField u = make_initial_data(c, sim);
    CHECK(u.mass() == doctest::Approx(3.0).epsilon(1e-12));

    c.lambda_mode = "auto_concentrated";
    GridField v = make_initial_data(c, sim);
    CHECK(v.mass() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v.linf() > u.linf());
}
