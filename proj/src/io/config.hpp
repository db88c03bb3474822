#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/solver.hpp"

namespace aggdiff {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sectioned key = value run configuration. Parsing is strict: unknown
// sections or keys fail with the offending line number, so a typo can never
// silently change a mathematical parameter.
struct RunConfig {
    // [kernel]
    std::string kernel_type = "none";  // newtonian|logarithmic|power|gaussian|tabulated|none
    int dim = 2;
    double kernel_c = 1.0;       // strength (logarithmic, power)
    double kernel_alpha = 1.0;   // power exponent
    double kernel_sigma = 1.0;   // gaussian width
    double kernel_rmax = 0.0;    // 0 = derive from the grid diameter
    std::string kernel_table;    // csv path (tabulated)

    // [diffusion]
    std::string diffusion_type = "power";  // power|saturated_linear|power_plus_linear|custom
    double diffusion_m = 2.0;
    double diffusion_slope = 1.0;
    std::string a_table, aprime_table;  // csv paths (custom)
    double epsilon = 0.0;

    // [grid]
    std::string grid_type = "cartesian2d";  // cartesian2d|radial
    int n = 64;
    double extent = 8.0;  // side length (cartesian2d) or ball radius (radial)

    // [time]
    double t_end = 1.0;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double cfl_safety = 0.4;
    int cadence = 50;

    // [blowup]
    double umax_multiplier = 10.0;
    std::vector<double> k_rel = {2.0, 4.0, 8.0};
    int window = 4;
    double q = 0.0;  // 0 = derive

    // [init]
    std::string init_type = "bump";  // bump|csv
    double mass = 1.0;
    std::string lambda_mode = "value";  // value|auto_spread|auto_concentrated
    double lambda = 1.0;
    double base_radius = 1.0;
    std::string init_csv;

    // [output]
    bool snapshots = true;
    std::vector<double> p_list = {2.0};
    bool check_dissipation = false;
    double dissipation_slack = 1e3;
    bool record_virial = false;

    // [experiment]
    std::string experiment = "none";  // none|sweep|virial|barenblatt
    double sweep_m_lo = 1.0, sweep_m_hi = 2.0;
    int sweep_budget = 12;
    double sweep_tolerance = 0.1;
    double pm_m = 2.0;
    std::vector<int> pm_resolutions = {64, 128, 256};
    double pm_radius = 6.0;
    double pm_t0 = 1.0, pm_t1 = 2.0;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Full canonical form; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

// Materialize the solver configuration (builds kernel, diffusion, grid).
SimConfig to_sim_config(const RunConfig& c);
GridField make_initial_data(const RunConfig& c, const SimConfig& sim);

}  // namespace aggdiff
