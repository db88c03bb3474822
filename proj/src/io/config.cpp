#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace aggdiff {

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"kernel", {"type", "dim", "c", "alpha", "sigma", "r_max", "table"}},
    {"diffusion", {"type", "m", "slope", "a_table", "aprime_table", "epsilon"}},
    {"grid", {"type", "n", "extent"}},
    {"time", {"t_end", "dt_min", "dt_max", "cfl_safety", "cadence"}},
    {"blowup", {"umax_multiplier", "k_rel", "window", "q"}},
    {"init", {"type", "mass", "lambda", "base_radius", "csv"}},
    {"output", {"snapshots", "p_list", "check_dissipation", "dissipation_slack", "record_virial"}},
    {"experiment",
     {"type", "m_lo", "m_hi", "budget", "tolerance", "pm_m", "resolutions", "pm_radius", "pm_t0",
      "pm_t1"}},
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& v, int line) {
    const double d = to_double(v, line);
    if (d != std::floor(d)) fail(line, "expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

bool to_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(line, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    std::set<std::pair<std::string, std::string>> seen;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!kSchema.count(section)) fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        if (section.empty()) fail(line, "key outside any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (!kSchema.at(section).count(key))
            fail(line, "unknown key '" + key + "' in section [" + section + "]");
        if (!seen.insert({section, key}).second)
            fail(line, "duplicate key '" + key + "' in section [" + section + "]");

        if (section == "kernel") {
            if (key == "type") c.kernel_type = val;
            else if (key == "dim") c.dim = to_int(val, line);
            else if (key == "c") c.kernel_c = to_double(val, line);
            else if (key == "alpha") c.kernel_alpha = to_double(val, line);
            else if (key == "sigma") c.kernel_sigma = to_double(val, line);
            else if (key == "r_max") c.kernel_rmax = to_double(val, line);
            else c.kernel_table = val;
        } else if (section == "diffusion") {
            if (key == "type") c.diffusion_type = val;
            else if (key == "m") c.diffusion_m = to_double(val, line);
            else if (key == "slope") c.diffusion_slope = to_double(val, line);
            else if (key == "a_table") c.a_table = val;
            else if (key == "aprime_table") c.aprime_table = val;
            else c.epsilon = to_double(val, line);
        } else if (section == "grid") {
            if (key == "type") c.grid_type = val;
            else if (key == "n") c.n = to_int(val, line);
            else c.extent = to_double(val, line);
        } else if (section == "time") {
            if (key == "t_end") c.t_end = to_double(val, line);
            else if (key == "dt_min") c.dt_min = to_double(val, line);
            else if (key == "dt_max") c.dt_max = to_double(val, line);
            else if (key == "cfl_safety") c.cfl_safety = to_double(val, line);
            else c.cadence = to_int(val, line);
        } else if (section == "blowup") {
            if (key == "umax_multiplier") c.umax_multiplier = to_double(val, line);
            else if (key == "window") c.window = to_int(val, line);
            else if (key == "q") c.q = to_double(val, line);
            else {
                c.k_rel.clear();
                for (const std::string& item : split_list(val))
                    c.k_rel.push_back(to_double(item, line));
                if (c.k_rel.empty()) fail(line, "k_rel needs at least one threshold");
            }
        } else if (section == "init") {
            if (key == "type") c.init_type = val;
            else if (key == "mass") c.mass = to_double(val, line);
            else if (key == "base_radius") c.base_radius = to_double(val, line);
            else if (key == "csv") c.init_csv = val;
            else {
                if (val == "auto_spread" || val == "auto_concentrated") {
                    c.lambda_mode = val;
                } else {
                    c.lambda_mode = "value";
                    c.lambda = to_double(val, line);
                }
            }
        } else if (section == "output") {
            if (key == "snapshots") c.snapshots = to_bool(val, line);
            else if (key == "check_dissipation") c.check_dissipation = to_bool(val, line);
            else if (key == "dissipation_slack") c.dissipation_slack = to_double(val, line);
            else if (key == "record_virial") c.record_virial = to_bool(val, line);
            else {
                c.p_list.clear();
                for (const std::string& item : split_list(val))
                    c.p_list.push_back(to_double(item, line));
            }
        } else {  // experiment
            if (key == "type") c.experiment = val;
            else if (key == "m_lo") c.sweep_m_lo = to_double(val, line);
            else if (key == "m_hi") c.sweep_m_hi = to_double(val, line);
            else if (key == "budget") c.sweep_budget = to_int(val, line);
            else if (key == "tolerance") c.sweep_tolerance = to_double(val, line);
            else if (key == "pm_m") c.pm_m = to_double(val, line);
            else if (key == "pm_radius") c.pm_radius = to_double(val, line);
            else if (key == "pm_t0") c.pm_t0 = to_double(val, line);
            else if (key == "pm_t1") c.pm_t1 = to_double(val, line);
            else {
                c.pm_resolutions.clear();
                for (const std::string& item : split_list(val))
                    c.pm_resolutions.push_back(to_int(item, line));
            }
        }
    }

    static const std::set<std::string> kernels = {"newtonian", "logarithmic", "power",
                                                  "gaussian",  "tabulated",   "none"};
    static const std::set<std::string> diffusions = {"power", "saturated_linear",
                                                     "power_plus_linear", "custom"};
    if (!kernels.count(c.kernel_type)) throw ConfigError("unknown kernel type '" + c.kernel_type + "'");
    if (!diffusions.count(c.diffusion_type))
        throw ConfigError("unknown diffusion type '" + c.diffusion_type + "'");
    if (c.grid_type != "cartesian2d" && c.grid_type != "radial")
        throw ConfigError("unknown grid type '" + c.grid_type + "'");
    if (c.init_type != "bump" && c.init_type != "csv")
        throw ConfigError("unknown init type '" + c.init_type + "'");
    static const std::set<std::string> experiments = {"none", "sweep", "virial", "barenblatt"};
    if (!experiments.count(c.experiment))
        throw ConfigError("unknown experiment type '" + c.experiment + "'");
    if (c.grid_type == "cartesian2d" && c.dim != 2)
        throw ConfigError("cartesian2d grids require dim = 2");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_same_v<T, int>) out += std::to_string(xs[i]);
        else out += fmt(xs[i]);
    }
    return out;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[kernel]\n";
    os << "type = " << c.kernel_type << "\n";
    os << "dim = " << c.dim << "\n";
    if (c.kernel_type == "logarithmic" || c.kernel_type == "power")
        os << "c = " << fmt(c.kernel_c) << "\n";
    if (c.kernel_type == "power") os << "alpha = " << fmt(c.kernel_alpha) << "\n";
    if (c.kernel_type == "gaussian") os << "sigma = " << fmt(c.kernel_sigma) << "\n";
    if (c.kernel_rmax > 0.0) os << "r_max = " << fmt(c.kernel_rmax) << "\n";
    if (c.kernel_type == "tabulated") os << "table = " << c.kernel_table << "\n";

    os << "\n[diffusion]\n";
    os << "type = " << c.diffusion_type << "\n";
    if (c.diffusion_type == "power" || c.diffusion_type == "power_plus_linear")
        os << "m = " << fmt(c.diffusion_m) << "\n";
    if (c.diffusion_type == "power_plus_linear") os << "slope = " << fmt(c.diffusion_slope) << "\n";
    if (c.diffusion_type == "custom") {
        os << "a_table = " << c.a_table << "\n";
        os << "aprime_table = " << c.aprime_table << "\n";
    }
    os << "epsilon = " << fmt(c.epsilon) << "\n";

    os << "\n[grid]\n";
    os << "type = " << c.grid_type << "\n";
    os << "n = " << c.n << "\n";
    os << "extent = " << fmt(c.extent) << "\n";

    os << "\n[time]\n";
    os << "t_end = " << fmt(c.t_end) << "\n";
    os << "dt_min = " << fmt(c.dt_min) << "\n";
    os << "dt_max = " << fmt(c.dt_max) << "\n";
    os << "cfl_safety = " << fmt(c.cfl_safety) << "\n";
    os << "cadence = " << c.cadence << "\n";

    os << "\n[blowup]\n";
    os << "umax_multiplier = " << fmt(c.umax_multiplier) << "\n";
    os << "k_rel = " << join(c.k_rel) << "\n";
    os << "window = " << c.window << "\n";
    os << "q = " << fmt(c.q) << "\n";

    os << "\n[init]\n";
    os << "type = " << c.init_type << "\n";
    os << "mass = " << fmt(c.mass) << "\n";
    os << "lambda = "
       << (c.lambda_mode == "value" ? fmt(c.lambda) : c.lambda_mode) << "\n";
    os << "base_radius = " << fmt(c.base_radius) << "\n";
    if (c.init_type == "csv") os << "csv = " << c.init_csv << "\n";

    os << "\n[output]\n";
    os << "snapshots = " << (c.snapshots ? "true" : "false") << "\n";
    os << "p_list = " << join(c.p_list) << "\n";
    os << "check_dissipation = " << (c.check_dissipation ? "true" : "false") << "\n";
    os << "dissipation_slack = " << fmt(c.dissipation_slack) << "\n";
    os << "record_virial = " << (c.record_virial ? "true" : "false") << "\n";

    os << "\n[experiment]\n";
    os << "type = " << c.experiment << "\n";
    if (c.experiment == "sweep") {
        os << "m_lo = " << fmt(c.sweep_m_lo) << "\n";
        os << "m_hi = " << fmt(c.sweep_m_hi) << "\n";
        os << "budget = " << c.sweep_budget << "\n";
        os << "tolerance = " << fmt(c.sweep_tolerance) << "\n";
    }
    if (c.experiment == "barenblatt") {
        os << "pm_m = " << fmt(c.pm_m) << "\n";
        os << "resolutions = " << join(c.pm_resolutions) << "\n";
        os << "pm_radius = " << fmt(c.pm_radius) << "\n";
        os << "pm_t0 = " << fmt(c.pm_t0) << "\n";
        os << "pm_t1 = " << fmt(c.pm_t1) << "\n";
    }
    return os.str();
}

SimConfig to_sim_config(const RunConfig& c) {
    SimConfig sim;
    const double diameter =
        c.grid_type == "cartesian2d" ? c.extent * std::sqrt(2.0) : 2.0 * c.extent;
    const double rmax = c.kernel_rmax > 0.0 ? c.kernel_rmax : 1.25 * diameter;

    if (c.kernel_type == "newtonian") sim.kernel = KernelSpec::newtonian(c.dim, rmax);
    else if (c.kernel_type == "logarithmic")
        sim.kernel = KernelSpec::logarithmic(c.kernel_c, c.dim, rmax);
    else if (c.kernel_type == "power")
        sim.kernel = KernelSpec::power_law(c.kernel_c, c.kernel_alpha, c.dim, rmax);
    else if (c.kernel_type == "gaussian")
        sim.kernel = KernelSpec::gaussian(c.kernel_sigma, c.dim, rmax);
    else if (c.kernel_type == "tabulated")
        sim.kernel = KernelSpec::tabulated_from_csv(c.kernel_table, c.dim);
    else sim.kernel = KernelSpec::none(c.dim, rmax);

    if (c.diffusion_type == "power") sim.diffusion = DiffusionSpec::power_law(c.diffusion_m);
    else if (c.diffusion_type == "saturated_linear")
        sim.diffusion = DiffusionSpec::saturated_linear();
    else if (c.diffusion_type == "power_plus_linear")
        sim.diffusion = DiffusionSpec::power_plus_linear(c.diffusion_m, c.diffusion_slope);
    else sim.diffusion = DiffusionSpec::custom_from_csv(c.a_table, c.aprime_table);

    sim.epsilon = c.epsilon;
    if (c.grid_type == "cartesian2d")
        sim.grid = std::make_shared<Grid>(Grid::cartesian2d(c.n, c.n, c.extent));
    else sim.grid = std::make_shared<Grid>(Grid::radial(c.dim, c.n, c.extent));

    sim.t_end = c.t_end;
    sim.dt_min = c.dt_min;
    sim.dt_max = c.dt_max;
    sim.cfl_safety = c.cfl_safety;
    sim.cadence_steps = c.cadence;
    sim.blowup.umax_multiplier = c.umax_multiplier;
    sim.blowup.k_rel = c.k_rel;
    sim.blowup.window = c.window;
    sim.blowup.q_override = c.q;
    sim.p_list = c.p_list;
    sim.check_dissipation = c.check_dissipation;
    sim.dissipation_slack_c = c.dissipation_slack;
    sim.record_virial = c.record_virial;
    return sim;
}

GridField make_initial_data(const RunConfig& c, const SimConfig& sim) {
    if (c.init_type == "csv") {
        std::ifstream f(c.init_csv);
        if (!f) throw ConfigError("cannot open init csv '" + c.init_csv + "'");
        GridField u(sim.grid);
        std::string linestr;
        std::size_t i = 0;
        while (std::getline(f, linestr)) {
            linestr = trim(linestr);
            if (linestr.empty() || linestr.front() == '#') continue;
            if (i >= u.size()) throw ConfigError("init csv has more rows than grid cells");
            u[i++] = std::stod(linestr);
        }
        if (i != u.size()) throw ConfigError("init csv has fewer rows than grid cells");
        if (u.min_value() < 0.0) throw ConfigError("init csv contains negative values");
        u.normalize_mass(c.mass);
        return u;
    }
    if (c.lambda_mode == "auto_concentrated") return most_concentrated_candidate(c.mass, sim);
    BlowupCandidateSpec spec;
    spec.mass = c.mass;
    spec.base_radius = c.base_radius;
    if (c.lambda_mode == "auto_spread") {
        spec.lambda = 1.0;
        while (true) {
            try {
                return make_blowup_candidate(spec, sim.grid);
            } catch (const std::runtime_error&) {
                spec.lambda *= 2.0;
                if (spec.lambda > 1e6) throw;
            }
        }
    }
    spec.lambda = c.lambda;
    return make_blowup_candidate(spec, sim.grid);
}

}  // namespace aggdiff
