#include "output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aggdiff {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

}  // namespace

std::string status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::NumericalBlowup: return "numerical_blowup";
        case RunStatus::DtFloor: return "dt_floor";
        case RunStatus::Error: return "error";
    }
    return "unknown";
}

void create_run_directory(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path))
        throw std::runtime_error("output directory '" + path + "' already exists; refusing to clobber");
    fs::create_directories(path);
}

void write_diagnostics_csv(const std::string& path, const RunOutcome& out, const SimConfig& cfg) {
    std::ofstream f = open_out(path);
    f << "t,mass,linf";
    for (double p : cfg.p_list) f << ",lp_" << fmt(p);
    f << ",S,W,F,I,D,dt_used";
    for (double k : cfg.blowup.k_rel) f << ",tail_" << fmt(k);
    if (cfg.record_virial) f << ",int_a,virial_w,boundary_term";
    f << "\n";
    for (const TrajectoryPoint& p : out.trajectory) {
        f << fmt(p.diag.t) << "," << fmt(p.diag.mass) << "," << fmt(p.diag.linf);
        for (double pp : cfg.p_list) f << "," << fmt(p.diag.lp.at(pp));
        f << "," << fmt(p.diag.S) << "," << fmt(p.diag.W) << "," << fmt(p.diag.F) << ","
          << fmt(p.diag.I) << "," << fmt(p.diag.D) << "," << fmt(p.diag.dt_used);
        for (double tn : p.tail_norms) f << "," << fmt(tn);
        if (cfg.record_virial)
            f << "," << fmt(p.int_a) << "," << fmt(p.virial_w) << "," << fmt(p.boundary_term);
        f << "\n";
    }
}

void write_snapshot_csv(const std::string& path, const GridField& u) {
    std::ofstream f = open_out(path);
    const Grid& g = u.grid();
    if (g.mode() == GridMode::Cartesian2D) {
        f << "x,y,u\n";
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                f << fmt(g.x_center(i)) << "," << fmt(g.y_center(j)) << ","
                  << fmt(u[g.idx(i, j)]) << "\n";
    } else {
        f << "r,u\n";
        for (int i = 0; i < g.nr(); ++i) f << fmt(g.r_center(i)) << "," << fmt(u[i]) << "\n";
    }
}

void write_outcome_json(const std::string& path, const RunOutcome& out) {
    nlohmann::ordered_json j;
    j["status"] = status_name(out.status);
    if (std::isfinite(out.t_star)) j["t_star"] = out.t_star;
    j["t_final"] = out.t_final;
    j["steps"] = out.steps;
    j["dissipation_violations"] = out.dissipation_violations;
    j["tail_exponent_q"] = out.tail_exponent_q;
    if (!out.message.empty()) j["message"] = out.message;
    if (!out.trajectory.empty()) {
        j["final_mass"] = out.trajectory.back().diag.mass;
        j["final_linf"] = out.trajectory.back().diag.linf;
        j["final_free_energy"] = out.trajectory.back().diag.F;
    }
    std::ofstream f = open_out(path);
    f << j.dump(2) << "\n";
}

}  // namespace aggdiff
