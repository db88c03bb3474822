#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/energy.hpp"
#include "core/experiments.hpp"
#include "io/config.hpp"
#include "io/output.hpp"

namespace aggdiff {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

SingularityClass classify_kernel(const KernelSpec& k) {
    SingularityClass sc;
    switch (k.family()) {
        case KernelFamily::Newtonian:
        case KernelFamily::PowerLaw:
            sc.kind = SingularityClass::Kind::Power;
            sc.c = k.strength();
            sc.alpha = k.exponent();
            break;
        case KernelFamily::Logarithmic:
            sc.kind = SingularityClass::Kind::Logarithmic;
            sc.c = k.strength();
            break;
        case KernelFamily::Gaussian:
            sc.kind = SingularityClass::Kind::Bounded;
            break;
        case KernelFamily::TabulatedRadial:
            sc = singular_order(k);
            break;
    }
    if (k.is_zero()) sc = SingularityClass{};
    return sc;
}

const char* kind_name(SingularityClass::Kind k) {
    switch (k) {
        case SingularityClass::Kind::Power: return "power";
        case SingularityClass::Kind::Logarithmic: return "logarithmic";
        case SingularityClass::Kind::Bounded: return "bounded";
    }
    return "unknown";
}

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int cmd_check_kernel(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        const SimConfig sim = to_sim_config(rc);
        if (verbose) std::printf("kernel: %s\n", sim.kernel.describe().c_str());

        const AdmissibilityReport rep = check_admissible(sim.kernel);
        const SingularityClass sc = classify_kernel(sim.kernel);
        const double m_star = critical_exponent(sc, sim.kernel.dim());

        create_run_directory(out_dir);
        write_text(out_dir + "/config.ini", serialize_config(rc));
        std::ostringstream csv;
        csv << "property,value\n";
        csv << "finite_eval," << rep.finite_eval << "\n";
        csv << "l1loc," << rep.l1loc << "\n";
        csv << "radial_nonincreasing," << rep.radial_nonincreasing << "\n";
        csv << "monotone_derivatives," << rep.monotone_derivatives << "\n";
        csv << "third_derivative_bound," << rep.third_derivative_bound << "\n";
        csv << "admissible," << rep.overall << "\n";
        csv << "singularity," << kind_name(sc.kind) << "\n";
        csv << "singularity_c," << fmt(sc.c) << "\n";
        csv << "singularity_alpha," << fmt(sc.alpha) << "\n";
        csv << "m_star," << fmt(m_star) << "\n";
        write_text(out_dir + "/kernel_report.csv", csv.str());

        std::printf("admissible: %s\n", rep.overall ? "yes" : "no");
        std::printf("singularity: %s (c = %g, alpha = %g)\n", kind_name(sc.kind), sc.c, sc.alpha);
        std::printf("m_star: %.12g\n", m_star);
        return rep.overall ? 0 : 2;
    });
}

int cmd_classify(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        const SimConfig sim = to_sim_config(rc);
        if (verbose)
            std::printf("kernel: %s\ndiffusion: %s\n", sim.kernel.describe().c_str(),
                        sim.diffusion.describe().c_str());
        try {
            const CriticalMassPrediction pred = critical_mass(sim.kernel, sim.diffusion);
            const char* regime = pred.criticality == Criticality::Subcritical ? "subcritical"
                                 : pred.criticality == Criticality::Critical  ? "critical"
                                                                              : "supercritical";
            create_run_directory(out_dir);
            write_text(out_dir + "/config.ini", serialize_config(rc));
            nlohmann::ordered_json j;
            j["criticality"] = regime;
            j["m_star"] = pred.m_star;
            j["kernel_c"] = pred.kernel_c;
            j["entropy_growth_limit"] =
                std::isfinite(pred.entropy_limit) ? nlohmann::ordered_json(pred.entropy_limit)
                                                  : nlohmann::ordered_json("inf");
            if (pred.cmstar > 0.0) j["cmstar"] = pred.cmstar;
            j["critical_mass"] = std::isfinite(pred.mass) ? nlohmann::ordered_json(pred.mass)
                                                          : nlohmann::ordered_json("inf");
            write_text(out_dir + "/classification.json", j.dump(2) + "\n");

            std::printf("criticality: %s\n", regime);
            std::printf("m_star: %.12g\n", pred.m_star);
            if (std::isfinite(pred.mass)) std::printf("critical_mass: %.9g\n", pred.mass);
            else std::printf("critical_mass: inf\n");
            return 0;
        } catch (const IndeterminateError& e) {
            std::fprintf(stderr, "indeterminate: %s\n", e.what());
            return 3;
        }
    });
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        const SimConfig sim = to_sim_config(rc);
        const GridField u0 = make_initial_data(rc, sim);
        create_run_directory(out_dir);
        write_text(out_dir + "/config.ini", serialize_config(rc));
        if (rc.snapshots) write_snapshot_csv(out_dir + "/snapshot_initial.csv", u0);

        if (verbose)
            std::printf("running: %zu cells, t_end = %g, mass = %.12g\n", u0.size(), sim.t_end,
                        u0.mass());
        const RunOutcome out = run(sim, u0);
        write_diagnostics_csv(out_dir + "/diagnostics.csv", out, sim);
        if (rc.snapshots) write_snapshot_csv(out_dir + "/snapshot_final.csv", out.final_field);
        write_outcome_json(out_dir + "/outcome.json", out);

        std::printf("status: %s\n", status_name(out.status).c_str());
        if (std::isfinite(out.t_star)) std::printf("t_star: %.9g\n", out.t_star);
        std::printf("t_final: %.9g (%ld steps)\n", out.t_final, out.steps);
        switch (out.status) {
            case RunStatus::Completed: return 0;
            case RunStatus::NumericalBlowup: return 4;
            case RunStatus::DtFloor: return 5;
            case RunStatus::Error:
                std::fprintf(stderr, "error: %s\n", out.message.c_str());
                return 1;
        }
        return 1;
    });
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        if (rc.experiment != "sweep")
            throw ConfigError("sweep command needs [experiment] type = sweep");
        const SimConfig sim = to_sim_config(rc);
        if (verbose)
            std::printf("sweep: [%g, %g], budget %d, tolerance %g\n", rc.sweep_m_lo, rc.sweep_m_hi,
                        rc.sweep_budget, rc.sweep_tolerance);
        const SweepResult res = bisect_critical_mass(sim, rc.sweep_m_lo, rc.sweep_m_hi,
                                                     rc.sweep_budget, rc.sweep_tolerance);

        create_run_directory(out_dir);
        write_text(out_dir + "/config.ini", serialize_config(rc));
        std::ostringstream csv;
        csv << "mass,status,t_star,linf_max,concentrating\n";
        for (const ProbeResult& p : res.probes)
            csv << fmt(p.mass) << "," << status_name(p.status) << "," << fmt(p.t_star) << ","
                << fmt(p.linf_max) << "," << (p.concentrating ? 1 : 0) << "\n";
        write_text(out_dir + "/probes.csv", csv.str());

        nlohmann::ordered_json j;
        j["bracket_valid"] = res.bracket_valid;
        j["no_finite_bracket"] = res.no_finite_bracket;
        j["protocol_error"] = res.protocol_error;
        if (res.bracket_valid) {
            j["m_lo"] = res.m_lo;
            j["m_hi"] = res.m_hi;
            j["bracket_center"] = 0.5 * (res.m_lo + res.m_hi);
        }
        j["predicted_mass"] = std::isfinite(res.predicted.mass)
                                  ? nlohmann::ordered_json(res.predicted.mass)
                                  : nlohmann::ordered_json("inf");
        j["predicted_m_star"] = res.predicted.m_star;
        if (!res.message.empty()) j["message"] = res.message;
        write_text(out_dir + "/summary.json", j.dump(2) + "\n");

        if (res.protocol_error) {
            std::fprintf(stderr, "protocol error: %s\n", res.message.c_str());
            return 6;
        }
        if (res.no_finite_bracket) {
            std::printf("no finite bracket: %s\n", res.message.c_str());
            return 0;
        }
        std::printf("bracket: [%.9g, %.9g], predicted M_c = %.9g\n", res.m_lo, res.m_hi,
                    res.predicted.mass);
        return 0;
    });
}

int cmd_virial(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        SimConfig sim = to_sim_config(rc);
        sim.record_virial = true;
        const GridField u0 = make_initial_data(rc, sim);
        if (verbose) std::printf("virial run: t_end = %g\n", sim.t_end);
        const RunOutcome out = run(sim, u0);
        if (out.status == RunStatus::Error) {
            std::fprintf(stderr, "error: %s\n", out.message.c_str());
            return 1;
        }
        const VirialReport rep = virial_check(out, sim);

        create_run_directory(out_dir);
        write_text(out_dir + "/config.ini", serialize_config(rc));
        write_diagnostics_csv(out_dir + "/diagnostics.csv", out, sim);
        std::ostringstream csv;
        csv << "record,residual\n";
        for (std::size_t i = 0; i < rep.residuals.size(); ++i)
            csv << i + 1 << "," << fmt(rep.residuals[i]) << "\n";
        write_text(out_dir + "/virial_residuals.csv", csv.str());
        nlohmann::ordered_json j;
        j["max_rel_residual"] = rep.max_rel_residual;
        j["boundary_term_max"] = rep.boundary_term_max;
        j["boundary_sign_ok"] = rep.boundary_sign_ok;
        j["records_used"] = rep.records_used;
        j["run_status"] = status_name(out.status);
        write_text(out_dir + "/virial.json", j.dump(2) + "\n");

        std::printf("max relative virial residual: %.6g over %d records\n", rep.max_rel_residual,
                    rep.records_used);
        return 0;
    });
}

int cmd_barenblatt(const std::string& config_path, const std::string& out_dir, bool verbose) {
    return guard([&]() -> int {
        const RunConfig rc = load_config(config_path);
        if (rc.experiment != "barenblatt")
            throw ConfigError("barenblatt command needs [experiment] type = barenblatt");
        if (verbose) std::printf("barenblatt: m = %g, d = %d\n", rc.pm_m, rc.dim);
        const ConvergenceResult res = barenblatt_convergence(rc.pm_m, rc.pm_resolutions, rc.dim,
                                                            rc.pm_radius, rc.pm_t0, rc.pm_t1);

        create_run_directory(out_dir);
        write_text(out_dir + "/config.ini", serialize_config(rc));
        std::ostringstream csv;
        csv << "n,l1_error,mass_error\n";
        for (const ConvergenceRow& row : res.rows)
            csv << row.n << "," << fmt(row.l1_error) << "," << fmt(row.mass_error) << "\n";
        csv << "fitted_order," << fmt(res.fitted_order) << ",\n";
        write_text(out_dir + "/convergence.csv", csv.str());

        for (const ConvergenceRow& row : res.rows)
            std::printf("n = %4d: L1 error %.6g, mass error %.3g\n", row.n, row.l1_error,
                        row.mass_error);
        std::printf("fitted order: %.3g\n", res.fitted_order);
        return 0;
    });
}

}  // namespace aggdiff
