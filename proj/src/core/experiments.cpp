#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"

namespace aggdiff {

namespace {

double default_bump(double r) {
    const double t = 1.0 - r * r;
    return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// ||h*||_1 in R^d for a radial profile supported in [0, rad).
double profile_l1(const std::function<double(double)>& h, double rad, int d) {
    const double omega = unit_sphere_area(d);
    double acc = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) {
        const double a = rad * i / panels, b = rad * (i + 1) / panels;
        acc += gl8([&](double r) { return h(r) * omega * std::pow(r, d - 1); }, a, b);
    }
    return acc;
}

double radial_cell_average(const std::function<double(double)>& f, const Grid& g, int i) {
    const double r0 = g.r_face(i), r1 = g.r_face(i + 1);
    const int d = g.dim();
    const double omega = unit_sphere_area(d);
    double acc = 0.0;
    for (int s = 0; s < 4; ++s) {
        const double a = r0 + (r1 - r0) * s / 4.0, b = r0 + (r1 - r0) * (s + 1) / 4.0;
        acc += gl8([&](double r) { return f(r) * omega * std::pow(r, d - 1); }, a, b);
    }
    return acc / g.cell_volume(i);
}

double cartesian_cell_average(const std::function<double(double)>& f, const Grid& g, int i,
                              int j) {
    const double x0 = g.x_center(i) - 0.5 * g.dx(), y0 = g.y_center(j) - 0.5 * g.dx();
    double acc = 0.0;
    for (int a = 0; a < GaussLegendre8::n; ++a)
        for (int b = 0; b < GaussLegendre8::n; ++b) {
            const double x = x0 + g.dx() * 0.5 * (1.0 + GaussLegendre8::nodes[a]);
            const double y = y0 + g.dx() * 0.5 * (1.0 + GaussLegendre8::nodes[b]);
            acc += GaussLegendre8::weights[a] * GaussLegendre8::weights[b] * f(std::hypot(x, y));
        }
    return acc * 0.25;
}

}  // namespace

GridField make_blowup_candidate(const BlowupCandidateSpec& spec,
                                std::shared_ptr<const Grid> grid) {
    if (!(spec.mass > 0.0) || !(spec.lambda > 0.0))
        throw std::invalid_argument("make_blowup_candidate: mass and lambda must be positive");
    const std::function<double(double)> base =
        spec.base_profile ? spec.base_profile : default_bump;
    const int d = grid->dim();
    const double norm1 = profile_l1(base, spec.base_radius, d);
    if (!(norm1 > 0.0)) throw std::invalid_argument("make_blowup_candidate: empty base profile");
    const double mu = std::pow(norm1 / spec.mass, 1.0 / d);
    const double s = spec.lambda * mu;
    const double support = spec.base_radius / s;
    const double fit_limit =
        grid->mode() == GridMode::Cartesian2D ? 0.5 * grid->side() : grid->radius();
    if (support > fit_limit)
        throw std::runtime_error("make_blowup_candidate: bump support exceeds the domain");

    const double amp = std::pow(spec.lambda, d);
    auto h = [&](double r) { return amp * base(s * r); };

    GridField u(grid);
    if (grid->mode() == GridMode::Cartesian2D) {
        for (int j = 0; j < grid->ny(); ++j)
            for (int i = 0; i < grid->nx(); ++i) u[grid->idx(i, j)] = cartesian_cell_average(h, *grid, i, j);
    } else {
        for (int i = 0; i < grid->nr(); ++i) u[i] = radial_cell_average(h, *grid, i);
    }
    if (!(u.mass() > 0.0))
        throw std::runtime_error("make_blowup_candidate: bump fell below grid resolution");
    u.normalize_mass(spec.mass);
    return u;
}

VirialThreshold virial_threshold(const SimConfig& cfg, double mass) {
    VirialThreshold vt;
    const CriticalMassPrediction pred = critical_mass(cfg.kernel, cfg.diffusion);
    const int d = cfg.kernel.dim();
    vt.alpha = d * (pred.m_star - 1.0);
    vt.m = continuation_exponent(cfg.diffusion, pred.m_star);
    const double inf = std::numeric_limits<double>::infinity();
    if (!(vt.m > 1.0)) {
        vt.threshold = inf;
        return vt;
    }

    // C1 from (B2): max positive part of r k'(r) + alpha k(r) over the domain scale.
    if (!cfg.kernel.is_zero()) {
        const double diam = cfg.grid
                                ? (cfg.grid->mode() == GridMode::Cartesian2D
                                       ? cfg.grid->side() * std::sqrt(2.0)
                                       : 2.0 * cfg.grid->radius())
                                : cfg.kernel.r_max();
        for (double lr = -4.0; lr <= std::log10(diam) + 1e-12; lr += 0.05) {
            const double r = std::pow(10.0, lr);
            if (r > cfg.kernel.r_max()) break;
            const KernelEval e = cfg.kernel.eval(r);
            vt.c1 = std::max(vt.c1, r * e.kp + vt.alpha * e.k);
        }
    }

    // (B4) scan: A(z) <= (m-1) Phi(z) beyond some R. When the literal check
    // fails but the deficit stays linear, the linear excess kappa is absorbed
    // into C(M) instead (Phi is only fixed up to linear terms).
    const EntropyDensity phi(cfg.diffusion);
    std::vector<double> zs;
    for (double lz = -6.0; lz <= 8.0; lz += 0.1) zs.push_back(std::pow(10.0, lz));
    auto deficit = [&](double z) { return cfg.diffusion.a(z) - (vt.m - 1.0) * phi.phi(z); };
    vt.r_cut = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        bool ok = true;
        for (std::size_t j = i; j < zs.size(); ++j)
            if (deficit(zs[j]) > 0.0) {
                ok = false;
                break;
            }
        if (ok) {
            vt.r_cut = zs[i];
            vt.b4_holds = true;
            break;
        }
    }
    double kappa = 0.0;
    if (!vt.b4_holds) {
        vt.r_cut = 1.0;
        double prev_ratio = 0.0;
        for (double z : zs) {
            if (z < vt.r_cut) continue;
            const double ratio = deficit(z) / z;
            kappa = std::max(kappa, ratio);
            prev_ratio = ratio;
        }
        // Diverging linear excess means the virial route does not close.
        const double tail1 = deficit(zs[zs.size() - 11]) / zs[zs.size() - 11];
        const double tail2 = prev_ratio;
        if (tail2 > 2.0 * std::max(tail1, 1e-30) && tail2 > 1e3) {
            vt.threshold = inf;
            return vt;
        }
    }
    double c_r = 0.0;
    for (double z : zs) {
        if (z > vt.r_cut) break;
        c_r = std::max(c_r, cfg.diffusion.a(z) / z);
    }
    vt.cm = (c_r + kappa) * mass;
    vt.c_total = 2.0 * d * vt.cm + vt.c1 * mass * mass;
    vt.threshold = vt.c_total / (2.0 * d * (vt.m - 1.0));
    return vt;
}

namespace {

double starting_lambda(const BlowupCandidateSpec& base, const Grid& g) {
    const double fit_limit = g.mode() == GridMode::Cartesian2D ? 0.4 * g.side() : 0.8 * g.radius();
    const int d = g.dim();
    const double norm1 = profile_l1(
        base.base_profile ? base.base_profile : std::function<double(double)>(default_bump),
        base.base_radius, d);
    const double mu = std::pow(norm1 / base.mass, 1.0 / d);
    double lambda = 1.0;
    while (base.base_radius / (lambda * mu) > fit_limit) lambda *= 2.0;
    return lambda;
}

double support_radius(const BlowupCandidateSpec& spec, int d) {
    const double norm1 = profile_l1(
        spec.base_profile ? spec.base_profile : std::function<double(double)>(default_bump),
        spec.base_radius, d);
    const double mu = std::pow(norm1 / spec.mass, 1.0 / d);
    return spec.base_radius / (spec.lambda * mu);
}

}  // namespace

BlowupSearchResult find_blowup_initial_data(double mass, const SimConfig& cfg) {
    BlowupSearchResult out;
    out.vt = virial_threshold(cfg, mass);
    if (!std::isfinite(out.vt.threshold)) {
        out.message = "virial threshold is not finite (effective tail exponent m <= 1 "
                      "or unbounded A-excess): free energy cannot certify blow-up";
        return out;
    }
    const ConvOperator conv = ConvOperator::build(cfg.grid, cfg.kernel);
    const EntropyDensity phi(cfg.diffusion);

    BlowupCandidateSpec spec;
    spec.mass = mass;
    spec.lambda = starting_lambda(spec, *cfg.grid);
    const double min_support = 3.0 * cfg.grid->dx();
    double best_f = std::numeric_limits<double>::infinity();
    while (support_radius(spec, cfg.grid->dim()) >= min_support) {
        const GridField u = make_blowup_candidate(spec, cfg.grid);
        const double f = free_energy(u, phi, conv);
        if (f < best_f) {
            best_f = f;
            out.field = u;
            out.lambda = spec.lambda;
            out.achieved_f = f;
        }
        if (f < -out.vt.threshold) {
            out.success = true;
            return out;
        }
        spec.lambda *= 2.0;
    }
    out.message = "lambda ladder exhausted at the grid resolution; achieved F = " +
                  std::to_string(best_f) + " vs threshold " + std::to_string(-out.vt.threshold);
    return out;
}

GridField most_concentrated_candidate(double mass, const SimConfig& cfg, int min_cells) {
    BlowupCandidateSpec spec;
    spec.mass = mass;
    spec.lambda = starting_lambda(spec, *cfg.grid);
    const double min_support = min_cells * cfg.grid->dx();
    while (support_radius(spec, cfg.grid->dim()) / 2.0 >= min_support) spec.lambda *= 2.0;
    return make_blowup_candidate(spec, cfg.grid);
}

SweepResult bisect_critical_mass(const SimConfig& cfg, double m_lo, double m_hi, int budget,
                                 double tolerance) {
    if (!(m_lo > 0.0) || !(m_hi > m_lo))
        throw std::invalid_argument("bisect_critical_mass: need 0 < m_lo < m_hi");
    SweepResult out;
    out.predicted = critical_mass(cfg.kernel, cfg.diffusion);
    const ConvOperator conv = ConvOperator::build(cfg.grid, cfg.kernel);

    auto probe = [&](double mass) -> ProbeResult {
        ProbeResult pr;
        pr.mass = mass;
        const GridField u0 = most_concentrated_candidate(mass, cfg);
        const RunOutcome r = run(cfg, u0, conv);
        pr.status = r.status;
        pr.t_star = r.t_star;
        for (const TrajectoryPoint& p : r.trajectory) pr.linf_max = std::max(pr.linf_max, p.diag.linf);
        // A completed run still strictly concentrating across the last window
        // of records, above its initial amplitude, was cut off mid-collapse by
        // the fixed horizon; it sits on the blow-up side of the dichotomy.
        if (pr.status == RunStatus::Completed && !r.trajectory.empty()) {
            const std::size_t w = static_cast<std::size_t>(std::max(cfg.blowup.window, 2));
            const std::vector<TrajectoryPoint>& tr = r.trajectory;
            if (tr.size() > w && tr.back().diag.linf >= 1.2 * u0.linf()) {
                bool grow = true;
                for (std::size_t k = tr.size() - w; k < tr.size(); ++k)
                    if (!(tr[k].diag.linf > tr[k - 1].diag.linf)) grow = false;
                pr.concentrating = grow;
            }
        }
        out.probes.push_back(pr);
        return pr;
    };
    auto classify = [&](const ProbeResult& pr, bool* is_blowup) -> bool {
        if (pr.status == RunStatus::NumericalBlowup || pr.concentrating) {
            *is_blowup = true;
            return true;
        }
        if (pr.status == RunStatus::Completed) {
            *is_blowup = false;
            return true;
        }
        return false;  // dt_floor / error: inconclusive
    };

    bool blow_lo = false, blow_hi = false;
    if (!classify(probe(m_lo), &blow_lo) || !classify(probe(m_hi), &blow_hi)) {
        out.protocol_error = true;
        out.message = "inconclusive probe outcome (dt floor or solver error) at an endpoint";
        return out;
    }
    if (blow_lo) {
        out.protocol_error = true;
        out.message = "lower endpoint already blows up; shrink the range from below";
        return out;
    }
    if (!blow_hi) {
        out.no_finite_bracket = true;
        out.message = "upper endpoint completes; no finite bracket inside the range";
        return out;
    }

    double lo = m_lo, hi = m_hi;
    int used = 2;
    while (hi - lo > tolerance && used < budget) {
        const double mid = 0.5 * (lo + hi);
        bool is_blow = false;
        if (!classify(probe(mid), &is_blow)) {
            out.protocol_error = true;
            out.message = "inconclusive probe outcome at mass " + std::to_string(mid);
            return out;
        }
        (is_blow ? hi : lo) = mid;
        ++used;
    }

    // Dichotomy monotonicity over everything we saw.
    double max_completed = 0.0, min_blowup = std::numeric_limits<double>::infinity();
    for (const ProbeResult& pr : out.probes) {
        const bool blow = pr.status == RunStatus::NumericalBlowup || pr.concentrating;
        if (blow) min_blowup = std::min(min_blowup, pr.mass);
        else if (pr.status == RunStatus::Completed) max_completed = std::max(max_completed, pr.mass);
    }
    if (max_completed > min_blowup) {
        out.protocol_error = true;
        out.message = "non-monotone outcomes: completion at mass above a blow-up";
        return out;
    }

    out.m_lo = lo;
    out.m_hi = hi;
    out.bracket_valid = true;
    return out;
}

VirialReport virial_check(const RunOutcome& run_outcome, const SimConfig& cfg) {
    const std::vector<TrajectoryPoint>& traj = run_outcome.trajectory;
    if (traj.size() < 3)
        throw std::invalid_argument("virial_check: need at least 3 trajectory records");
    if (!cfg.record_virial)
        throw std::invalid_argument("virial_check: run must be produced with record_virial");
    const int d = cfg.grid->mode() == GridMode::Cartesian2D ? 2 : cfg.grid->dim();

    VirialReport rep;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double span = traj[i + 1].diag.t - traj[i - 1].diag.t;
        if (!(span > 0.0)) continue;
        const double didt = (traj[i + 1].diag.I - traj[i - 1].diag.I) / span;
        const double rhs = 2.0 * d * traj[i].int_a + traj[i].virial_w - traj[i].boundary_term;
        const double scale = std::max({std::abs(didt), std::abs(rhs), 1e-300});
        rep.residuals.push_back(std::abs(didt - rhs) / scale);
        rep.max_rel_residual = std::max(rep.max_rel_residual, rep.residuals.back());
        rep.boundary_term_max = std::max(rep.boundary_term_max, traj[i].boundary_term);
        if (traj[i].boundary_term < 0.0) rep.boundary_sign_ok = false;
        ++rep.records_used;
    }
    if (rep.records_used == 0)
        throw std::invalid_argument("virial_check: no usable interior records");
    return rep;
}

double barenblatt_profile(double m, int d, double c, double r, double t) {
    const double beta = 1.0 / (d * (m - 1.0) + 2.0);
    const double kappa = (m - 1.0) * beta / (2.0 * m);
    const double core = c - kappa * r * r * std::pow(t, -2.0 * beta);
    return core > 0.0 ? std::pow(t, -d * beta) * std::pow(core, 1.0 / (m - 1.0)) : 0.0;
}

ConvergenceResult barenblatt_convergence(double m, const std::vector<int>& resolutions, int d,
                                         double radius, double t0, double t1, double c) {
    if (!(m > 1.0)) throw std::invalid_argument("barenblatt_convergence: m > 1 required");
    ConvergenceResult out;
    out.t0 = t0;
    out.t1 = t1;
    for (int n : resolutions) {
        auto grid = std::make_shared<Grid>(Grid::radial(d, n, radius));
        GridField u0(grid);
        for (int i = 0; i < n; ++i)
            u0[i] = radial_cell_average([&](double r) { return barenblatt_profile(m, d, c, r, t0); },
                                        *grid, i);
        SimConfig cfg;
        cfg.kernel = KernelSpec::none(d);
        cfg.diffusion = DiffusionSpec::power_law(m);
        cfg.grid = grid;
        cfg.t_end = t1 - t0;
        cfg.dt_max = 1e-2;
        cfg.cadence_steps = 1000000;  // endpoints only
        const RunOutcome r = run(cfg, u0);
        if (r.status != RunStatus::Completed)
            throw std::runtime_error("barenblatt_convergence: run did not complete");

        ConvergenceRow row;
        row.n = n;
        for (int i = 0; i < n; ++i) {
            const double exact = radial_cell_average(
                [&](double rr) { return barenblatt_profile(m, d, c, rr, t1); }, *grid, i);
            row.l1_error += std::abs(r.final_field[i] - exact) * grid->cell_volume(i);
        }
        row.mass_error = std::abs(r.final_field.mass() - u0.mass());
        out.rows.push_back(row);
    }
    // log(error) vs log(n) least squares; order is minus the slope.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(out.rows.size());
    for (const ConvergenceRow& row : out.rows) {
        const double x = std::log(static_cast<double>(row.n)), y = std::log(row.l1_error);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    if (n >= 2) out.fitted_order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

}  // namespace aggdiff
