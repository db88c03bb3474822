#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aggdiff {

FaceVelocity velocity(const GridField& u, const ConvOperator& conv) {
    const Grid& g = u.grid();
    if (!g.same_layout(conv.grid()))
        throw std::invalid_argument("velocity: field and operator live on different grids");
    FaceVelocity fv;
    fv.potential = conv.potential(u);
    const double dx = g.dx();
    if (g.mode() == GridMode::Cartesian2D) {
        const int n = g.nx();
        fv.vx.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
        fv.vy.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 1; i < n; ++i) {
                const double v =
                    (fv.potential[g.idx(i, j)] - fv.potential[g.idx(i - 1, j)]) / dx;
                fv.vx[static_cast<std::size_t>(j) * (n + 1) + i] = v;
                fv.max_abs = std::max(fv.max_abs, std::abs(v));
            }
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double v =
                    (fv.potential[g.idx(i, j)] - fv.potential[g.idx(i, j - 1)]) / dx;
                fv.vy[static_cast<std::size_t>(j) * n + i] = v;
                fv.max_abs = std::max(fv.max_abs, std::abs(v));
            }
    } else {
        const int nr = g.nr();
        fv.vr.assign(nr + 1, 0.0);
        for (int i = 1; i < nr; ++i) {
            const double v = (fv.potential[i] - fv.potential[i - 1]) / dx;
            fv.vr[i] = v;
            fv.max_abs = std::max(fv.max_abs, std::abs(v));
        }
    }
    return fv;
}

namespace {

std::function<double(double)> a_of(const SimConfig& cfg) {
    if (cfg.epsilon > 0.0) {
        RegularizedDerivative reg(cfg.diffusion, cfg.epsilon);
        return [reg](double z) { return reg.a(z); };
    }
    const DiffusionSpec spec = cfg.diffusion;
    return [spec](double z) { return spec.a(z); };
}

std::function<double(double)> aprime_of(const SimConfig& cfg) {
    if (cfg.epsilon > 0.0) {
        RegularizedDerivative reg(cfg.diffusion, cfg.epsilon);
        return [reg](double z) { return reg.aprime(z); };
    }
    const DiffusionSpec spec = cfg.diffusion;
    return [spec](double z) { return spec.aprime(z); };
}

}  // namespace

GridField step(const GridField& u, double dt, const FaceVelocity& v, const SimConfig& cfg) {
    const Grid& g = u.grid();
    const double dx = g.dx();
    const auto A = a_of(cfg);
    GridField out = u;

    if (g.mode() == GridMode::Cartesian2D) {
        const int n = g.nx();
        const double scale = dt / dx;  // face area dx over cell volume dx^2
        for (int j = 0; j < n; ++j)
            for (int i = 1; i < n; ++i) {
                const std::size_t l = g.idx(i - 1, j), r = g.idx(i, j);
                const double vf = v.vx[static_cast<std::size_t>(j) * (n + 1) + i];
                const double flux =
                    (vf > 0.0 ? u[l] : u[r]) * vf - (A(u[r]) - A(u[l])) / dx;
                out[l] -= scale * flux;
                out[r] += scale * flux;
            }
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const std::size_t l = g.idx(i, j - 1), r = g.idx(i, j);
                const double vf = v.vy[static_cast<std::size_t>(j) * n + i];
                const double flux =
                    (vf > 0.0 ? u[l] : u[r]) * vf - (A(u[r]) - A(u[l])) / dx;
                out[l] -= scale * flux;
                out[r] += scale * flux;
            }
    } else {
        const int nr = g.nr();
        for (int i = 1; i < nr; ++i) {
            const std::size_t l = i - 1, r = i;
            const double vf = v.vr[i];
            const double flux = (vf > 0.0 ? u[l] : u[r]) * vf - (A(u[r]) - A(u[l])) / dx;
            const double through = dt * flux * g.face_area(i);
            out[l] -= through / g.cell_volume(l);
            out[r] += through / g.cell_volume(r);
        }
    }

    const double tol = -1e-13 * std::max(u.linf(), 1.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < tol)
            throw std::runtime_error("step: negative density produced (CFL violated)");
        if (out[i] < 0.0) out[i] = 0.0;  // rounding dust at vacuum cells
    }
    return out;
}

double adaptive_dt(const GridField& u, const FaceVelocity& v, const SimConfig& cfg) {
    const Grid& g = u.grid();
    const double dx = g.dx();
    const auto ap = aprime_of(cfg);
    const int dim = (g.mode() == GridMode::Cartesian2D) ? 2 : g.dim();

    double amax = 0.0;
    auto face = [&](std::size_t l, std::size_t r) {
        amax = std::max(amax, std::max(u[l] > 0.0 ? ap(u[l]) : 0.0, u[r] > 0.0 ? ap(u[r]) : 0.0));
    };
    if (g.mode() == GridMode::Cartesian2D) {
        const int n = g.nx();
        for (int j = 0; j < n; ++j)
            for (int i = 1; i < n; ++i) face(g.idx(i - 1, j), g.idx(i, j));
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < n; ++i) face(g.idx(i, j - 1), g.idx(i, j));
    } else {
        for (int i = 1; i < g.nr(); ++i) face(i - 1, i);
    }
    if (cfg.epsilon > 0.0) amax = std::max(amax, cfg.epsilon);  // vacuum faces still diffuse

    const double inf = std::numeric_limits<double>::infinity();
    const double dt_diff = amax > 0.0 ? dx * dx / (2.0 * dim * amax) : inf;
    const double dt_adv = v.max_abs > 0.0 ? dx / v.max_abs : inf;
    double dt = cfg.cfl_safety * std::min(dt_diff, dt_adv);
    return std::min(dt, cfg.dt_max);
}

double continuation_exponent(const DiffusionSpec& diff, double m_star) {
    // Fit log A'(z) vs log z on the tail grid to read off the effective
    // growth exponent m - 1.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double lz = 2.0; lz <= 8.01; lz += 0.5) {
        const double z = std::pow(10.0, lz);
        const double ap = diff.aprime(z);
        if (!(ap > 0.0)) continue;
        const double x = std::log(z), y = std::log(ap);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 3) return 1.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return std::clamp(slope + 1.0, 1.0, m_star);
}

RunStatus detect_blowup(const std::vector<TrajectoryPoint>& traj, const BlowupParams& params,
                        double linf0, double* t_star) {
    if (t_star) *t_star = std::numeric_limits<double>::quiet_NaN();
    if (traj.size() < static_cast<std::size_t>(params.window) + 1) return RunStatus::Completed;

    double crossing = std::numeric_limits<double>::quiet_NaN();
    for (const TrajectoryPoint& p : traj)
        if (p.diag.linf > params.umax_multiplier * linf0) {
            crossing = p.diag.t;
            break;
        }
    if (std::isnan(crossing)) return RunStatus::Completed;

    // The continuation norm for the largest threshold must be rising across
    // the trailing window, not just above its initial value.
    const std::size_t last = traj.back().tail_norms.size();
    if (last == 0) return RunStatus::Completed;
    const std::size_t ki = last - 1;
    const std::size_t end = traj.size();
    for (std::size_t s = end - params.window; s < end; ++s) {
        if (!(traj[s].tail_norms[ki] > traj[s - 1].tail_norms[ki])) return RunStatus::Completed;
    }
    if (t_star) *t_star = crossing;
    return RunStatus::NumericalBlowup;
}

RunOutcome run(const SimConfig& cfg, const GridField& u0) {
    const ConvOperator conv = ConvOperator::build(cfg.grid, cfg.kernel);
    return run(cfg, u0, conv);
}

RunOutcome run(const SimConfig& cfg, const GridField& u0, const ConvOperator& conv) {
    if (!cfg.grid || !u0.grid().same_layout(*cfg.grid))
        throw std::invalid_argument("run: initial data does not live on the configured grid");
    if (u0.min_value() < 0.0) throw std::invalid_argument("run: negative initial data");
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");

    const EntropyDensity phi(cfg.diffusion);
    const CriticalMassPrediction pred = critical_mass(cfg.kernel, cfg.diffusion);

    RunOutcome out;
    out.tail_exponent_q = cfg.blowup.q_override > 0.0
                              ? cfg.blowup.q_override
                              : (pred.m_star > 1.0
                                     ? (2.0 - continuation_exponent(cfg.diffusion, pred.m_star)) /
                                           (2.0 - pred.m_star)
                                     : 1.0);
    const double linf0 = u0.linf();
    std::vector<double> thresholds;
    for (double kr : cfg.blowup.k_rel) thresholds.push_back(kr * linf0);

    std::unique_ptr<ConvOperator> virial_op;
    if (cfg.record_virial && !cfg.kernel.is_zero()) {
        const KernelSpec kspec = cfg.kernel;
        virial_op = std::make_unique<ConvOperator>(ConvOperator::build_profile(
            cfg.grid, [kspec](double s) { return s * kspec.eval(s).kp; }));
    }
    const auto A = a_of(cfg);

    GridField u = u0;
    double t = 0.0;
    double prev_f = 0.0, prev_dt = 0.0;
    bool have_prev_f = false;
    double last_record_t = -1.0;

    auto record = [&](const FaceVelocity& fv, double dt_used) {
        TrajectoryPoint p;
        p.diag.t = t;
        p.diag.mass = u.mass();
        p.diag.linf = u.linf();
        for (double pp : cfg.p_list) p.diag.lp[pp] = u.lp_norm(pp);
        p.diag.S = entropy(u, phi);
        double w = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            w += u[i] * fv.potential[i] * u.grid().cell_volume(i);
        p.diag.W = 0.5 * w;
        p.diag.F = p.diag.S - p.diag.W;
        p.diag.I = u.second_moment();
        p.diag.D = entropy_production(u, phi, conv);
        p.diag.dt_used = dt_used;
        for (double k : thresholds) {
            GridField excess = u;
            for (std::size_t i = 0; i < excess.size(); ++i)
                excess[i] = std::max(0.0, u[i] - k);
            p.tail_norms.push_back(excess.lp_norm(out.tail_exponent_q));
        }
        if (cfg.record_virial) {
            const Grid& g = u.grid();
            for (std::size_t i = 0; i < u.size(); ++i) p.int_a += A(u[i]) * g.cell_volume(i);
            if (virial_op) p.virial_w = virial_op->bilinear(u);
            if (g.mode() == GridMode::Cartesian2D) {
                const int n = g.nx();
                const double half = 0.5 * g.side(), dx = g.dx();
                for (int j = 0; j < n; ++j)
                    p.boundary_term +=
                        (A(u[g.idx(0, j)]) + A(u[g.idx(n - 1, j)])) * half * dx;
                for (int i = 0; i < n; ++i)
                    p.boundary_term +=
                        (A(u[g.idx(i, 0)]) + A(u[g.idx(i, n - 1)])) * half * dx;
            } else {
                p.boundary_term = A(u[g.nr() - 1]) * g.radius() * g.face_area(g.nr());
            }
        }
        out.trajectory.push_back(std::move(p));
        last_record_t = t;
    };

    try {
        while (true) {
            const FaceVelocity fv = velocity(u, conv);

            if (cfg.check_dissipation) {
                double w = 0.0;
                for (std::size_t i = 0; i < u.size(); ++i)
                    w += u[i] * fv.potential[i] * u.grid().cell_volume(i);
                const double f_now = entropy(u, phi) - 0.5 * w;
                const double slack =
                    1e-8 * (1.0 + std::abs(prev_f)) + cfg.dissipation_slack_c * prev_dt * prev_dt;
                if (have_prev_f && f_now > prev_f + slack) ++out.dissipation_violations;
                prev_f = f_now;
                have_prev_f = true;
            }

            if (out.steps % cfg.cadence_steps == 0) {
                record(fv, prev_dt);
                double tstar = 0.0;
                if (detect_blowup(out.trajectory, cfg.blowup, linf0, &tstar) ==
                    RunStatus::NumericalBlowup) {
                    out.status = RunStatus::NumericalBlowup;
                    out.t_star = tstar;
                    break;
                }
            }

            if (t >= cfg.t_end * (1.0 - 1e-12)) {
                out.status = RunStatus::Completed;
                break;
            }

            double dt = adaptive_dt(u, fv, cfg);
            if (dt < cfg.dt_min) {
                out.status = RunStatus::DtFloor;
                out.message = "adaptive dt collapsed below dt_min";
                break;
            }
            dt = std::min(dt, cfg.t_end - t);

            u = step(u, dt, fv, cfg);
            t += dt;
            prev_dt = dt;
            ++out.steps;
        }
        if (last_record_t < t) {
            const FaceVelocity fv = velocity(u, conv);
            record(fv, prev_dt);
        }
    } catch (const std::exception& e) {
        out.status = RunStatus::Error;
        out.message = e.what();
    }

    out.t_final = t;
    out.final_field = std::move(u);
    return out;
}

}  // namespace aggdiff
