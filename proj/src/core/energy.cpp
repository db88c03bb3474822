#include "energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aggdiff {

double entropy(const GridField& u, const EntropyDensity& phi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] <= 0.0) continue;  // Phi(0) = 0
        acc += phi.phi(u[i]) * u.grid().cell_volume(i);
    }
    return acc;
}

double interaction(const GridField& u, const ConvOperator& conv) {
    return 0.5 * conv.bilinear(u);
}

double free_energy(const GridField& u, const EntropyDensity& phi, const ConvOperator& conv) {
    return entropy(u, phi) - interaction(u, conv);
}

double second_moment(const GridField& u) { return u.second_moment(); }

namespace {

// Entropic face mean: u_f = dA/dh, which makes u_f (dh)^2 = dA dh, the
// discrete chain-rule partner of dS/dt. Falls back to the arithmetic mean
// when the denominators degenerate.
double face_density(const EntropyDensity& phi, double ul, double ur) {
    const double dh = phi.h(ur) - phi.h(ul);
    const double da = phi.spec().a(ur) - phi.spec().a(ul);
    if (std::abs(dh) > 1e-300 && da * dh > 0.0) return da / dh;
    return 0.5 * (ul + ur);
}

}  // namespace

double entropy_production(const GridField& u, const EntropyDensity& phi, const ConvOperator& conv,
                          double vacuum_floor) {
    const Grid& g = u.grid();
    const std::vector<double> pot = conv.potential(u);
    const double floor = vacuum_floor * std::max(u.linf(), 1e-300);
    double acc = 0.0;
    auto face_term = [&](std::size_t a, std::size_t b, double dx, double face_vol) {
        const double ul = u[a], ur = u[b];
        if (ul < floor && ur < floor) return;
        const double uf = face_density(phi, ul, ur);
        if (uf <= 0.0) return;
        const double grad_h = (phi.h(ur) - phi.h(ul)) / dx;
        const double v = (pot[b] - pot[a]) / dx;
        const double diff = grad_h - v;
        acc += uf * diff * diff * face_vol;
    };
    if (g.mode() == GridMode::Cartesian2D) {
        const int n = g.nx();
        const double dx = g.dx();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i + 1 < n; ++i)
                face_term(g.idx(i, j), g.idx(i + 1, j), dx, dx * dx);
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i < n; ++i)
                face_term(g.idx(i, j), g.idx(i, j + 1), dx, dx * dx);
    } else {
        const int nr = g.nr();
        const double dr = g.dx();
        for (int i = 0; i + 1 < nr; ++i)
            face_term(i, i + 1, dr, g.face_area(i + 1) * dr);
    }
    return acc;
}

double hls_ratio(const GridField& u, const ConvOperator& power_conv, double alpha, double m_star) {
    if (!(m_star > 1.0)) throw std::invalid_argument("hls_ratio: m* > 1 required");
    const double mass = u.mass();
    if (mass <= 0.0) throw std::runtime_error("hls_ratio: zero field is undefined");
    const double numer = power_conv.bilinear(u);
    double lm = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        lm += std::pow(u[i], m_star) * u.grid().cell_volume(i);
    (void)alpha;
    return numer / (std::pow(mass, 2.0 - m_star) * lm);
}

namespace {

double ratio_of_profile(const ConvOperator& conv, const std::shared_ptr<const Grid>& grid,
                        double m_star, const std::function<double(double)>& profile) {
    GridField u(grid);
    for (int i = 0; i < grid->nr(); ++i) u[i] = std::max(0.0, profile(grid->r_center(i)));
    if (u.mass() <= 0.0) return 0.0;
    return hls_ratio(u, conv, 0.0, m_star);
}

}  // namespace

CmstarEstimate estimate_cmstar(double alpha, int d, int nr, double radius) {
    const double m_star = 1.0 + alpha / d;
    if (!(m_star > 1.0) || m_star > 2.0 - 2.0 / d + 1e-12)
        throw std::invalid_argument("estimate_cmstar: need 1 < 1 + alpha/d <= 2 - 2/d");
    auto grid = std::make_shared<Grid>(Grid::radial(d, nr, radius));
    const KernelSpec pk = KernelSpec::power_law(1.0, alpha, d, 4.0 * radius);
    const ConvOperator conv = ConvOperator::build(grid, pk);

    CmstarEstimate best;
    auto consider = [&](double value, double shape, double scale) {
        if (value > best.value) {
            best.value = value;
            best.best_shape = shape;
            best.best_scale = scale;
        }
    };

    // Compactly supported candidates (1 - (r/s)^2)_+^beta; the known extremal
    // family for m* = 2 - 2/d lives here.
    for (double s : {0.4 * radius, 0.6 * radius, 0.8 * radius}) {
        for (double beta = 0.25; beta <= 8.0; beta *= 1.18920711500272103) {  // quarter-octave scan
            const double v = ratio_of_profile(conv, grid, m_star, [&](double r) {
                const double t = 1.0 - (r / s) * (r / s);
                return t > 0.0 ? std::pow(t, beta) : 0.0;
            });
            consider(v, beta, s);
        }
    }
    // Generalized Gaussians exp(-(r/s)^p).
    for (double s : {0.15 * radius, 0.25 * radius, 0.4 * radius}) {
        for (double p = 1.0; p <= 4.01; p += 0.5) {
            const double v = ratio_of_profile(conv, grid, m_star, [&](double r) {
                return std::exp(-std::pow(r / s, p));
            });
            consider(v, -p, s);
        }
    }
    // Golden-section refinement in the winning beta direction.
    if (best.best_shape > 0.0) {
        double lo = best.best_shape / 1.4, hi = best.best_shape * 1.4;
        const double gr = 0.618033988749895;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        auto eval_beta = [&](double beta) {
            const double s = best.best_scale;
            return ratio_of_profile(conv, grid, m_star, [&](double r) {
                const double t = 1.0 - (r / s) * (r / s);
                return t > 0.0 ? std::pow(t, beta) : 0.0;
            });
        };
        double f1 = eval_beta(x1), f2 = eval_beta(x2);
        for (int it = 0; it < 24; ++it) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo); f2 = eval_beta(x2);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo); f1 = eval_beta(x1);
            }
        }
        consider(std::max(f1, f2), 0.5 * (lo + hi), best.best_scale);
    }
    if (best.value <= 0.0) throw std::runtime_error("estimate_cmstar: optimizer found no improving profile");
    return best;
}

double cmstar_constant(double alpha, int d) {
    // Pinned coordinate-ascent results (lower bounds on the true constants),
    // frozen from estimate_cmstar at nr = 512, radius = 4.
    if (d == 3 && std::abs(alpha - 1.0) < 1e-12) return 2.183325289;
    const CmstarEstimate est = estimate_cmstar(alpha, d);
    return est.value;
}

CriticalMassPrediction critical_mass(const KernelSpec& kernel, const DiffusionSpec& diff) {
    CriticalMassPrediction out;
    const int d = kernel.dim();

    // Kernel singularity: analytic families are read off directly, tables fitted.
    SingularityClass sc;
    switch (kernel.family()) {
        case KernelFamily::Newtonian:
        case KernelFamily::PowerLaw:
            sc.kind = SingularityClass::Kind::Power;
            sc.c = kernel.strength();
            sc.alpha = kernel.exponent();
            break;
        case KernelFamily::Logarithmic:
            sc.kind = SingularityClass::Kind::Logarithmic;
            sc.c = kernel.strength();
            break;
        case KernelFamily::Gaussian:
            sc.kind = SingularityClass::Kind::Bounded;
            break;
        case KernelFamily::TabulatedRadial:
            sc = singular_order(kernel);
            break;
    }
    if (kernel.is_zero()) sc = SingularityClass{};
    out.m_star = critical_exponent(sc, d);
    out.kernel_c = (sc.kind == SingularityClass::Kind::Bounded) ? 0.0 : sc.c;

    const CriticalityClass crit = classify_criticality(diff, out.m_star);
    out.criticality = crit.kind;
    const double inf = std::numeric_limits<double>::infinity();

    if (crit.kind == Criticality::Subcritical || out.kernel_c == 0.0) {
        out.regime = MassRegime::Infinite;
        out.mass = inf;
        out.entropy_limit = inf;
        return out;
    }

    if (crit.kind == Criticality::Supercritical) {
        // lim Phi(z)/z^{m*} = 0: the formula mass degenerates to zero, i.e.
        // blow-up data exists at every mass.
        out.regime = (out.m_star > 1.0) ? MassRegime::PowerLaw : MassRegime::Logarithmic;
        out.entropy_limit = 0.0;
        out.mass = 0.0;
        if (out.m_star > 1.0) out.cmstar = cmstar_constant(sc.alpha, d);
        return out;
    }

    const EntropyDensity phi(diff);
    out.entropy_limit = entropy_growth_limit(phi, out.m_star);
    if (!std::isfinite(out.entropy_limit)) {
        out.regime = MassRegime::Infinite;
        out.mass = inf;
        return out;
    }

    if (out.m_star > 1.0) {
        out.regime = MassRegime::PowerLaw;
        out.cmstar = cmstar_constant(sc.alpha, d);
        out.mass = std::pow(2.0 * out.entropy_limit / (out.cmstar * out.kernel_c),
                            1.0 / (2.0 - out.m_star));
    } else {
        out.regime = MassRegime::Logarithmic;
        out.mass = 2.0 * d * out.entropy_limit / out.kernel_c;
    }
    return out;
}

}  // namespace aggdiff
