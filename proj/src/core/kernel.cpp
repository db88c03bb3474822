#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "grid.hpp"
#include "quadrature.hpp"

namespace aggdiff {

KernelSpec KernelSpec::newtonian(int d, double r_max) {
    if (d < 2) throw std::invalid_argument("newtonian: d >= 2 required");
    KernelSpec s;
    s.dim_ = d;
    s.r_max_ = r_max;
    if (d == 2) {
        // Fundamental solution of -Laplace in 2D: -(1/2pi) ln r.
        s.family_ = KernelFamily::Logarithmic;
        s.c_ = 1.0 / (2.0 * M_PI);
    } else {
        s.family_ = KernelFamily::Newtonian;
        s.alpha_ = d - 2.0;
        s.c_ = 1.0 / ((d - 2.0) * unit_sphere_area(d));
    }
    return s;
}

KernelSpec KernelSpec::logarithmic(double c, int d, double r_max) {
    if (c <= 0.0) throw std::invalid_argument("logarithmic: strength c > 0 required");
    KernelSpec s;
    s.family_ = KernelFamily::Logarithmic;
    s.dim_ = d;
    s.c_ = c;
    s.r_max_ = r_max;
    return s;
}

KernelSpec KernelSpec::power_law(double c, double alpha, int d, double r_max) {
    if (c <= 0.0 || alpha <= 0.0) throw std::invalid_argument("power_law: c > 0 and alpha > 0 required");
    if (d >= 3 && alpha > d - 2.0 + 1e-12)
        throw std::invalid_argument("power_law: alpha <= d-2 required (singularity no worse than Newtonian)");
    if (d == 2) throw std::invalid_argument("power_law: no admissible power singularity in d = 2");
    KernelSpec s;
    s.family_ = KernelFamily::PowerLaw;
    s.dim_ = d;
    s.c_ = c;
    s.alpha_ = alpha;
    s.r_max_ = r_max;
    return s;
}

KernelSpec KernelSpec::gaussian(double sigma, int d, double r_max) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian: sigma > 0 required");
    KernelSpec s;
    s.family_ = KernelFamily::Gaussian;
    s.dim_ = d;
    s.sigma_ = sigma;
    s.r_max_ = r_max;
    return s;
}

KernelSpec KernelSpec::tabulated(std::vector<double> r, std::vector<double> k, int d) {
    if (r.empty() || r.front() <= 0.0)
        throw std::invalid_argument("tabulated: radii must be positive");
    KernelSpec s;
    s.family_ = KernelFamily::TabulatedRadial;
    s.dim_ = d;
    s.r_max_ = r.back();
    s.table_ = std::make_shared<Pchip>(std::move(r), std::move(k));
    return s;
}

KernelSpec KernelSpec::tabulated_from_csv(const std::string& path, int d) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kernel table: " + path);
    std::vector<double> r, k;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two columns (r, k)");
        if (!r.empty() && a <= r.back())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": r must be strictly increasing");
        r.push_back(a);
        k.push_back(b);
    }
    return tabulated(std::move(r), std::move(k), d);
}

KernelSpec KernelSpec::none(int d, double r_max) {
    KernelSpec s;
    s.family_ = KernelFamily::Gaussian;
    s.dim_ = d;
    s.sigma_ = 1.0;
    s.r_max_ = r_max;
    s.zero_ = true;
    return s;
}

KernelEval KernelSpec::eval(double r) const {
    if (!(r > 0.0)) throw std::domain_error("kernel eval: r > 0 required");
    KernelEval e;
    if (zero_) return e;
    switch (family_) {
        case KernelFamily::Newtonian:
        case KernelFamily::PowerLaw: {
            const double p = std::pow(r, -alpha_);
            e.k = c_ * p;
            e.kp = -alpha_ * c_ * p / r;
            e.kpp = alpha_ * (alpha_ + 1.0) * c_ * p / (r * r);
            break;
        }
        case KernelFamily::Logarithmic:
            e.k = -c_ * std::log(r);
            e.kp = -c_ / r;
            e.kpp = c_ / (r * r);
            break;
        case KernelFamily::Gaussian: {
            const double s2 = sigma_ * sigma_;
            e.k = std::exp(-0.5 * r * r / s2);
            e.kp = -(r / s2) * e.k;
            e.kpp = (r * r / (s2 * s2) - 1.0 / s2) * e.k;
            break;
        }
        case KernelFamily::TabulatedRadial:
            if (r > table_->x_max())
                throw std::out_of_range("tabulated kernel: r beyond tabulated range");
            if (r < table_->x_min()) {
                // Continue toward 0 with the power law matching value and slope
                // at the first knot; singular kernels are power-like there.
                const double x0 = table_->x_min();
                const double y0 = table_->eval(x0);
                const double d0 = table_->derivative(x0);
                const double q = (y0 != 0.0) ? x0 * d0 / y0 : 0.0;
                if (y0 > 0.0 && std::isfinite(q)) {
                    e.k = y0 * std::pow(r / x0, q);
                    e.kp = q * e.k / r;
                    e.kpp = q * (q - 1.0) * e.k / (r * r);
                } else {
                    e.k = y0 + d0 * (r - x0);
                    e.kp = d0;
                    e.kpp = 0.0;
                }
                break;
            }
            e.k = table_->eval(r);
            e.kp = table_->derivative(r);
            e.kpp = table_->second_derivative(r);
            break;
    }
    if (!std::isfinite(e.k)) throw std::runtime_error("kernel eval: non-finite value");
    return e;
}

KernelSpec KernelSpec::mollified(double eps, int table_size) const {
    if (eps <= 0.0) throw std::invalid_argument("mollified: eps > 0 required");
    std::vector<double> rs(table_size), ks(table_size);
    const double r_lo = r_max_ / (20.0 * table_size);
    for (int i = 0; i < table_size; ++i) {
        // log-spaced near zero, covering (r_lo, r_max]
        const double t = static_cast<double>(i) / (table_size - 1);
        rs[i] = r_lo * std::pow(r_max_ / r_lo, t);
    }
    const double norm = 1.0 / (eps * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < table_size; ++i) {
        const double r = rs[i];
        // Even extension through 0: integrate k(|s|) against the Gaussian.
        auto f = [&](double s) {
            const double a = std::abs(s);
            const double kv = (a < 1e-14) ? this->k(1e-14) : this->k(a);
            const double z = (s - r) / eps;
            return norm * std::exp(-0.5 * z * z) * kv;
        };
        ks[i] = integrate_adaptive(f, r - 8.0 * eps, r + 8.0 * eps, 1e-9).value;
    }
    return tabulated(std::move(rs), std::move(ks), dim_);
}

std::string KernelSpec::describe() const {
    std::ostringstream ss;
    if (zero_) return "none";
    switch (family_) {
        case KernelFamily::Newtonian: ss << "newtonian(d=" << dim_ << ")"; break;
        case KernelFamily::Logarithmic: ss << "logarithmic(c=" << c_ << ")"; break;
        case KernelFamily::PowerLaw: ss << "powerlaw(c=" << c_ << ", alpha=" << alpha_ << ")"; break;
        case KernelFamily::Gaussian: ss << "gaussian(sigma=" << sigma_ << ")"; break;
        case KernelFamily::TabulatedRadial: ss << "tabulated"; break;
    }
    return ss.str();
}

namespace {

// Third radial derivative via central differences of k''.
double kppp(const KernelSpec& spec, double r) {
    const double h = 1e-4 * r;
    return (spec.eval(r + h).kpp - spec.eval(r - h).kpp) / (2.0 * h);
}

bool is_monotone(const std::vector<double>& v, double tol_scale) {
    bool nondec = true, noninc = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double slack = tol_scale * (1.0 + std::abs(v[i]) + std::abs(v[i - 1]));
        if (v[i] < v[i - 1] - slack) nondec = false;
        if (v[i] > v[i - 1] + slack) noninc = false;
    }
    return nondec || noninc;
}

struct LinFit {
    double slope = 0.0, intercept = 0.0, residual = 0.0;  // residual: 1 - R^2 style
};

LinFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    LinFit f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.residual = (ss_tot > 0) ? std::sqrt(ss_res / ss_tot) : 0.0;
    return f;
}

}  // namespace

AdmissibilityReport check_admissible(const KernelSpec& spec, const ProbePlan& probe) {
    AdmissibilityReport rep;
    const int d = spec.dim();
    const double delta = std::min(probe.delta, 0.5 * spec.r_max());
    const int n = std::max(probe.samples, 16);

    // (R): finite evaluation of k, k', k'' on log-spaced probes across the range.
    rep.finite_eval = true;
    std::vector<double> rs(n), kv(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        rs[i] = 1e-6 * spec.r_max() * std::pow(1e6, t);  // (1e-6 .. 1) * r_max
        KernelEval e;
        try {
            e = spec.eval(rs[i]);
        } catch (const std::exception& ex) {
            throw std::runtime_error(std::string("admissibility probe failed under (R): ") + ex.what());
        }
        if (!std::isfinite(e.k) || !std::isfinite(e.kp) || !std::isfinite(e.kpp)) rep.finite_eval = false;
        kv[i] = e.k;
    }

    // L1_loc: radial integral of |k(r)| r^{d-1} near the origin must converge.
    {
        auto f = [&](double r) { return std::abs(spec.k(r)) * std::pow(r, d - 1); };
        rep.l1loc = integrate_from_zero(f, delta, 1e-9, 200).converged;
    }

    // (KN): non-increasing profile.
    {
        bool ok = true;
        const double scale = std::max(1.0, std::abs(kv[0]));
        for (int i = 1; i < n; ++i)
            if (kv[i] > kv[i - 1] + probe.tol * scale) ok = false;
        rep.radial_nonincreasing = ok;
    }

    // (MN): k'' and k'/r monotone on (0, delta).
    {
        std::vector<double> kpp_v, kpr_v;
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            const double r = 1e-5 * delta * std::pow(1e5, t);
            const KernelEval e = spec.eval(r);
            kpp_v.push_back(e.kpp);
            kpr_v.push_back(e.kp / r);
        }
        rep.monotone_derivatives = is_monotone(kpp_v, probe.tol) && is_monotone(kpr_v, probe.tol);
    }

    // (BD): |D^3 K(x)| |x|^{d+1} bounded as x -> 0. All radial third-derivative
    // components are controlled by |k'''| + |k''|/r + |k'|/r^2.
    {
        std::vector<double> lr, lg;
        double sup = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            const double r = 1e-4 * delta * std::pow(1e4, t);
            const KernelEval e = spec.eval(r);
            const double g = (std::abs(kppp(spec, r)) + 3.0 * std::abs(e.kpp) / r +
                              3.0 * std::abs(e.kp) / (r * r)) *
                             std::pow(r, d + 1);
            sup = std::max(sup, g);
            if (g > 0) {
                lr.push_back(std::log(r));
                lg.push_back(std::log(g));
            }
        }
        rep.bd_sup = sup;
        // Bounded iff g(r) does not blow up toward 0, i.e. the log-log trend
        // is non-decreasing in r (slope >= 0 up to noise).
        bool ok = true;
        if (lr.size() >= 4) ok = fit_line(lr, lg).slope > -0.1;
        rep.third_derivative_bound = ok && std::isfinite(sup);
    }

    rep.overall = rep.finite_eval && rep.l1loc && rep.radial_nonincreasing &&
                  rep.monotone_derivatives && rep.third_derivative_bound;
    return rep;
}

SingularityClass singular_order(const KernelSpec& spec, double r_lo, double r_hi, double fit_tol) {
    if (r_lo <= 0.0 || r_hi <= 0.0) {
        r_lo = 1e-5 * spec.r_max();
        r_hi = 1e-3 * spec.r_max();
    }
    if (!(r_lo < r_hi)) throw std::invalid_argument("singular_order: need r_lo < r_hi");
    const int n = 40;
    std::vector<double> rs(n), ks(n), lnr(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        rs[i] = r_lo * std::pow(r_hi / r_lo, t);
        lnr[i] = std::log(rs[i]);
        ks[i] = spec.k(rs[i]);
    }
    SingularityClass sc;
    sc.r_lo = r_lo;
    sc.r_hi = r_hi;

    // Bounded: small relative variation over the window.
    double kmax = -1e300, kmin = 1e300, kabs = 0.0;
    for (double v : ks) {
        kmax = std::max(kmax, v);
        kmin = std::min(kmin, v);
        kabs = std::max(kabs, std::abs(v));
    }
    const double relvar = (kabs > 0) ? (kmax - kmin) / kabs : 0.0;
    if (relvar < 0.1) {
        sc.kind = SingularityClass::Kind::Bounded;
        sc.residual = relvar;
        return sc;
    }

    // Logarithmic: k = -c ln r + b.
    const LinFit logfit = fit_line(lnr, ks);
    if (logfit.residual < fit_tol && -logfit.slope > 0.0) {
        sc.kind = SingularityClass::Kind::Logarithmic;
        sc.c = -logfit.slope;
        sc.residual = logfit.residual;
        return sc;
    }

    // Power: ln k = ln c - alpha ln r (requires positive k on the window).
    bool positive = true;
    for (double v : ks) positive = positive && v > 0.0;
    if (positive) {
        std::vector<double> lnk(n);
        for (int i = 0; i < n; ++i) lnk[i] = std::log(ks[i]);
        const LinFit pfit = fit_line(lnr, lnk);
        const double alpha = -pfit.slope;
        if (pfit.residual < fit_tol && alpha > 0.05) {
            sc.kind = SingularityClass::Kind::Power;
            sc.alpha = alpha;
            sc.c = std::exp(pfit.intercept);
            sc.residual = pfit.residual;
            return sc;
        }
        if (pfit.residual < fit_tol && alpha <= 0.05) {
            sc.kind = SingularityClass::Kind::Bounded;
            sc.residual = pfit.residual;
            return sc;
        }
    }
    throw std::runtime_error("singular_order: profile matches no hypothesis (power/log/bounded) within tolerance");
}

double critical_exponent(const SingularityClass& sc, int d) {
    if (sc.kind != SingularityClass::Kind::Power) return 1.0;
    if (d == 2)
        throw std::runtime_error("critical_exponent: power singularity is not admissible in d = 2");
    if (sc.alpha > d - 2.0 + 0.05)
        throw std::runtime_error("critical_exponent: alpha > d-2, singularity worse than Newtonian");
    const double alpha = std::min(sc.alpha, d - 2.0);
    return 1.0 + alpha / d;
}

double critical_exponent(const KernelSpec& spec) {
    if (spec.is_zero()) return 1.0;
    // Exact shortcut for analytic families; tabulated profiles get fitted.
    switch (spec.family()) {
        case KernelFamily::Newtonian:
        case KernelFamily::PowerLaw: {
            SingularityClass sc;
            sc.kind = SingularityClass::Kind::Power;
            sc.alpha = spec.exponent();
            sc.c = spec.strength();
            return critical_exponent(sc, spec.dim());
        }
        case KernelFamily::Logarithmic:
        case KernelFamily::Gaussian:
            return 1.0;
        case KernelFamily::TabulatedRadial:
            return critical_exponent(singular_order(spec), spec.dim());
    }
    return 1.0;
}

}  // namespace aggdiff
