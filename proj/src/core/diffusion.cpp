#include "diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "quadrature.hpp"

namespace aggdiff {

namespace {

std::pair<std::vector<double>, std::vector<double>> load_two_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table: " + path);
    std::vector<double> x, y;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two columns");
        x.push_back(a);
        y.push_back(b);
    }
    return {std::move(x), std::move(y)};
}

double sat_a(double z) { return z * z / (1.0 + z); }
double sat_aprime(double z) { return (z * z + 2.0 * z) / ((1.0 + z) * (1.0 + z)); }
// h and Phi for the saturated-linear family, from Phi'' = A'/z.
double sat_h(double z) { return std::log1p(z) - 1.0 / (1.0 + z) - std::log(2.0) + 0.5; }
double sat_phi(double z) { return z * (std::log1p(z) - 0.5 - std::log(2.0)); }

double pow_h(double m, double z) { return m * (std::pow(z, m - 1.0) - 1.0) / (m - 1.0); }
double pow_phi(double m, double z) { return (std::pow(z, m) - m * z) / (m - 1.0); }

}  // namespace

DiffusionSpec DiffusionSpec::power_law(double m) {
    if (m <= 1.0) throw std::invalid_argument("power_law diffusion: m > 1 required");
    DiffusionSpec s;
    s.family_ = DiffusionFamily::PowerLaw;
    s.m_ = m;
    return s;
}

DiffusionSpec DiffusionSpec::saturated_linear() {
    DiffusionSpec s;
    s.family_ = DiffusionFamily::SaturatedLinear;
    s.m_ = 1.0;
    return s;
}

DiffusionSpec DiffusionSpec::power_plus_linear(double m, double slope) {
    if (m <= 1.0 || slope < 0.0)
        throw std::invalid_argument("power_plus_linear: m > 1 and slope >= 0 required");
    DiffusionSpec s;
    s.family_ = DiffusionFamily::PowerPlusLinear;
    s.m_ = m;
    s.slope_ = slope;
    return s;
}

DiffusionSpec DiffusionSpec::custom(std::vector<double> z, std::vector<double> a,
                                    std::vector<double> aprime) {
    DiffusionSpec s;
    s.family_ = DiffusionFamily::Custom;
    s.a_table_ = std::make_shared<Pchip>(z, std::move(a));
    s.ap_table_ = std::make_shared<Pchip>(std::move(z), std::move(aprime));
    return s;
}

DiffusionSpec DiffusionSpec::custom_from_csv(const std::string& a_path, const std::string& ap_path) {
    auto [za, a] = load_two_columns(a_path);
    auto [zp, ap] = load_two_columns(ap_path);
    if (za != zp) throw std::runtime_error("custom diffusion: A and A' tables must share abscissae");
    return custom(std::move(za), std::move(a), std::move(ap));
}

double DiffusionSpec::a(double z) const {
    if (z < 0.0) throw std::domain_error("diffusion A: z >= 0 required");
    switch (family_) {
        case DiffusionFamily::PowerLaw: return std::pow(z, m_);
        case DiffusionFamily::SaturatedLinear: return sat_a(z);
        case DiffusionFamily::PowerPlusLinear: return std::pow(z, m_) + slope_ * sat_a(z);
        case DiffusionFamily::Custom: {
            const double zc = std::clamp(z, a_table_->x_min(), a_table_->x_max());
            double v = a_table_->eval(zc);
            // Linear continuation beyond the table, pinned A(0) = 0 below it.
            if (z > a_table_->x_max()) v += ap_table_->eval(a_table_->x_max()) * (z - a_table_->x_max());
            if (z < a_table_->x_min()) v *= z / a_table_->x_min();
            return v;
        }
    }
    return 0.0;
}

double DiffusionSpec::aprime(double z) const {
    if (z < 0.0) throw std::domain_error("diffusion A': z >= 0 required");
    switch (family_) {
        case DiffusionFamily::PowerLaw: return m_ * std::pow(z, m_ - 1.0);
        case DiffusionFamily::SaturatedLinear: return sat_aprime(z);
        case DiffusionFamily::PowerPlusLinear: return m_ * std::pow(z, m_ - 1.0) + slope_ * sat_aprime(z);
        case DiffusionFamily::Custom: {
            const double zc = std::clamp(z, ap_table_->x_min(), ap_table_->x_max());
            if (z < ap_table_->x_min()) return ap_table_->eval(ap_table_->x_min()) * z / ap_table_->x_min();
            return ap_table_->eval(zc);
        }
    }
    return 0.0;
}

std::string DiffusionSpec::describe() const {
    std::ostringstream ss;
    switch (family_) {
        case DiffusionFamily::PowerLaw: ss << "powerlaw(m=" << m_ << ")"; break;
        case DiffusionFamily::SaturatedLinear: ss << "saturated_linear"; break;
        case DiffusionFamily::PowerPlusLinear: ss << "power_plus_linear(m=" << m_ << ", slope=" << slope_ << ")"; break;
        case DiffusionFamily::Custom: ss << "custom"; break;
    }
    return ss.str();
}

DiffusionReport check_admissible_diffusion(const DiffusionSpec& spec) {
    DiffusionReport rep;

    // (D1): A' > 0 on probes spanning (0, 1e8].
    rep.d1 = true;
    for (int i = 0; i <= 180; ++i) {
        const double z = std::pow(10.0, -10.0 + 0.1 * i);
        const double ap = spec.aprime(z);
        if (!(ap > 0.0) || !std::isfinite(ap)) {
            rep.d1 = false;
            rep.diagnostic = "A'(z) <= 0 near z = " + std::to_string(z);
            break;
        }
    }

    // (D2): A' bounded below on the tail.
    double tail_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 70; ++i) {
        const double z = std::pow(10.0, 1.0 + 0.1 * i);
        tail_min = std::min(tail_min, spec.aprime(z));
    }
    rep.d2 = tail_min > 1e-12;
    if (!rep.d2 && rep.diagnostic.empty()) rep.diagnostic = "A'(z) not bounded below on the tail";

    // (D3): int_0^1 A'(z)/z dz converges under geometric endpoint refinement.
    const auto q = integrate_from_zero([&](double z) { return spec.aprime(z) / z; }, 1.0, 1e-10, 400);
    rep.d3 = q.converged;
    rep.d3_value = q.value;
    if (!rep.d3 && rep.diagnostic.empty())
        rep.diagnostic = "quadrature for (D3) did not converge under refinement toward 0";

    rep.overall = rep.d1 && rep.d2 && rep.d3;
    return rep;
}

EntropyDensity::EntropyDensity(DiffusionSpec spec) : spec_(std::move(spec)) {
    const DiffusionReport rep = check_admissible_diffusion(spec_);
    if (!rep.overall)
        throw std::runtime_error("entropy_density: diffusion spec not admissible (" + rep.diagnostic + ")");
    bound_c_ = rep.d3_value;
    has_closed_form_ = spec_.family() != DiffusionFamily::Custom;
    if (!has_closed_form_) {
        // Cache h on a dense log grid; custom tables are the only consumers.
        std::vector<double> zs, hs;
        for (int i = 0; i <= 2400; ++i) {
            const double z = std::pow(10.0, -9.0 + 0.0075 * i);  // 1e-9 .. 1e9
            zs.push_back(z);
            hs.push_back(h_quadrature(z));
        }
        h_cache_ = std::make_shared<Pchip>(std::move(zs), std::move(hs));
    }
}

double EntropyDensity::h_closed_form(double z, bool& ok) const {
    ok = true;
    switch (spec_.family()) {
        case DiffusionFamily::PowerLaw: return pow_h(spec_.m(), z);
        case DiffusionFamily::SaturatedLinear: return sat_h(z);
        case DiffusionFamily::PowerPlusLinear: return pow_h(spec_.m(), z) + spec_.slope() * sat_h(z);
        default: ok = false; return 0.0;
    }
}

double EntropyDensity::phi_closed_form(double z, bool& ok) const {
    ok = true;
    switch (spec_.family()) {
        case DiffusionFamily::PowerLaw: return pow_phi(spec_.m(), z);
        case DiffusionFamily::SaturatedLinear: return sat_phi(z);
        case DiffusionFamily::PowerPlusLinear: return pow_phi(spec_.m(), z) + spec_.slope() * sat_phi(z);
        default: ok = false; return 0.0;
    }
}

double EntropyDensity::h(double z) const {
    if (z < 0.0) throw std::domain_error("entropy h: z >= 0 required");
    if (z == 0.0) return -bound_c_;
    bool ok = false;
    const double v = h_closed_form(z, ok);
    if (ok) return v;
    if (h_cache_ && h_cache_->in_range(z)) return h_cache_->eval(z);
    return h_quadrature(z);
}

double EntropyDensity::phi(double z) const {
    if (z < 0.0) throw std::domain_error("entropy Phi: z >= 0 required");
    if (z == 0.0) return 0.0;
    bool ok = false;
    const double v = phi_closed_form(z, ok);
    if (ok) return v;
    return integrate_adaptive([&](double s) { return h(s); }, 0.0, z, 1e-10).value;
}

double EntropyDensity::h_quadrature(double z) const {
    if (z == 1.0) return 0.0;
    if (z <= 0.0) return -bound_c_;
    return integrate_adaptive([&](double s) { return spec_.aprime(s) / s; }, 1.0, z, 1e-11).value;
}

double EntropyDensity::phi_quadrature(double z) const {
    if (z <= 0.0) return 0.0;
    return integrate_adaptive([&](double s) { return h_quadrature(s); }, 0.0, z, 1e-10).value;
}

RegularizedDerivative::RegularizedDerivative(DiffusionSpec spec, double eps)
    : spec_(std::move(spec)), eps_(eps) {
    if (eps <= 0.0) throw std::invalid_argument("regularize: eps > 0 required");
}

double RegularizedDerivative::aprime(double z) const {
    // Smooth bump s(z) = 1/(1+z^2) in (0, 1] keeps the sandwich
    // A' + eps <= a_eps' <= A' + 2 eps.
    return spec_.aprime(z) + eps_ * (1.0 + 1.0 / (1.0 + z * z));
}

double RegularizedDerivative::a(double z) const {
    return spec_.a(z) + eps_ * (z + std::atan(z));
}

CriticalityClass classify_criticality(const DiffusionSpec& spec, double m_star) {
    if (m_star < 1.0) throw std::invalid_argument("classify_criticality: m* >= 1 required");
    CriticalityClass out;
    std::vector<double> lnz, lnphi;
    for (int i = 0; i <= 60; ++i) {
        const double z = std::pow(10.0, 2.0 + 0.1 * i);  // 1e2 .. 1e8
        const double v = spec.aprime(z) / std::pow(z, m_star - 1.0);
        out.tail_samples.push_back(v);
        if (v > 0) {
            lnz.push_back(std::log(z));
            lnphi.push_back(std::log(v));
        }
    }
    if (lnz.size() < 10)
        throw IndeterminateError("classify_criticality: tail ratio vanished, no trend available");

    // log-log trend of A'(z)/z^{m*-1}.
    const std::size_t n = lnz.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lnz[i]; sy += lnphi[i]; sxx += lnz[i] * lnz[i]; sxy += lnz[i] * lnphi[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double rms = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = lnphi[i] - intercept - slope * lnz[i];
        rms += e * e;
    }
    rms = std::sqrt(rms / n);
    if (rms > 0.25)
        throw IndeterminateError("classify_criticality: oscillatory tail with no power trend, indeterminate");

    if (slope > 0.01) {
        out.kind = Criticality::Subcritical;
        return out;
    }
    if (slope < -0.01) {
        out.kind = Criticality::Supercritical;
        return out;
    }
    out.kind = Criticality::Critical;
    // liminf proxy: minimum over the tail half of the grid.
    double ell = std::numeric_limits<double>::infinity();
    for (std::size_t i = out.tail_samples.size() / 2; i < out.tail_samples.size(); ++i)
        ell = std::min(ell, out.tail_samples[i]);
    out.ell = ell;
    return out;
}

double entropy_growth_limit(const std::function<double(double)>& phi, double m_star) {
    std::vector<double> lnzs, ts;
    for (int i = 0; i <= 12; ++i) {
        const double z = std::pow(10.0, 2.0 + 0.5 * i);  // 1e2 .. 1e8
        const double denom = (m_star > 1.0) ? std::pow(z, m_star) : z * std::log(z);
        ts.push_back(phi(z) / denom);
        lnzs.push_back(std::log(z));
    }
    // Divergence: steady growth with a large overall ratio.
    bool increasing = true;
    for (std::size_t i = 1; i < ts.size(); ++i) increasing = increasing && ts[i] >= ts[i - 1];
    if (increasing && ts.front() > 0 && ts.back() / ts.front() > 50.0)
        return std::numeric_limits<double>::infinity();

    // Trend confirmation on the tail with the model t = L + a/ln z.
    const std::size_t n0 = ts.size() - 6;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = n0; i < ts.size(); ++i) {
        const double x = 1.0 / lnzs[i];
        sx += x; sy += ts[i]; sxx += x * x; sxy += x * ts[i];
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double L = (sy - slope * sx) / n;
    double rms = 0.0, scale = std::max(1e-30, std::abs(L));
    for (std::size_t i = n0; i < ts.size(); ++i) {
        const double e = ts[i] - (L + slope / lnzs[i]);
        rms += e * e;
    }
    rms = std::sqrt(rms / n);
    if (rms > 0.05 * scale)
        throw IndeterminateError("entropy_growth_limit: non-monotone tail estimates, indeterminate");
    return L;
}

double entropy_growth_limit(const EntropyDensity& phi, double m_star) {
    return entropy_growth_limit([&](double z) { return phi.phi(z); }, m_star);
}

}  // namespace aggdiff
