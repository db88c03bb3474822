#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pchip.hpp"

namespace aggdiff {

enum class DiffusionFamily { PowerLaw, SaturatedLinear, PowerPlusLinear, Custom };

// Diffusion nonlinearity A(z) with A(0) = 0 and A' > 0 on (0, inf).
class DiffusionSpec {
  public:
    static DiffusionSpec power_law(double m);
    // A(z) = z^2/(1+z): degenerate at 0, asymptotically linear.
    static DiffusionSpec saturated_linear();
    // A(z) = z^m + slope * z^2/(1+z): power law plus a saturating linear tail.
    static DiffusionSpec power_plus_linear(double m, double slope);
    // Joint samples of A and A'; A' is never obtained by differencing A.
    static DiffusionSpec custom(std::vector<double> z, std::vector<double> a,
                                std::vector<double> aprime);
    static DiffusionSpec custom_from_csv(const std::string& a_path, const std::string& aprime_path);

    DiffusionFamily family() const { return family_; }
    double a(double z) const;
    double aprime(double z) const;
    double m() const { return m_; }
    double slope() const { return slope_; }

    std::string describe() const;

  private:
    DiffusionSpec() = default;
    DiffusionFamily family_ = DiffusionFamily::PowerLaw;
    double m_ = 2.0, slope_ = 0.0;
    std::shared_ptr<const Pchip> a_table_, ap_table_;
};

struct DiffusionReport {
    bool d1 = false;  // A' > 0 on (0, inf) probes
    bool d2 = false;  // A'(z) > c for z > z_c
    bool d3 = false;  // int_0^1 A'(z)/z dz < inf
    bool overall = false;
    double d3_value = 0.0;  // the integral when convergent
    std::string diagnostic;
};

DiffusionReport check_admissible_diffusion(const DiffusionSpec& spec);

// Entropy density Phi with Phi'' = A'(z)/z, Phi'(1) = 0, Phi(0) = 0, and
// h = Phi'. Built-in families use closed forms; the nested-quadrature route
// is always available as phi_quadrature for cross-checks.
class EntropyDensity {
  public:
    explicit EntropyDensity(DiffusionSpec spec);

    double h(double z) const;    // h(z) = int_1^z A'(s)/s ds
    double phi(double z) const;  // Phi(z) = int_0^z h(s) ds

    // Pure nested adaptive quadrature evaluation (relative target 1e-9).
    double h_quadrature(double z) const;
    double phi_quadrature(double z) const;

    // sup_{(0,1]} |h| = int_0^1 A'(s)/s ds; finite by (D3). The entropy obeys
    // S(u) >= -2 * entropy_bound_constant() * mass.
    double entropy_bound_constant() const { return bound_c_; }

    const DiffusionSpec& spec() const { return spec_; }

  private:
    double phi_closed_form(double z, bool& ok) const;
    double h_closed_form(double z, bool& ok) const;
    DiffusionSpec spec_;
    double bound_c_ = 0.0;
    bool has_closed_form_ = false;
    std::shared_ptr<const Pchip> h_cache_;  // cached h on a log grid (custom specs)
};

// Smooth regularized derivative: A'(z) + eps <= a_eps'(z) <= A'(z) + 2 eps.
class RegularizedDerivative {
  public:
    RegularizedDerivative(DiffusionSpec spec, double eps);
    double aprime(double z) const;
    // Antiderivative with A_eps(0) = 0, used for regularized diffusive fluxes.
    double a(double z) const;
    double eps() const { return eps_; }

  private:
    DiffusionSpec spec_;
    double eps_;
};

// Raised when a tail fit has no usable trend: the caller gets a diagnostic
// instead of a guessed classification.
struct IndeterminateError : std::runtime_error {
    explicit IndeterminateError(const std::string& what) : std::runtime_error(what) {}
};

enum class Criticality { Subcritical, Critical, Supercritical };

struct CriticalityClass {
    Criticality kind = Criticality::Subcritical;
    double ell = 0.0;  // liminf A'(z)/z^{m*-1} when critical
    std::vector<double> tail_samples;
};

// Tail-grid estimate of liminf_{z->inf} A'(z)/z^{m*-1} over z in [1e2, 1e8].
// Oscillatory tails with no trend raise rather than guess.
CriticalityClass classify_criticality(const DiffusionSpec& spec, double m_star);

// lim Phi(z)/z^{m*} (m* > 1) or Phi(z)/(z ln z) (m* = 1) on a geometric tail
// grid with 1/ln z trend extrapolation; infinity() when diverging.
double entropy_growth_limit(const EntropyDensity& phi, double m_star);
// Same estimator for an arbitrary Phi evaluator (analytic cross-checks).
double entropy_growth_limit(const std::function<double(double)>& phi, double m_star);

}  // namespace aggdiff
