#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pchip.hpp"

namespace aggdiff {

enum class KernelFamily { Newtonian, Logarithmic, PowerLaw, Gaussian, TabulatedRadial };

struct KernelEval {
    double k = 0.0;
    double kp = 0.0;   // k'(r)
    double kpp = 0.0;  // k''(r)
};

// Radial interaction kernel K(x) = k(|x|). Immutable after construction.
class KernelSpec {
  public:
    static KernelSpec newtonian(int d, double r_max = 10.0);
    static KernelSpec logarithmic(double c, int d = 2, double r_max = 10.0);
    static KernelSpec power_law(double c, double alpha, int d, double r_max = 10.0);
    static KernelSpec gaussian(double sigma, int d, double r_max = 10.0);
    static KernelSpec tabulated(std::vector<double> r, std::vector<double> k, int d);
    // Two-column CSV (r, k) with strictly increasing r.
    static KernelSpec tabulated_from_csv(const std::string& path, int d);
    // Identically-zero kernel (no aggregation).
    static KernelSpec none(int d, double r_max = 10.0);

    KernelFamily family() const { return family_; }
    int dim() const { return dim_; }
    double r_max() const { return r_max_; }
    bool is_zero() const { return zero_; }

    // Radial profile and first two derivatives at r > 0.
    KernelEval eval(double r) const;
    double k(double r) const { return eval(r).k; }

    // Mollified copy: the radial profile smoothed by a Gaussian of width eps
    // (even extension through r = 0), returned as a tabulated kernel.
    KernelSpec mollified(double eps, int table_size = 600) const;

    // Family parameters (meaning depends on family).
    double strength() const { return c_; }
    double exponent() const { return alpha_; }
    double sigma() const { return sigma_; }

    std::string describe() const;

  private:
    KernelSpec() = default;
    KernelFamily family_ = KernelFamily::Gaussian;
    int dim_ = 2;
    double r_max_ = 10.0;
    double c_ = 0.0, alpha_ = 0.0, sigma_ = 1.0;
    bool zero_ = false;
    std::shared_ptr<const Pchip> table_;
};

struct ProbePlan {
    double delta = 0.1;      // interval (0, delta) for the near-origin conditions
    int samples = 200;
    double tol = 1e-9;       // slack for monotonicity comparisons (relative)
};

struct AdmissibilityReport {
    bool finite_eval = false;        // (R) proxy: k, k', k'' finite on all probes
    bool l1loc = false;
    bool radial_nonincreasing = false;  // (KN)
    bool monotone_derivatives = false;  // (MN) on (0, delta)
    bool third_derivative_bound = false;  // (BD)
    double bd_sup = 0.0;             // measured sup |D^3 K| * |x|^{d+1} over probes
    bool overall = false;
};

AdmissibilityReport check_admissible(const KernelSpec& spec, const ProbePlan& probe = {});

struct SingularityClass {
    enum class Kind { Power, Logarithmic, Bounded };
    Kind kind = Kind::Bounded;
    double c = 0.0;       // leading coefficient (power or log)
    double alpha = 0.0;   // power exponent (kind == Power)
    double residual = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
};

// Least-squares classification of the small-r behavior of k over (r_lo, r_hi).
// Decides bounded vs logarithmic vs power and extracts the leading coefficient.
SingularityClass singular_order(const KernelSpec& spec, double r_lo = 0.0, double r_hi = 0.0,
                                double fit_tol = 0.05);

// Critical exponent m* from the singularity class: power c r^{-alpha} with
// alpha = d/p maps to m* = 1 + alpha/d, logarithmic/bounded to m* = 1.
// Requires alpha <= d-2 for d >= 3; d = 2 admits at worst log singularities.
double critical_exponent(const SingularityClass& sc, int d);
double critical_exponent(const KernelSpec& spec);

}  // namespace aggdiff
