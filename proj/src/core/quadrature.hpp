#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace aggdiff {

// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
    static constexpr int n = 8;
    static const std::array<double, 8> nodes;
    static const std::array<double, 8> weights;
};

// Fixed-order Gauss-Legendre integral of f on [a, b].
double gl8(const std::function<double(double)>& f, double a, double b);

// Adaptive Gauss-Legendre quadrature with interval bisection.
// Stops when the local error estimate satisfies the mixed tolerance
// |I_fine - I_coarse| <= abs_tol + rel_tol * |I_fine| (budgeted globally).
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;
};

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-11, double abs_tol = 0.0,
                              int max_depth = 48);

// Integral of f over (0, b] where f may have an integrable singularity at 0.
// Uses geometrically graded panels toward the origin and reports whether the
// panel series converged. Non-convergence means the integral diverges (or
// decays too slowly to tell), which callers treat as failure.
struct SingularQuadResult {
    double value = 0.0;
    bool converged = true;
    double last_panel = 0.0;
};

SingularQuadResult integrate_from_zero(const std::function<double(double)>& f, double b,
                                       double rel_tol = 1e-11, int max_octaves = 900);

}  // namespace aggdiff
