#pragma once

#include <stdexcept>
#include <vector>

namespace aggdiff {

// Monotone cubic (Fritsch-Carlson) interpolation of tabulated data with
// strictly increasing abscissae. Shape-preserving: no overshoot between
// knots, so monotone data stays monotone.
class Pchip {
  public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool in_range(double x) const { return x >= x_.front() && x <= x_.back(); }

  private:
    std::size_t segment(double x) const;
    std::vector<double> x_, y_, d_;  // knots, values, knot derivatives
};

}  // namespace aggdiff
