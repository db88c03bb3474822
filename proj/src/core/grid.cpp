#include "grid.hpp"

#include <algorithm>
#include <cmath>

namespace aggdiff {

double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

Grid Grid::cartesian2d(int nx, int ny, double side) {
    if (nx < 2 || ny < 2 || side <= 0.0) throw std::invalid_argument("cartesian2d: bad grid parameters");
    if (nx != ny) throw std::invalid_argument("cartesian2d: grid must be square (nx == ny)");
    Grid g;
    g.mode_ = GridMode::Cartesian2D;
    g.dim_ = 2;
    g.nx_ = nx;
    g.ny_ = ny;
    g.extent_ = side;
    g.dx_ = side / nx;
    g.domain_volume_ = side * side;
    g.volumes_.assign(static_cast<std::size_t>(nx) * ny, g.dx_ * g.dx_);
    return g;
}

Grid Grid::radial(int d, int nr, double radius) {
    if (d < 2 || nr < 2 || radius <= 0.0) throw std::invalid_argument("radial: bad grid parameters");
    Grid g;
    g.mode_ = GridMode::Radial;
    g.dim_ = d;
    g.nx_ = nr;
    g.ny_ = 1;
    g.extent_ = radius;
    g.dx_ = radius / nr;
    const double omega = unit_sphere_area(d);
    g.volumes_.resize(nr);
    for (int i = 0; i < nr; ++i) {
        const double r0 = i * g.dx_, r1 = (i + 1) * g.dx_;
        g.volumes_[i] = omega / d * (std::pow(r1, d) - std::pow(r0, d));
    }
    g.domain_volume_ = omega / d * std::pow(radius, d);
    return g;
}

double Grid::face_area(int i) const {
    const double r = r_face(i);
    if (r <= 0.0) return 0.0;
    return unit_sphere_area(dim_) * std::pow(r, dim_ - 1);
}

double Grid::center_radius2(std::size_t i) const {
    if (mode_ == GridMode::Radial) {
        const double r = r_center(static_cast<int>(i));
        return r * r;
    }
    const int ix = static_cast<int>(i % nx_);
    const int iy = static_cast<int>(i / nx_);
    const double x = x_center(ix), y = y_center(iy);
    return x * x + y * y;
}

bool Grid::same_layout(const Grid& other) const {
    return mode_ == other.mode_ && dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ &&
           extent_ == other.extent_;
}

double GridField::mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * grid_->cell_volume(i);
    return m;
}

double GridField::linf() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridField::lp_norm(double p) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        acc += std::pow(std::abs(values_[i]), p) * grid_->cell_volume(i);
    return std::pow(acc, 1.0 / p);
}

double GridField::min_value() const {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) m = std::min(m, v);
    return m;
}

double GridField::second_moment() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        acc += grid_->center_radius2(i) * values_[i] * grid_->cell_volume(i);
    return acc;
}

void GridField::normalize_mass(double target) {
    const double m = mass();
    if (m <= 0.0) throw std::runtime_error("normalize_mass: field has no mass");
    const double s = target / m;
    for (double& v : values_) v *= s;
}

}  // namespace aggdiff
