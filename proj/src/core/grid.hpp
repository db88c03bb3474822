#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace aggdiff {

enum class GridMode { Cartesian2D, Radial };

// Surface area of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

// Uniform grid over a bounded convex domain: a 2D square centered at the
// origin, or the radial reduction of a d-ball. Radial cells are genuine
// d-dimensional shells (volumes carry the shell measure), so 1D arrays in
// radial mode represent d-dimensional densities.
class Grid {
  public:
    static Grid cartesian2d(int nx, int ny, double side);
    static Grid radial(int d, int nr, double radius);

    GridMode mode() const { return mode_; }
    int dim() const { return dim_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nr() const { return nx_; }
    std::size_t num_cells() const { return volumes_.size(); }
    double dx() const { return dx_; }
    double side() const { return extent_; }
    double radius() const { return extent_; }
    double domain_volume() const { return domain_volume_; }

    double cell_volume(std::size_t i) const { return volumes_[i]; }
    const std::vector<double>& volumes() const { return volumes_; }

    // Cartesian index helpers.
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    double x_center(int i) const { return (i + 0.5) * dx_ - 0.5 * extent_; }
    double y_center(int j) const { return (j + 0.5) * dx_ - 0.5 * extent_; }

    // Radial helpers.
    double r_center(int i) const { return (i + 0.5) * dx_; }
    double r_face(int i) const { return i * dx_; }
    // Area of the spherical face at radius r_face(i).
    double face_area(int i) const;

    // |x_i|^2 of cell center i (radial: r_center^2).
    double center_radius2(std::size_t i) const;

    bool same_layout(const Grid& other) const;

  private:
    Grid() = default;
    GridMode mode_ = GridMode::Cartesian2D;
    int dim_ = 2;
    int nx_ = 0, ny_ = 0;
    double dx_ = 0.0;
    double extent_ = 0.0;  // side length (cartesian) or ball radius (radial)
    double domain_volume_ = 0.0;
    std::vector<double> volumes_;
};

// Nonnegative cell-averaged density on a Grid.
class GridField {
  public:
    GridField() = default;
    GridField(std::shared_ptr<const Grid> grid, double fill = 0.0)
        : grid_(std::move(grid)), values_(grid_->num_cells(), fill) {}

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double mass() const;
    double linf() const;
    double lp_norm(double p) const;
    double min_value() const;
    double second_moment() const;

    // Rescale so that mass() == target exactly (up to rounding).
    void normalize_mass(double target);

  private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

}  // namespace aggdiff
