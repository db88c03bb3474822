#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"

namespace aggdiff {

// Discrete convolution with a radial profile g on a bounded domain (no
// periodic wrap-around). Weights are cell averages of g(|x_i - y|) over cell
// j; cells containing or touching the singularity are integrated in polar
// coordinates, never point-evaluated at 0.
//
//   potential(u)_i = sum_j W[i][j] u_j vol_j ~ (G * u)(x_i)
//
// Cartesian grids store a translation-invariant offset tableau and apply via
// zero-padded FFT; radial grids store the dense (symmetrized) matrix of
// angularly averaged weights. Immutable after construction; potential() is
// safe to call concurrently.
class ConvOperator {
  public:
    static ConvOperator build(std::shared_ptr<const Grid> grid, const KernelSpec& spec);
    // Arbitrary radial profile (e.g. s k'(s) for virial weights, or constants
    // for exactness tests). The profile may have an integrable singularity at 0.
    static ConvOperator build_profile(std::shared_ptr<const Grid> grid,
                                      std::function<double(double)> profile);

    ~ConvOperator();
    ConvOperator(ConvOperator&&) noexcept;
    ConvOperator& operator=(ConvOperator&&) noexcept;
    ConvOperator(const ConvOperator&) = delete;
    ConvOperator& operator=(const ConvOperator&) = delete;

    const Grid& grid() const { return *grid_; }

    // (G * u) at cell centers.
    std::vector<double> potential(const GridField& u) const;

    // sum_ij u_i u_j W[i][j] vol_i vol_j  (= the double integral of u u G).
    double bilinear(const GridField& u) const;

    // W[i][j]; exact-symmetric by construction.
    double weight(std::size_t i, std::size_t j) const;

    bool zero() const { return zero_; }

  private:
    ConvOperator() = default;
    void build_cartesian(const std::function<double(double)>& g);
    void build_radial(const std::function<double(double)>& g);
    void init_fft();

    std::shared_ptr<const Grid> grid_;
    bool zero_ = false;

    // Cartesian: tableau of offset averages, T(ox, oy), ox,oy in [-(n-1), n-1].
    std::vector<double> tableau_;
    int tab_n_ = 0;
    // FFT workspace (padded kernel transform + cached plans).
    struct Fft;
    std::unique_ptr<Fft> fft_;
    mutable std::unique_ptr<std::mutex> apply_mutex_ = std::make_unique<std::mutex>();

    // Radial: dense weight matrix.
    std::vector<double> dense_;
};

}  // namespace aggdiff
