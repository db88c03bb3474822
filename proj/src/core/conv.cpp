#include "conv.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

#include "quadrature.hpp"

namespace aggdiff {

namespace {

std::mutex g_fftw_plan_mutex;  // FFTW planning is not thread-safe

// G(rho) = int_0^rho g(r) r dr, tolerant of integrable singularities at 0.
double disk_integral(const std::function<double(double)>& g, double rho, double rel_tol) {
    if (rho <= 0.0) return 0.0;
    const auto q = integrate_from_zero([&](double r) { return g(r) * r; }, rho, rel_tol, 200);
    if (!q.converged)
        throw std::runtime_error("conv operator: singular-cell quadrature did not converge");
    return q.value;
}

// F(X, Y) = int_0^X int_0^Y g(sqrt(x^2+y^2)) dy dx for X, Y >= 0, in polar
// coordinates so the origin is never point-evaluated.
double corner_integral(const std::function<double(double)>& g, double X, double Y) {
    if (X <= 0.0 || Y <= 0.0) return 0.0;
    const double theta_split = std::atan2(Y, X);
    const double rel = 1e-12;
    auto f1 = [&](double th) { return disk_integral(g, X / std::cos(th), rel); };
    auto f2 = [&](double th) { return disk_integral(g, Y / std::sin(th), rel); };
    const double part1 = integrate_adaptive(f1, 0.0, theta_split, 1e-11).value;
    const double part2 = integrate_adaptive(f2, theta_split, 0.5 * M_PI, 1e-11).value;
    return part1 + part2;
}

// Integral of g(|w|) over the axis-aligned rectangle [x0,x1] x [y0,y1],
// by quadrant decomposition and corner-integral inclusion-exclusion.
double rect_integral(const std::function<double(double)>& g, double x0, double x1, double y0,
                     double y1) {
    double total = 0.0;
    const double xs[3] = {x0, std::clamp(0.0, x0, x1), x1};
    const double ys[3] = {y0, std::clamp(0.0, y0, y1), y1};
    for (int ix = 0; ix < 2; ++ix) {
        for (int iy = 0; iy < 2; ++iy) {
            const double a = std::min(std::abs(xs[ix]), std::abs(xs[ix + 1]));
            const double b = std::max(std::abs(xs[ix]), std::abs(xs[ix + 1]));
            const double c = std::min(std::abs(ys[iy]), std::abs(ys[iy + 1]));
            const double d = std::max(std::abs(ys[iy]), std::abs(ys[iy + 1]));
            if (b <= a || d <= c) continue;
            total += corner_integral(g, b, d) - corner_integral(g, a, d) -
                     corner_integral(g, b, c) + corner_integral(g, a, c);
        }
    }
    return total;
}

// Tensor Gauss-Legendre (order 8) average of g(|offset + z|) over a cell.
double cell_average_regular(const std::function<double(double)>& g, double ox, double oy,
                            double dx) {
    double acc = 0.0;
    const double h = 0.5 * dx;
    for (int a = 0; a < GaussLegendre8::n; ++a) {
        const double x = ox + h * GaussLegendre8::nodes[a];
        for (int b = 0; b < GaussLegendre8::n; ++b) {
            const double y = oy + h * GaussLegendre8::nodes[b];
            acc += GaussLegendre8::weights[a] * GaussLegendre8::weights[b] *
                   g(std::sqrt(x * x + y * y));
        }
    }
    return acc * 0.25;  // weights sum to 2 per axis
}

}  // namespace

struct ConvOperator::Fft {
    int P = 0;
    std::vector<double> khat_re, khat_im;  // kernel transform, packed r2c
    fftw_plan fwd = nullptr, inv = nullptr;
    std::vector<double> real_buf;
    std::vector<std::complex<double>> cplx_buf;

    ~Fft() {
        std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

ConvOperator::~ConvOperator() = default;
ConvOperator::ConvOperator(ConvOperator&&) noexcept = default;
ConvOperator& ConvOperator::operator=(ConvOperator&&) noexcept = default;

ConvOperator ConvOperator::build(std::shared_ptr<const Grid> grid, const KernelSpec& spec) {
    ConvOperator op;
    op.grid_ = std::move(grid);
    if (spec.is_zero()) {
        op.zero_ = true;
        return op;
    }
    if (op.grid_->mode() == GridMode::Cartesian2D && spec.dim() != 2)
        throw std::invalid_argument("conv: cartesian2d grid requires a d=2 kernel");
    if (op.grid_->mode() == GridMode::Radial && spec.dim() != op.grid_->dim())
        throw std::invalid_argument("conv: kernel dimension must match radial grid dimension");
    auto g = [spec](double s) { return spec.k(s); };
    if (op.grid_->mode() == GridMode::Cartesian2D)
        op.build_cartesian(g);
    else
        op.build_radial(g);
    return op;
}

ConvOperator ConvOperator::build_profile(std::shared_ptr<const Grid> grid,
                                         std::function<double(double)> profile) {
    ConvOperator op;
    op.grid_ = std::move(grid);
    if (op.grid_->mode() == GridMode::Cartesian2D)
        op.build_cartesian(profile);
    else
        op.build_radial(profile);
    return op;
}

void ConvOperator::build_cartesian(const std::function<double(double)>& g) {
    const int n = grid_->nx();
    const double dx = grid_->dx();
    tab_n_ = n;
    const int W = 2 * n - 1;
    tableau_.assign(static_cast<std::size_t>(W) * W, 0.0);
    auto tab = [&](int ox, int oy) -> double& {
        return tableau_[static_cast<std::size_t>(oy + n - 1) * W + (ox + n - 1)];
    };
    // g is radial: compute the fundamental wedge 0 <= oy <= ox and mirror.
    for (int ox = 0; ox < n; ++ox) {
        for (int oy = 0; oy <= ox; ++oy) {
            double avg;
            if (ox <= 2) {
                // Singularity inside or near the cell: polar-coordinate quadrature.
                const double cx = ox * dx, cy = oy * dx, h = 0.5 * dx;
                avg = rect_integral(g, cx - h, cx + h, cy - h, cy + h) / (dx * dx);
            } else {
                avg = cell_average_regular(g, ox * dx, oy * dx, dx);
            }
            for (int sx : {-1, 1}) {
                for (int sy : {-1, 1}) {
                    tab(sx * ox, sy * oy) = avg;
                    tab(sx * oy, sy * ox) = avg;
                }
            }
        }
    }
    init_fft();
}

void ConvOperator::init_fft() {
    const int n = tab_n_;
    const int P = 2 * n;
    fft_ = std::make_unique<Fft>();
    fft_->P = P;
    const int Pc = P / 2 + 1;
    std::vector<double> kpad(static_cast<std::size_t>(P) * P, 0.0);
    const int W = 2 * n - 1;
    const double vol = grid_->dx() * grid_->dx();
    for (int oy = -(n - 1); oy <= n - 1; ++oy) {
        for (int ox = -(n - 1); ox <= n - 1; ++ox) {
            const int px = (ox + P) % P, py = (oy + P) % P;
            kpad[static_cast<std::size_t>(py) * P + px] =
                tableau_[static_cast<std::size_t>(oy + n - 1) * W + (ox + n - 1)] * vol;
        }
    }
    fft_->real_buf.assign(static_cast<std::size_t>(P) * P, 0.0);
    fft_->cplx_buf.assign(static_cast<std::size_t>(P) * Pc, {0.0, 0.0});
    {
        std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
        fft_->fwd = fftw_plan_dft_r2c_2d(P, P, fft_->real_buf.data(),
                                         reinterpret_cast<fftw_complex*>(fft_->cplx_buf.data()),
                                         FFTW_ESTIMATE);
        fft_->inv = fftw_plan_dft_c2r_2d(P, P,
                                         reinterpret_cast<fftw_complex*>(fft_->cplx_buf.data()),
                                         fft_->real_buf.data(), FFTW_ESTIMATE);
    }
    std::memcpy(fft_->real_buf.data(), kpad.data(), sizeof(double) * kpad.size());
    fftw_execute(fft_->fwd);
    fft_->khat_re.resize(fft_->cplx_buf.size());
    fft_->khat_im.resize(fft_->cplx_buf.size());
    for (std::size_t i = 0; i < fft_->cplx_buf.size(); ++i) {
        fft_->khat_re[i] = fft_->cplx_buf[i].real();
        fft_->khat_im[i] = fft_->cplx_buf[i].imag();
    }
}

void ConvOperator::build_radial(const std::function<double(double)>& g) {
    const int nr = grid_->nr();
    const int d = grid_->dim();
    const double sigma = unit_sphere_area(d - 1);  // surface of S^{d-2} (= 2 when d = 2)

    // Angular average over the sphere of radius rp seen from radius r.
    auto psi = [&](double r, double rp, bool careful) {
        auto f = [&](double th) {
            const double s_half = std::sin(0.5 * th);
            const double s = std::sqrt((r - rp) * (r - rp) + 4.0 * r * rp * s_half * s_half);
            const double sv = std::max(s, 1e-300);
            return g(sv) * std::pow(std::sin(th), d - 2);
        };
        if (careful) return sigma * integrate_adaptive(f, 0.0, M_PI, 1e-10, 0.0, 44).value;
        double acc = 0.0;
        for (int p = 0; p < 4; ++p)
            acc += gl8(f, p * 0.25 * M_PI, (p + 1) * 0.25 * M_PI);
        return sigma * acc;
    };

    dense_.assign(static_cast<std::size_t>(nr) * nr, 0.0);
    for (int i = 0; i < nr; ++i) {
        const double r = grid_->r_center(i);
        for (int j = 0; j < nr; ++j) {
            const double r0 = grid_->r_face(j), r1 = grid_->r_face(j + 1);
            const bool near = std::abs(i - j) <= 3;
            auto f = [&](double rp) { return psi(r, rp, near) * std::pow(rp, d - 1); };
            double shell;
            if (near) {
                shell = integrate_adaptive(f, r0, r1, 1e-9, 0.0, 30).value;
            } else {
                shell = gl8(f, r0, r1);
            }
            dense_[static_cast<std::size_t>(i) * nr + j] = shell / grid_->cell_volume(j);
        }
    }
    // The point-vs-averaged construction is symmetric only to quadrature
    // order; enforce exact symmetry.
    for (int i = 0; i < nr; ++i) {
        for (int j = i + 1; j < nr; ++j) {
            const double s = 0.5 * (dense_[static_cast<std::size_t>(i) * nr + j] +
                                    dense_[static_cast<std::size_t>(j) * nr + i]);
            dense_[static_cast<std::size_t>(i) * nr + j] = s;
            dense_[static_cast<std::size_t>(j) * nr + i] = s;
        }
    }
}

std::vector<double> ConvOperator::potential(const GridField& u) const {
    if (!u.grid().same_layout(*grid_)) throw std::invalid_argument("conv potential: grid mismatch");
    std::vector<double> phi(u.size(), 0.0);
    if (zero_) return phi;
    if (grid_->mode() == GridMode::Radial) {
        const int nr = grid_->nr();
        for (int i = 0; i < nr; ++i) {
            double acc = 0.0;
            const double* row = &dense_[static_cast<std::size_t>(i) * nr];
            for (int j = 0; j < nr; ++j) acc += row[j] * u[j] * grid_->cell_volume(j);
            phi[i] = acc;
        }
        return phi;
    }
    const int n = tab_n_;
    const int P = fft_->P;
    const int Pc = P / 2 + 1;
    std::lock_guard<std::mutex> lock(*apply_mutex_);
    std::fill(fft_->real_buf.begin(), fft_->real_buf.end(), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            fft_->real_buf[static_cast<std::size_t>(j) * P + i] = u[grid_->idx(i, j)];
    fftw_execute(fft_->fwd);
    const double scale = 1.0 / (static_cast<double>(P) * P);
    for (std::size_t i = 0; i < fft_->cplx_buf.size(); ++i) {
        const std::complex<double> k(fft_->khat_re[i], fft_->khat_im[i]);
        fft_->cplx_buf[i] *= k * scale;
    }
    fftw_execute(fft_->inv);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            phi[grid_->idx(i, j)] = fft_->real_buf[static_cast<std::size_t>(j) * P + i];
    (void)Pc;
    return phi;
}

double ConvOperator::bilinear(const GridField& u) const {
    const std::vector<double> phi = potential(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * phi[i] * grid_->cell_volume(i);
    return acc;
}

double ConvOperator::weight(std::size_t i, std::size_t j) const {
    if (zero_) return 0.0;
    if (grid_->mode() == GridMode::Radial)
        return dense_[i * grid_->nr() + j];
    const int n = tab_n_;
    const int W = 2 * n - 1;
    const int ix = static_cast<int>(i % n), iy = static_cast<int>(i / n);
    const int jx = static_cast<int>(j % n), jy = static_cast<int>(j / n);
    return tableau_[static_cast<std::size_t>(iy - jy + n - 1) * W + (ix - jx + n - 1)];
}

}  // namespace aggdiff
