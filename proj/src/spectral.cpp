#include "kslab/spectral.hpp"

#include <fftw3.h>

#include <bit>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "kslab/kernels.hpp"

namespace kslab {

namespace {

// FFTW plan creation is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    FftwBuffer(std::size_t nreal, std::size_t ncplx) {
        real = fftw_alloc_real(nreal);
        cplx = fftw_alloc_complex(ncplx);
        if (!real || !cplx) throw std::bad_alloc();
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(cplx);
    }
};

}  // namespace

struct Spectral::Impl {
    int n = 0;
    std::size_t nreal = 0, ncplx = 0;
    FftwBuffer buf_a, buf_b;
    fftw_plan fwd_a = nullptr, fwd_b = nullptr, inv_a = nullptr, inv_b = nullptr;
    std::vector<double> kx, ky;    // spectral wavenumbers; Nyquist kept
    std::vector<double> kx_d, ky_d;  // first-derivative wavenumbers; Nyquist zeroed
    std::vector<double> sx2, sy2;  // five-point symbol components (4/h^2) sin^2

    Impl(const Grid2D& g)
        : n(g.points_per_axis),
          nreal(g.num_cells()),
          ncplx(static_cast<std::size_t>(g.points_per_axis) * (g.points_per_axis / 2 + 1)),
          buf_a(nreal, ncplx),
          buf_b(nreal, ncplx) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_a = fftw_plan_dft_r2c_2d(n, n, buf_a.real, buf_a.cplx, FFTW_ESTIMATE);
        fwd_b = fftw_plan_dft_r2c_2d(n, n, buf_b.real, buf_b.cplx, FFTW_ESTIMATE);
        inv_a = fftw_plan_dft_c2r_2d(n, n, buf_a.cplx, buf_a.real, FFTW_ESTIMATE);
        inv_b = fftw_plan_dft_c2r_2d(n, n, buf_b.cplx, buf_b.real, FFTW_ESTIMATE);

        const double k0 = M_PI / g.half_width;  // 2*pi / (2L)
        const double h = g.spacing;
        kx.resize(n / 2 + 1);
        kx_d.resize(n / 2 + 1);
        sx2.resize(n / 2 + 1);
        for (int i = 0; i <= n / 2; ++i) {
            kx[i] = k0 * i;
            kx_d[i] = (i == n / 2) ? 0.0 : k0 * i;
            const double s = std::sin(M_PI * i / n);
            sx2[i] = 4.0 / (h * h) * s * s;
        }
        ky.resize(n);
        ky_d.resize(n);
        sy2.resize(n);
        for (int j = 0; j < n; ++j) {
            const int m = (j <= n / 2) ? j : j - n;
            ky[j] = k0 * m;
            ky_d[j] = (j == n / 2) ? 0.0 : k0 * m;
            const double s = std::sin(M_PI * j / n);
            sy2[j] = 4.0 / (h * h) * s * s;
        }
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_a);
        fftw_destroy_plan(fwd_b);
        fftw_destroy_plan(inv_a);
        fftw_destroy_plan(inv_b);
    }

    void forward(const ScalarField& f, FftwBuffer& buf, fftw_plan plan) {
        std::memcpy(buf.real, f.data(), nreal * sizeof(double));
        fftw_execute(plan);
    }

    void inverse(FftwBuffer& buf, fftw_plan plan, ScalarField& out) {
        fftw_execute(plan);
        const double scale = 1.0 / static_cast<double>(nreal);
        for (std::size_t k = 0; k < nreal; ++k) out[k] = buf.real[k] * scale;
    }

    std::size_t sidx(int i, int j) const {
        return static_cast<std::size_t>(j) * (n / 2 + 1) + i;
    }
};

Spectral::Spectral(const Grid2D& grid) : grid_(grid), impl_(std::make_unique<Impl>(grid)) {}
Spectral::~Spectral() = default;

void Spectral::gradient(const ScalarField& f, VectorField2D& out) {
    Impl& im = *impl_;
    im.forward(f, im.buf_a, im.fwd_a);
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t s = im.sidx(i, j);
            const double re = im.buf_a.cplx[s][0], iM = im.buf_a.cplx[s][1];
            im.buf_b.cplx[s][0] = -im.ky_d[j] * iM;
            im.buf_b.cplx[s][1] = im.ky_d[j] * re;
            im.buf_a.cplx[s][0] = -im.kx_d[i] * iM;
            im.buf_a.cplx[s][1] = im.kx_d[i] * re;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out.x);
    im.inverse(im.buf_b, im.inv_b, out.y);
}

void Spectral::divergence(const VectorField2D& v, ScalarField& out) {
    Impl& im = *impl_;
    im.forward(v.x, im.buf_a, im.fwd_a);
    im.forward(v.y, im.buf_b, im.fwd_b);
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t s = im.sidx(i, j);
            const double rex = im.buf_a.cplx[s][0], imx = im.buf_a.cplx[s][1];
            const double rey = im.buf_b.cplx[s][0], imy = im.buf_b.cplx[s][1];
            im.buf_a.cplx[s][0] = -im.kx_d[i] * imx - im.ky_d[j] * imy;
            im.buf_a.cplx[s][1] = im.kx_d[i] * rex + im.ky_d[j] * rey;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

void Spectral::laplacian(const ScalarField& f, ScalarField& out) {
    Impl& im = *impl_;
    im.forward(f, im.buf_a, im.fwd_a);
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t s = im.sidx(i, j);
            const double k2 = im.kx[i] * im.kx[i] + im.ky[j] * im.ky[j];
            im.buf_a.cplx[s][0] *= -k2;
            im.buf_a.cplx[s][1] *= -k2;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

void Spectral::solve_screened(double a, const ScalarField& f, ScalarField& out) {
    if (a < 0.0) throw std::invalid_argument("solve_screened: a must be nonnegative");
    Impl& im = *impl_;
    im.forward(f, im.buf_a, im.fwd_a);
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t s = im.sidx(i, j);
            const double k2 = im.kx[i] * im.kx[i] + im.ky[j] * im.ky[j];
            double m;
            if (a == 0.0 && i == 0 && j == 0)
                m = 0.0;  // mean-zero convention on the torus
            else
                m = 1.0 / (a + k2);
            im.buf_a.cplx[s][0] *= m;
            im.buf_a.cplx[s][1] *= m;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

void Spectral::solve_fd_diffusion(double a, const ScalarField& f, ScalarField& out) {
    if (!(a > 0.0)) throw std::invalid_argument("solve_fd_diffusion: a must be positive");
    Impl& im = *impl_;
    im.forward(f, im.buf_a, im.fwd_a);
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t s = im.sidx(i, j);
            const double m = 1.0 / (a + im.sx2[i] + im.sy2[j]);
            im.buf_a.cplx[s][0] *= m;
            im.buf_a.cplx[s][1] *= m;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

void Spectral::chemical_step(double b, double a, const ScalarField& c, const ScalarField& s,
                             bool project_source_mean, ScalarField& out) {
    Impl& im = *impl_;
    im.forward(c, im.buf_a, im.fwd_a);
    im.forward(s, im.buf_b, im.fwd_b);
    if (project_source_mean) {
        im.buf_b.cplx[0][0] = 0.0;
        im.buf_b.cplx[0][1] = 0.0;
    }
    const int n = im.n, nk = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nk; ++i) {
            const std::size_t sx = im.sidx(i, j);
            const double k2 = im.kx[i] * im.kx[i] + im.ky[j] * im.ky[j];
            const double m = 1.0 / (b + a + k2);
            im.buf_a.cplx[sx][0] = (b * im.buf_a.cplx[sx][0] + im.buf_b.cplx[sx][0]) * m;
            im.buf_a.cplx[sx][1] = (b * im.buf_a.cplx[sx][1] + im.buf_b.cplx[sx][1]) * m;
        }
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

void Spectral::periodic_convolve(const ScalarField& f, const ScalarField& kernel,
                                 ScalarField& out) {
    Impl& im = *impl_;
    im.forward(f, im.buf_a, im.fwd_a);
    im.forward(kernel, im.buf_b, im.fwd_b);
    for (std::size_t k = 0; k < im.ncplx; ++k) {
        const double fr = im.buf_a.cplx[k][0], fi = im.buf_a.cplx[k][1];
        const double kr = im.buf_b.cplx[k][0], ki = im.buf_b.cplx[k][1];
        im.buf_a.cplx[k][0] = fr * kr - fi * ki;
        im.buf_a.cplx[k][1] = fr * ki + fi * kr;
    }
    im.inverse(im.buf_a, im.inv_a, out);
}

Spectral& Spectral::shared(const Grid2D& grid) {
    using Key = std::pair<int, long long>;
    static thread_local std::map<Key, std::unique_ptr<Spectral>> cache;
    const Key key{grid.points_per_axis, std::bit_cast<long long>(grid.half_width)};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Spectral>(grid)).first;
    return *it->second;
}

// ---------------------------------------------------------------------------
// Free-space convolution
// ---------------------------------------------------------------------------

namespace {

// Cubic interpolation table in log r for the smooth radial profiles behind the
// kernel images. Direct quadrature stays the reference path (bessel_kernel);
// the table only accelerates image construction.
class RadialTable {
public:
    RadialTable() = default;

    template <class F>
    RadialTable(double r_lo, double r_hi, int count, F&& eval)
        : u0_(std::log(r_lo)), du_((std::log(r_hi) - std::log(r_lo)) / (count - 1)), v_(count) {
        for (int k = 0; k < count; ++k) v_[k] = eval(std::exp(u0_ + k * du_));
    }

    double operator()(double r) const {
        const double u = std::log(r);
        double t = (u - u0_) / du_;
        int k = static_cast<int>(std::floor(t));
        if (k < 1) k = 1;
        if (k > static_cast<int>(v_.size()) - 3) k = static_cast<int>(v_.size()) - 3;
        t -= k;
        // Catmull-Rom through v[k-1..k+2]
        const double a = v_[k - 1], b = v_[k], c = v_[k + 1], d = v_[k + 2];
        return b + 0.5 * t * (c - a + t * (2.0 * a - 5.0 * b + 4.0 * c - d + t * (3.0 * (b - c) + d - a)));
    }

private:
    double u0_ = 0.0, du_ = 1.0;
    std::vector<double> v_;
};

}  // namespace

struct FreeSpaceConvolver::Impl {
    int n = 0, p = 0;
    std::size_t preal = 0, pcplx = 0;
    FftwBuffer field, scratch;
    fftw_plan fwd = nullptr, inv = nullptr;
    std::vector<double> khat_v, khat_gx, khat_gy;  // interleaved re/im
    bool has_gradient = false;

    Impl(const Grid2D& g, Kind kind, double alpha)
        : n(g.points_per_axis),
          p(2 * g.points_per_axis),
          preal(static_cast<std::size_t>(p) * p),
          pcplx(static_cast<std::size_t>(p) * (p / 2 + 1)),
          field(preal, pcplx),
          scratch(preal, pcplx) {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fwd = fftw_plan_dft_r2c_2d(p, p, field.real, field.cplx, FFTW_ESTIMATE);
            inv = fftw_plan_dft_c2r_2d(p, p, field.cplx, field.real, FFTW_ESTIMATE);
        }
        build_kernel_images(g, kind, alpha);
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }

    void build_kernel_images(const Grid2D& g, Kind kind, double alpha) {
        const double h = g.spacing;
        const double r_max = 3.0 * g.half_width;
        const double inv2pi = 1.0 / (2.0 * M_PI);

        RadialTable bessel_smooth;  // B_alpha(r) + log(r)/(2pi), smooth through r = 0
        RadialTable screening;      // g_alpha(r)
        if (kind == Kind::Bessel || kind == Kind::OneMinusScreening) {
            if (!(alpha > 0.0))
                throw std::invalid_argument("free-space convolution: Bessel kernels require alpha > 0");
            if (kind == Kind::Bessel)
                bessel_smooth = RadialTable(1e-4 * h, r_max, 2400, [alpha, inv2pi](double r) {
                    return bessel_kernel(alpha, r) + inv2pi * std::log(r);
                });
            screening = RadialTable(1e-4 * h, r_max, 2400,
                                    [alpha](double r) { return screening_factor(alpha, r); });
        }

        auto value_at = [&](double r) -> double {
            switch (kind) {
                case Kind::LogE2:
                    return -inv2pi * std::log(r);
                case Kind::Bessel:
                    return bessel_smooth(r) - inv2pi * std::log(r);
                case Kind::OneMinusScreening:
                    return 1.0 - screening(r);
            }
            return 0.0;
        };

        // Central cell: exact cell average of the log part; the smooth
        // remainder is averaged by 4x4 Gauss-Legendre on the cell.
        static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
        static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461,
                                       0.6521451548625461, 0.3478548451374538};
        auto cell_avg_smooth = [&](auto&& f) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double zx = 0.5 * h * gl_x[a], zy = 0.5 * h * gl_x[b];
                    s += gl_w[a] * gl_w[b] * f(std::hypot(zx, zy));
                }
            return s / 4.0;
        };
        double center_value = 0.0;
        switch (kind) {
            case Kind::LogE2:
                center_value = detail::log_kernel_cell_average(h);
                break;
            case Kind::Bessel:
                center_value = detail::log_kernel_cell_average(h) +
                               cell_avg_smooth([&](double r) { return bessel_smooth(r); });
                break;
            case Kind::OneMinusScreening:
                center_value = cell_avg_smooth([&](double r) { return 1.0 - screening(r); });
                break;
        }

        has_gradient = (kind != Kind::OneMinusScreening);
        std::vector<double> img_v(preal), img_gx, img_gy;
        if (has_gradient) {
            img_gx.assign(preal, 0.0);
            img_gy.assign(preal, 0.0);
        }
        for (int q = 0; q < p; ++q) {
            const int mj = (q < n) ? q : q - p;
            const double zy = mj * h;
            for (int pq = 0; pq < p; ++pq) {
                const int mi = (pq < n) ? pq : pq - p;
                const double zx = mi * h;
                const std::size_t s = static_cast<std::size_t>(q) * p + pq;
                if (mi == 0 && mj == 0) {
                    img_v[s] = center_value;
                    continue;  // odd gradient kernels average to zero on the cell
                }
                const double r2 = zx * zx + zy * zy;
                const double r = std::sqrt(r2);
                img_v[s] = value_at(r);
                if (has_gradient) {
                    const double radial = (kind == Kind::LogE2) ? -inv2pi / r2
                                                                : -inv2pi * screening(r) / r2;
                    img_gx[s] = radial * zx;
                    img_gy[s] = radial * zy;
                }
            }
        }

        auto transform_image = [&](const std::vector<double>& img, std::vector<double>& out) {
            std::memcpy(field.real, img.data(), preal * sizeof(double));
            fftw_execute(fwd);
            out.resize(2 * pcplx);
            for (std::size_t k = 0; k < pcplx; ++k) {
                out[2 * k] = field.cplx[k][0];
                out[2 * k + 1] = field.cplx[k][1];
            }
        };
        transform_image(img_v, khat_v);
        if (has_gradient) {
            transform_image(img_gx, khat_gx);
            transform_image(img_gy, khat_gy);
        }
    }

    void forward_field(const ScalarField& f) {
        std::memset(field.real, 0, preal * sizeof(double));
        for (int j = 0; j < n; ++j)
            std::memcpy(field.real + static_cast<std::size_t>(j) * p, f.data() + f.idx(0, j),
                        static_cast<std::size_t>(n) * sizeof(double));
        fftw_execute(fwd);
        std::memcpy(scratch.cplx, field.cplx, pcplx * sizeof(fftw_complex));
    }

    void apply(const std::vector<double>& khat, double h2, ScalarField& out) {
        const double scale = h2 / static_cast<double>(preal);
        for (std::size_t k = 0; k < pcplx; ++k) {
            const double fr = scratch.cplx[k][0], fi = scratch.cplx[k][1];
            const double kr = khat[2 * k], ki = khat[2 * k + 1];
            field.cplx[k][0] = (fr * kr - fi * ki) * scale;
            field.cplx[k][1] = (fr * ki + fi * kr) * scale;
        }
        fftw_execute(inv);
        for (int j = 0; j < n; ++j)
            std::memcpy(out.data() + out.idx(0, j), field.real + static_cast<std::size_t>(j) * p,
                        static_cast<std::size_t>(n) * sizeof(double));
    }
};

FreeSpaceConvolver::FreeSpaceConvolver(const Grid2D& grid, Kind kind, double alpha)
    : grid_(grid), kind_(kind), alpha_(alpha), impl_(std::make_unique<Impl>(grid, kind, alpha)) {}
FreeSpaceConvolver::~FreeSpaceConvolver() = default;

void FreeSpaceConvolver::value(const ScalarField& f, ScalarField& out) {
    impl_->forward_field(f);
    impl_->apply(impl_->khat_v, grid_.cell_area(), out);
}

void FreeSpaceConvolver::gradient(const ScalarField& f, VectorField2D& out) {
    if (!impl_->has_gradient)
        throw std::logic_error("FreeSpaceConvolver: no gradient image for this kernel");
    impl_->forward_field(f);
    impl_->apply(impl_->khat_gx, grid_.cell_area(), out.x);
    impl_->apply(impl_->khat_gy, grid_.cell_area(), out.y);
}

void FreeSpaceConvolver::value_and_gradient(const ScalarField& f, ScalarField& c,
                                            VectorField2D& grad_c) {
    if (!impl_->has_gradient)
        throw std::logic_error("FreeSpaceConvolver: no gradient image for this kernel");
    impl_->forward_field(f);
    impl_->apply(impl_->khat_v, grid_.cell_area(), c);
    impl_->apply(impl_->khat_gx, grid_.cell_area(), grad_c.x);
    impl_->apply(impl_->khat_gy, grid_.cell_area(), grad_c.y);
}

}  // namespace kslab
