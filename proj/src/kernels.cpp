#include "kslab/kernels.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace kslab {

double stereo_weight(double x, double y) {
    const double q = 1.0 + x * x + y * y;
    return 1.0 / (M_PI * q * q);
}

double log_stereo_weight(double x, double y) {
    const double q = 1.0 + x * x + y * y;
    return -std::log(M_PI) - 2.0 * std::log(q);
}

void grad_log_stereo_weight(double x, double y, double& gx, double& gy) {
    const double q = 1.0 + x * x + y * y;
    gx = -4.0 * x / q;
    gy = -4.0 * y / q;
}

namespace {

// Trapezoid quadrature of exp(-a e^{-v} - b e^{v} + w v) over the window where
// the integrand is above threshold; doubles the resolution until converged.
// The integrand decays doubly exponentially on both sides, so the trapezoid
// rule converges geometrically.
double log_axis_integral(double a, double b, double weight_exp) {
    const double tail = 45.0;
    const double peak = 2.0 * std::sqrt(std::max(a, 0.0) * b);
    const double cap = peak + tail;
    const double v_lo = (a > 0.0) ? std::log(a / cap) : -tail;
    const double v_hi = std::log(cap / b);
    auto f = [&](double v) {
        double e = -b * std::exp(v) + weight_exp * v;
        if (a > 0.0) e -= a * std::exp(-v);
        return std::exp(e);
    };
    int m = 64;
    double prev = 0.0;
    for (int round = 0; round < 9; ++round) {
        const double dv = (v_hi - v_lo) / m;
        double s = 0.5 * (f(v_lo) + f(v_hi));
        for (int k = 1; k < m; ++k) s += f(v_lo + k * dv);
        s *= dv;
        if (round > 1 && std::abs(s - prev) <= 1e-14 * std::abs(s)) return s;
        prev = s;
        m *= 2;
    }
    return prev;
}

}  // namespace

double bessel_kernel(double alpha, double r, bool checked) {
    if (!(alpha > 0.0)) throw std::invalid_argument("bessel_kernel: alpha must be positive");
    if (r < 0.0) throw std::invalid_argument("bessel_kernel: r must be nonnegative");
    if (r == 0.0) {
        if (checked) throw std::domain_error("bessel_kernel: singular at r = 0");
        return std::numeric_limits<double>::infinity();
    }
    // t-integral with t = e^v: int exp(-(r^2/4) e^{-v} - alpha e^{v}) dv / 4pi
    return log_axis_integral(0.25 * r * r, alpha, 0.0) / (4.0 * M_PI);
}

double screening_factor(double alpha, double r) {
    if (!(alpha > 0.0)) throw std::invalid_argument("screening_factor: alpha must be positive");
    if (r < 0.0) throw std::invalid_argument("screening_factor: r must be nonnegative");
    if (r == 0.0) return 1.0;
    // s-integral with s = e^v picks up the Jacobian weight e^{v}
    return log_axis_integral(0.25 * alpha * r * r, 1.0, 1.0);
}

double virial_kernel_sup(int samples) {
    if (samples < 100) throw std::invalid_argument("virial_kernel_sup: need at least 100 samples");
    auto f = [](double rho) { return 2.0 * M_PI * rho * bessel_kernel(1.0, rho); };
    double best_rho = 0.5, best = 0.0;
    for (int i = 1; i < samples; ++i) {
        const double rho = static_cast<double>(i) / samples;
        const double v = f(rho);
        if (v > best) {
            best = v;
            best_rho = rho;
        }
    }
    // golden-section refinement around the best sample
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(1e-12, best_rho - 2.0 / samples);
    double hi = std::min(1.0 - 1e-12, best_rho + 2.0 / samples);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return std::max(best, std::max(fc, fd));
}

double virial_constant(int samples) { return std::max(virial_kernel_sup(samples), 1.0); }

namespace detail {

double log_kernel_cell_average(double h) {
    // (1/h^2) int_cell -(1/2pi) log|z| dz = -(log h + pi/4 - 3/2 - log(2)/2)/(2pi)
    const double c1 = M_PI / 4.0 - 1.5 - 0.5 * std::log(2.0);
    return -(std::log(h) + c1) / (2.0 * M_PI);
}

}  // namespace detail

namespace {

FreeSpaceConvolver::Kind to_kind(const KernelSpec& spec) {
    return spec.kind == KernelSpec::Kind::LogE2 ? FreeSpaceConvolver::Kind::LogE2
                                                : FreeSpaceConvolver::Kind::Bessel;
}

FreeSpaceConvolver& shared_convolver(const Grid2D& g, FreeSpaceConvolver::Kind kind, double alpha) {
    using Key = std::tuple<int, long long, int, long long>;
    static thread_local std::map<Key, std::unique_ptr<FreeSpaceConvolver>> cache;
    const Key key{g.points_per_axis, std::bit_cast<long long>(g.half_width), static_cast<int>(kind),
                  std::bit_cast<long long>(alpha)};
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<FreeSpaceConvolver>(g, kind, alpha)).first;
    return *it->second;
}

void check_decay(const ScalarField& f) {
    const int n = f.n();
    double boundary = 0.0;
    for (int i = 0; i < n; ++i) {
        boundary = std::max(boundary, std::abs(f(i, 0)));
        boundary = std::max(boundary, std::abs(f(i, n - 1)));
        boundary = std::max(boundary, std::abs(f(0, i)));
        boundary = std::max(boundary, std::abs(f(n - 1, i)));
    }
    const double peak = max_abs(f);
    if (peak > 0.0 && boundary > 1e-10 * peak)
        throw std::domain_error("convolve_free_space: field does not decay at the domain boundary");
}

}  // namespace

ScalarField convolve_free_space(const ScalarField& f, const KernelSpec& spec, bool checked) {
    if (checked) check_decay(f);
    ScalarField out(f.grid());
    shared_convolver(f.grid(), to_kind(spec), spec.alpha).value(f, out);
    return out;
}

VectorField2D convolve_gradient_free_space(const ScalarField& f, const KernelSpec& spec,
                                           bool checked) {
    if (checked) check_decay(f);
    VectorField2D out(f.grid());
    shared_convolver(f.grid(), to_kind(spec), spec.alpha).gradient(f, out);
    return out;
}

ScalarField solve_screened_poisson(const ScalarField& n, double alpha) {
    ScalarField out(n.grid());
    Spectral::shared(n.grid()).solve_screened(alpha, n, out);
    return out;
}

}  // namespace kslab
