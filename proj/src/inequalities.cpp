#include "kslab/inequalities.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "kslab/functionals.hpp"
#include "kslab/kernels.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// 20-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 20;
const double kGLx[kGL] = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
    -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154195,
    -0.2277858511416451, -0.0765265211334973, 0.0765265211334973,  0.2277858511416451,
    0.3737060887154195,  0.5108670019508271,  0.6360536807265150,  0.7463319064601508,
    0.8391169718222188,  0.9122344282513259,  0.9639719272779138,  0.9931285991850949};
const double kGLw[kGL] = {
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091, 0.0832767415767048,
    0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183820,
    0.1491729864726037, 0.1527533871307258, 0.1527533871307258, 0.1491729864726037,
    0.1420961093183820, 0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869, 0.0176140071391521};

// Composite Gauss-Legendre over [a, b] with `panels` panels.
template <class F>
double gauss_panels(double a, double b, int panels, F&& f) {
    double s = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        double ps = 0.0;
        for (int q = 0; q < kGL; ++q) ps += kGLw[q] * f(lo + 0.5 * w * (1.0 + kGLx[q]));
        s += 0.5 * w * ps;
    }
    return s;
}

// int_0^inf f(r) dr through r = t/(1-t).
template <class F>
double gauss_halfline(int panels, F&& f) {
    return gauss_panels(0.0, 1.0, panels, [&](double t) {
        const double om = 1.0 - t;
        const double r = t / om;
        return f(r) / (om * om);
    });
}

double radial_H(double r) {
    const double q = 1.0 + r * r;
    return 1.0 / (M_PI * q * q);
}

}  // namespace

double smooth_window(double r, double r0, double r1) {
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    const double t = (r - r0) / (r1 - r0);
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

std::string InequalityReport::to_json() const {
    char buf[320];
    if (calibration)
        std::snprintf(buf, sizeof(buf),
                      "{\"lhs\":%.17g,\"rhs\":%.17g,\"residual\":%.17g,\"satisfied\":%s,"
                      "\"tol\":%.17g,\"calibration\":%.17g}",
                      lhs, rhs, residual, satisfied ? "true" : "false", tol, *calibration);
    else
        std::snprintf(buf, sizeof(buf),
                      "{\"lhs\":%.17g,\"rhs\":%.17g,\"residual\":%.17g,\"satisfied\":%s,"
                      "\"tol\":%.17g}",
                      lhs, rhs, residual, satisfied ? "true" : "false", tol);
    return buf;
}

InequalityReport make_report(double lhs, double rhs, double tol, std::optional<double> calibration) {
    InequalityReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = rhs - lhs;
    r.tol = tol;
    r.satisfied = r.residual >= -tol;
    r.calibration = calibration;
    return r;
}

InequalityReport check_onofri(const ScalarField& u, double tol, double u_infinity) {
    const Grid2D& g = u.grid();
    if (max_value(u) > 690.0) throw std::domain_error("check_onofri: e^u overflows");

    const ScalarField H = ScalarField::sample(g, [](double x, double y) { return stereo_weight(x, y); });
    const double tau = 1.0 - integrate(H);  // H-mass beyond the quadrature box

    ScalarField eu(g);
    for (std::size_t k = 0; k < u.size(); ++k) eu[k] = std::exp(u[k]);
    const double lhs = integrate_product(eu, H) + std::exp(u_infinity) * tau;

    const VectorField2D gu = gradient(u);
    const double exponent = integrate_product(u, H) + u_infinity * tau +
                            integrate_dot(gu, gu) / (16.0 * M_PI);
    return make_report(lhs, std::exp(exponent), tol);
}

// ---------------------------------------------------------------------------
// Logarithmic HLS: whole-space radial evaluation at the extremal family
// ---------------------------------------------------------------------------

namespace {

// int int H(x) log|x-y| H(y) dx dy via the angular mean of the log kernel,
// (1/2pi) oint log|x-y| dtheta = log max(|x|,|y|), and the closed-form inner
// cumulative int_0^s H r dr = s^2 / (2 pi (1+s^2)).
double pairing_H_logH_routeA() {
    return 2.0 * kTwoPi * kTwoPi *
           gauss_halfline(48, [](double s) {
               if (s == 0.0) return 0.0;
               const double inner = s * s / (kTwoPi * (1.0 + s * s));
               return radial_H(s) * s * std::log(s) * inner;
           });
}

// Same pairing with both radial integrals numerical (different panel count).
double pairing_H_logH_routeB() {
    return 2.0 * kTwoPi * kTwoPi *
           gauss_halfline(64, [](double s) {
               if (s == 0.0) return 0.0;
               const double inner = gauss_panels(0.0, s / (1.0 + s), 8, [&](double t) {
                   const double om = 1.0 - t;
                   const double r = t / om;
                   return radial_H(r) * r / (om * om);
               });
               return radial_H(s) * s * std::log(s) * inner;
           });
}

double entropy_H_quad(int panels) {
    return kTwoPi * gauss_halfline(panels, [](double r) {
               const double h = radial_H(r);
               return h * std::log(h) * r;
           });
}

}  // namespace

double calibrate_log_hls_constant(double mass) {
    if (!(mass > 0.0)) throw std::invalid_argument("calibrate_log_hls_constant: mass must be positive");
    static const double pairing = pairing_H_logH_routeA();  // = 1/2
    static const double entropyH = entropy_H_quad(48);      // = -log pi - 2
    return -mass * mass * pairing - 0.5 * mass * (mass * std::log(mass) + mass * entropyH);
}

double log_hls_extremal_residual(double mass) {
    static const double pairing = pairing_H_logH_routeB();
    static const double entropyH = entropy_H_quad(96);
    const double lhs = -mass * mass * pairing;
    const double rhs = 0.5 * mass * (mass * std::log(mass) + mass * entropyH) +
                       calibrate_log_hls_constant(mass);
    return rhs - lhs;
}

InequalityReport check_log_hls(const ScalarField& f, double tol, std::optional<double> constant) {
    const double mass = integrate(f);
    if (!(mass > 0.0)) throw std::invalid_argument("check_log_hls: field must have positive mass");
    const double cm = constant ? *constant : calibrate_log_hls_constant(mass);

    // -int int f log|x-y| f = 2 pi int f (E2 * f)
    const ScalarField conv = convolve_free_space(f, {KernelSpec::Kind::LogE2, 0.0});
    const double lhs = kTwoPi * integrate_product(f, conv);
    const double rhs = 0.5 * mass * phys_entropy(f) + cm;
    return make_report(lhs, rhs, tol, cm);
}

double check_bessel_lhs(const ScalarField& f, double alpha) {
    const ScalarField conv = convolve_free_space(f, {KernelSpec::Kind::Bessel, alpha});
    return integrate_product(f, conv);
}

InequalityReport check_bessel_hls(const ScalarField& f, double alpha, double constant, double tol) {
    const Grid2D& g = f.grid();
    const double mass = integrate(f);
    const double lhs = check_bessel_lhs(f, alpha);
    const ScalarField logm = ScalarField::sample(g, [](double x, double y) {
        return std::log1p(x * x + y * y);
    });
    const double rhs = mass / (4.0 * M_PI) * phys_entropy(f) +
                       mass / (2.0 * M_PI) * integrate_product(f, logm) + constant;
    return make_report(lhs, rhs, tol, constant);
}

double calibrate_bessel_constant(const Grid2D& grid, double mass, double alpha, int family_size,
                                 std::uint64_t seed) {
    std::vector<ScalarField> family;
    family.push_back(ScalarField::sample(grid, [mass](double x, double y) {
        return mass * stereo_weight(x, y);
    }));
    family.push_back(ScalarField::sample(grid, [mass](double x, double y) {
        const double s2 = 0.01;  // narrow Gaussian
        return mass / (kTwoPi * s2) * std::exp(-0.5 * (x * x + y * y) / s2);
    }));
    for (int k = 0; k < family_size; ++k) family.push_back(seeded_density(grid, seed + k, mass));

    double worst = -std::numeric_limits<double>::infinity();
    const ScalarField logm = ScalarField::sample(grid, [](double x, double y) {
        return std::log1p(x * x + y * y);
    });
    for (const ScalarField& f : family) {
        const double lhs = check_bessel_lhs(f, alpha);
        const double rhs0 = mass / (4.0 * M_PI) * phys_entropy(f) +
                            mass / (2.0 * M_PI) * integrate_product(f, logm);
        worst = std::max(worst, lhs - rhs0);
    }
    return worst;
}

MinimizationCheck entropy_min_identity(const ScalarField& n, const ScalarField& psi) {
    const Grid2D& g = n.grid();
    if (max_value(psi) > 690.0) throw std::domain_error("entropy_min_identity: e^psi overflows");
    ScalarField epsi(g);
    for (std::size_t k = 0; k < psi.size(); ++k) epsi[k] = std::exp(psi[k]);
    const double z = integrate(epsi);
    const double mass = integrate(n);
    if (!(z > 0.0) || !(mass > 0.0))
        throw std::invalid_argument("entropy_min_identity: need positive masses");

    const double theta = log_threshold(n);
    const double* nv = n.data();
    const double* pv = psi.data();
    const double* ev = epsi.data();

    // E(n;psi) = int n log n - n psi with the 0 log 0 convention
    const double e_n = g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
                           const double nl = (nv[k] > theta) ? nv[k] * std::log(nv[k]) : 0.0;
                           return nl - nv[k] * pv[k];
                       });
    const double e_min = mass * std::log(mass / z);  // E(nbar;psi)

    // relative entropy against nbar = mass e^psi / z, evaluated pointwise
    const double scale = mass / z;
    const double gap = g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
                           if (nv[k] <= theta) return 0.0;
                           return nv[k] * std::log(nv[k] / (scale * ev[k]));
                       });

    MinimizationCheck out;
    out.gap = gap;
    out.identity_residual = std::abs(e_n - e_min - gap);
    return out;
}

MinimizationCheck chemical_min_identity(const ScalarField& c, const ScalarField& f, double alpha) {
    if (alpha == 0.0) {
        const double fmass = integrate(f);
        ScalarField af(f.grid());
        for (std::size_t k = 0; k < f.size(); ++k) af[k] = std::abs(f[k]);
        const double l1 = integrate(af);
        if (l1 > 0.0 && std::abs(fmass) > 1e-8 * l1)
            throw std::invalid_argument("chemical_min_identity: alpha = 0 requires a mean-zero source");
    }
    const ScalarField cbar = solve_screened_poisson(f, alpha);

    auto F = [&](const ScalarField& w) {
        const VectorField2D gw = gradient(w);
        return 0.5 * integrate_dot(gw, gw) + 0.5 * alpha * integrate_product(w, w) -
               integrate_product(f, w);
    };
    const double gap = F(c) - F(cbar);

    ScalarField d(c.grid());
    for (std::size_t k = 0; k < c.size(); ++k) d[k] = c[k] - cbar[k];
    const VectorField2D gd = gradient(d);
    const double quad_form = 0.5 * integrate_dot(gd, gd) + 0.5 * alpha * integrate_product(d, d);

    MinimizationCheck out;
    out.gap = gap;
    out.identity_residual = std::abs(gap - quad_form);
    return out;
}

InequalityReport DualityChainReport::combined() const {
    InequalityReport r = log_hls_link;
    r.residual = std::min(entropy_link.residual, log_hls_link.residual);
    r.satisfied = entropy_link.satisfied && log_hls_link.satisfied && dirichlet_residual <= 1e-4;
    return r;
}

DualityChainReport duality_chain(const ScalarField& f) {
    const Grid2D& g = f.grid();
    const double mass = integrate(f);
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument("duality_chain: field must have unit mass");

    // H renormalized to exact unit discrete mass so that f - H is mean-zero
    ScalarField H = ScalarField::sample(g, [](double x, double y) { return stereo_weight(x, y); });
    const double mH = integrate(H);
    for (std::size_t k = 0; k < H.size(); ++k) H[k] /= mH;

    ScalarField diff(g);
    for (std::size_t k = 0; k < f.size(); ++k) diff[k] = f[k] - H[k];

    const ScalarField ustar = convolve_free_space(diff, {KernelSpec::Kind::LogE2, 0.0});
    const VectorField2D gustar = convolve_gradient_free_space(diff, {KernelSpec::Kind::LogE2, 0.0});

    const double dirichlet = 0.5 * integrate_dot(gustar, gustar);
    const double pairing = integrate_product(diff, ustar);

    DualityChainReport rep;
    const double scale = std::max(1.0, std::abs(pairing));
    rep.dirichlet_residual = std::abs(dirichlet - 0.5 * pairing) / scale;

    // -(1/2) <f-H, E2*(f-H)> >= -(1/8pi) int f log f + (1/8pi) int f log H
    const double lhs_link = -(1.0 / (8.0 * M_PI)) * phys_entropy(f) +
                            (1.0 / (8.0 * M_PI)) * integral_n_log_H(f);
    rep.entropy_link = make_report(lhs_link, -0.5 * pairing, 1e-5);

    rep.log_hls_link = check_log_hls(f, 1e-5);
    return rep;
}

ScalarField seeded_band_limited(const Grid2D& grid, std::uint64_t seed, int max_mode,
                                double amplitude, double window_fraction) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);

    struct Mode {
        double kx, ky, amp, phi;
    };
    std::vector<Mode> modes;
    const double k0 = M_PI / grid.half_width;
    for (int mx = -max_mode; mx <= max_mode; ++mx)
        for (int my = 0; my <= max_mode; ++my) {
            if (my == 0 && mx <= 0) continue;  // one representative per conjugate pair
            const double decay = 1.0 / (1.0 + mx * mx + my * my);
            modes.push_back({k0 * mx, k0 * my, unif(rng) * decay, phase(rng)});
        }

    const double r0 = 0.6 * window_fraction * grid.half_width;
    const double r1 = window_fraction * grid.half_width;
    ScalarField u = ScalarField::sample(grid, [&](double x, double y) {
        double s = 0.0;
        for (const Mode& m : modes) s += m.amp * std::cos(m.kx * x + m.ky * y + m.phi);
        return s * smooth_window(std::hypot(x, y), r0, r1);
    });
    const double peak = max_abs(u);
    if (peak > 0.0)
        for (std::size_t k = 0; k < u.size(); ++k) u[k] *= amplitude / peak;
    return u;
}

ScalarField seeded_density(const Grid2D& grid, std::uint64_t seed, double mass) {
    const ScalarField b = seeded_band_limited(grid, seed, 4, 1.5, 0.6);
    const double r0 = 0.35 * grid.half_width;
    const double r1 = 0.6 * grid.half_width;
    ScalarField f = ScalarField::sample(grid, [&](double, double) { return 0.0; });
    const int N = grid.points_per_axis;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const double r = std::hypot(grid.x(i), grid.y(j));
            const double w = smooth_window(r, r0, r1);
            f(i, j) = w * std::exp(b(i, j));
        }
    const double m = integrate(f);
    if (!(m > 0.0)) throw std::logic_error("seeded_density: degenerate sample");
    for (std::size_t k = 0; k < f.size(); ++k) f[k] *= mass / m;
    return f;
}

}  // namespace kslab
