#pragma once

#include <limits>

#include "kslab/grid.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

/// H(x) = 1/(pi (1+|x|^2)^2); unit mass, extremal weight of the conformal
/// inequalities, -Delta log H = 8 pi H.
double stereo_weight(double x, double y);
double log_stereo_weight(double x, double y);
/// Analytic grad log H = -4 x / (1+|x|^2); bounded by 2.
void grad_log_stereo_weight(double x, double y, double& gx, double& gy);

/// Bessel kernel B_alpha(r) = (1/4pi) int_0^inf t^-1 exp(-r^2/4t - alpha t) dt,
/// the Green function of -Delta + alpha. Evaluated by trapezoid quadrature on
/// the log-transformed axis (doubly exponential decay of the integrand).
/// r == 0 is singular: returns +inf, or throws when checked.
double bessel_kernel(double alpha, double r, bool checked = false);

/// g_alpha(r) = int_0^inf exp(-s - alpha r^2 / 4s) ds, in (0, 1], decreasing,
/// g(0) = 1. Same quadrature scheme as bessel_kernel.
double screening_factor(double alpha, double r);

/// K = 2 pi sup_{rho in (0,1)} rho B_1(rho), located by dense sampling plus
/// golden-section refinement.
double virial_kernel_sup(int samples = 2000);
/// C = max(K, 1); the universal constant of the blow-up time bound.
double virial_constant(int samples = 2000);

struct KernelSpec {
    enum class Kind { LogE2, Bessel };
    Kind kind = Kind::LogE2;
    double alpha = 0.0;  // required positive for Bessel; ignored for LogE2
};

/// Free-space (non-periodic) convolution of f with the kernel named by spec.
/// checked mode rejects fields whose boundary values exceed 1e-10 of the peak.
ScalarField convolve_free_space(const ScalarField& f, const KernelSpec& spec, bool checked = false);
VectorField2D convolve_gradient_free_space(const ScalarField& f, const KernelSpec& spec,
                                           bool checked = false);

/// Spectral solve of (-Delta + alpha) c = n on the periodic box. For alpha == 0
/// the zero mode of n is annihilated and c is mean-zero.
ScalarField solve_screened_poisson(const ScalarField& n, double alpha);

namespace detail {
/// Cell average of -(1/2pi) log|z| over the h x h cell at the origin:
/// -(log h + pi/4 - 3/2 - log(2)/2) / (2 pi).
double log_kernel_cell_average(double h);
}  // namespace detail

}  // namespace kslab
