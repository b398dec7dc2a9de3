#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

/// Cached FFTW plans and wavenumber tables for one grid. Instances are not
/// safe for concurrent use; each solver/thread owns its own (plan creation is
/// serialized internally behind a global mutex).
class Spectral {
public:
    explicit Spectral(const Grid2D& grid);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid2D& grid() const { return grid_; }

    void gradient(const ScalarField& f, VectorField2D& out);
    void divergence(const VectorField2D& v, ScalarField& out);
    void laplacian(const ScalarField& f, ScalarField& out);

    /// out = (a + |k|^2)^{-1} f in transform space (a >= 0). For a == 0 the
    /// zero Fourier mode is annihilated and out is mean-zero.
    void solve_screened(double a, const ScalarField& f, ScalarField& out);

    /// out = (a - lap_fd)^{-1} f with the five-point symbol; a > 0. The matrix
    /// being inverted is an M-matrix, so the solve preserves nonnegativity up
    /// to transform roundoff.
    void solve_fd_diffusion(double a, const ScalarField& f, ScalarField& out);

    /// Implicit chemical update: out = F^-1[(b chat + shat)/(b + a + |k|^2)].
    /// With project_source_mean the zero mode of s is removed first.
    void chemical_step(double b, double a, const ScalarField& c, const ScalarField& s,
                       bool project_source_mean, ScalarField& out);

    /// Discrete circular convolution out_i = sum_j f_j kernel_{i-j} (kernel
    /// given as a wrap-centered image). Preserves sum(f) exactly when the
    /// kernel sums to one.
    void periodic_convolve(const ScalarField& f, const ScalarField& kernel, ScalarField& out);

    /// Shared per-thread instance for the free-function grid operators.
    static Spectral& shared(const Grid2D& grid);

private:
    struct Impl;
    Grid2D grid_;
    std::unique_ptr<Impl> impl_;
};

/// Free-space convolution on the grid by zero padding to (2N)^2. Kernel images
/// (value and gradient components) are sampled once at construction; the r->0
/// singularity is replaced on the central cell by its cell average (zero for
/// the odd gradient kernels).
class FreeSpaceConvolver {
public:
    enum class Kind { LogE2, Bessel, OneMinusScreening };

    FreeSpaceConvolver(const Grid2D& grid, Kind kind, double alpha);
    ~FreeSpaceConvolver();
    FreeSpaceConvolver(const FreeSpaceConvolver&) = delete;
    FreeSpaceConvolver& operator=(const FreeSpaceConvolver&) = delete;

    const Grid2D& grid() const { return grid_; }
    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }

    /// (K * f) sampled on the grid.
    void value(const ScalarField& f, ScalarField& out);
    /// (grad K * f); exact antisymmetric pairing for the virial identity.
    void gradient(const ScalarField& f, VectorField2D& out);
    /// One forward transform shared between the value and gradient images.
    void value_and_gradient(const ScalarField& f, ScalarField& c, VectorField2D& grad_c);

private:
    struct Impl;
    Grid2D grid_;
    Kind kind_;
    double alpha_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace kslab
