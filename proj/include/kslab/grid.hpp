#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kslab {

/// Uniform N x N tensor grid covering [-L, L]^2 with periodic identification
/// of the boundary. Spacing h = 2L/N; node (i, j) sits at (-L + i h, -L + j h).
struct Grid2D {
    double half_width = 0.0;  // L
    int points_per_axis = 0;  // N, even
    double spacing = 0.0;     // h = 2L/N

    double x(int i) const { return -half_width + i * spacing; }
    double y(int j) const { return -half_width + j * spacing; }
    std::size_t num_cells() const {
        return static_cast<std::size_t>(points_per_axis) * static_cast<std::size_t>(points_per_axis);
    }
    double cell_area() const { return spacing * spacing; }

    friend bool operator==(const Grid2D& a, const Grid2D& b) {
        return a.half_width == b.half_width && a.points_per_axis == b.points_per_axis;
    }
};

/// Rejects odd N, N < 8 and nonpositive L.
Grid2D make_grid(double half_width, int points_per_axis);

/// Real values sampled on a Grid2D, stored row-major with x fastest:
/// index(i, j) = j*N + i.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid2D& grid) : grid_(grid), v_(grid.num_cells(), 0.0) {}

    template <class F>
    static ScalarField sample(const Grid2D& grid, F&& f) {
        ScalarField out(grid);
        const int n = grid.points_per_axis;
        for (int j = 0; j < n; ++j) {
            const double y = grid.y(j);
            for (int i = 0; i < n; ++i) out.v_[static_cast<std::size_t>(j) * n + i] = f(grid.x(i), y);
        }
        return out;
    }

    const Grid2D& grid() const { return grid_; }
    int n() const { return grid_.points_per_axis; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[idx(i, j)]; }
    double operator()(int i, int j) const { return v_[idx(i, j)]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.points_per_axis) + i;
    }

    bool all_finite() const;

private:
    Grid2D grid_;
    std::vector<double> v_;
};

/// Two component arrays with ScalarField layout; houses gradients and fluxes.
struct VectorField2D {
    ScalarField x;
    ScalarField y;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& grid) : x(grid), y(grid) {}
    const Grid2D& grid() const { return x.grid(); }
};

namespace detail {

/// Fixed-order pairwise reduction; result is independent of thread count by
/// construction and reproducible to ~1e-15 relative.
template <class F>
double pairwise_sum(std::size_t begin, std::size_t end, F&& term) {
    const std::size_t n = end - begin;
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t k = begin; k < end; ++k) s += term(k);
        return s;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

}  // namespace detail

/// h^2 * sum of values (rectangle rule; spectrally accurate for smooth fields
/// decaying below truncation error at the boundary).
double integrate(const ScalarField& f);

/// h^2 * sum f*g.
double integrate_product(const ScalarField& f, const ScalarField& g);

/// h^2 * sum (fx*gx + fy*gy).
double integrate_dot(const VectorField2D& f, const VectorField2D& g);

/// Spectral derivatives on the periodic box (Nyquist mode zeroed in first
/// derivatives). Exact for band-limited fields.
VectorField2D gradient(const ScalarField& f);
ScalarField divergence(const VectorField2D& v);
ScalarField laplacian(const ScalarField& f);

/// Five-point finite-difference Laplacian with periodic wrap. Second-order,
/// strictly local; the stencil the time stepper inverts.
ScalarField laplacian_fd(const ScalarField& f);

double max_value(const ScalarField& f);
double min_value(const ScalarField& f);
double max_abs(const ScalarField& f);

}  // namespace kslab
