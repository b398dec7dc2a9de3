#include "kslab/grid.hpp"

#include <algorithm>

#include "kslab/spectral.hpp"

namespace kslab {

Grid2D make_grid(double half_width, int points_per_axis) {
    if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half width must be positive");
    if (points_per_axis < 8) throw std::invalid_argument("make_grid: need at least 8 points per axis");
    if (points_per_axis % 2 != 0) throw std::invalid_argument("make_grid: N must be even");
    Grid2D g;
    g.half_width = half_width;
    g.points_per_axis = points_per_axis;
    g.spacing = 2.0 * half_width / points_per_axis;
    return g;
}

bool ScalarField::all_finite() const {
    for (double v : v_)
        if (!std::isfinite(v)) return false;
    return true;
}

double integrate(const ScalarField& f) {
    if (!f.all_finite()) throw std::invalid_argument("integrate: field has non-finite values");
    const double* v = f.data();
    return f.grid().cell_area() * detail::pairwise_sum(0, f.size(), [v](std::size_t k) { return v[k]; });
}

double integrate_product(const ScalarField& f, const ScalarField& g) {
    const double* a = f.data();
    const double* b = g.data();
    return f.grid().cell_area() *
           detail::pairwise_sum(0, f.size(), [a, b](std::size_t k) { return a[k] * b[k]; });
}

double integrate_dot(const VectorField2D& f, const VectorField2D& g) {
    const double* ax = f.x.data();
    const double* ay = f.y.data();
    const double* bx = g.x.data();
    const double* by = g.y.data();
    return f.grid().cell_area() * detail::pairwise_sum(0, f.x.size(), [=](std::size_t k) {
               return ax[k] * bx[k] + ay[k] * by[k];
           });
}

VectorField2D gradient(const ScalarField& f) {
    VectorField2D out(f.grid());
    Spectral::shared(f.grid()).gradient(f, out);
    return out;
}

ScalarField divergence(const VectorField2D& v) {
    ScalarField out(v.grid());
    Spectral::shared(v.grid()).divergence(v, out);
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid());
    Spectral::shared(f.grid()).laplacian(f, out);
    return out;
}

ScalarField laplacian_fd(const ScalarField& f) {
    const Grid2D& g = f.grid();
    const int n = g.points_per_axis;
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    ScalarField out(g);
    for (int j = 0; j < n; ++j) {
        const int jm = (j + n - 1) % n, jp = (j + 1) % n;
        for (int i = 0; i < n; ++i) {
            const int im = (i + n - 1) % n, ip = (i + 1) % n;
            out(i, j) = (f(ip, j) + f(im, j) + f(i, jp) + f(i, jm) - 4.0 * f(i, j)) * inv_h2;
        }
    }
    return out;
}

double max_value(const ScalarField& f) {
    return *std::max_element(f.data(), f.data() + f.size());
}

double min_value(const ScalarField& f) {
    return *std::min_element(f.data(), f.data() + f.size());
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
    return m;
}

}  // namespace kslab
