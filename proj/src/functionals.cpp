#include "kslab/functionals.hpp"

#include <stdexcept>

#include "kslab/kernels.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

void ModelParams::validate() const {
    if (epsilon < 0.0 || alpha < 0.0) throw std::invalid_argument("ModelParams: negative coefficient");
    if (!(mass > 0.0)) throw std::invalid_argument("ModelParams: mass must be positive");
    if (sigma_mollify < 0.0) throw std::invalid_argument("ModelParams: negative mollifier width");
    switch (variant) {
        case ModelVariant::ParabolicParabolic:
            if (!(epsilon > 0.0))
                throw std::invalid_argument("ModelParams: parabolic-parabolic requires epsilon > 0");
            break;
        case ModelVariant::ParabolicElliptic:
            if (epsilon != 0.0)
                throw std::invalid_argument("ModelParams: parabolic-elliptic requires epsilon = 0");
            break;
        case ModelVariant::CorrectedParabolicParabolic:
            if (!(epsilon > 0.0))
                throw std::invalid_argument("ModelParams: corrected variant requires epsilon > 0");
            if (alpha != 0.0)
                throw std::invalid_argument("ModelParams: corrected variant requires alpha = 0");
            if (!(mass < 8.0 * M_PI))
                throw std::invalid_argument("ModelParams: corrected variant requires mass < 8*pi");
            break;
    }
}

double log_threshold(const ScalarField& n) { return 1e-14 * max_value(n); }

double phys_entropy(const ScalarField& n) {
    const double theta = log_threshold(n);
    const double* v = n.data();
    return n.grid().cell_area() * detail::pairwise_sum(0, n.size(), [v, theta](std::size_t k) {
               return (v[k] > theta) ? v[k] * std::log(v[k]) : 0.0;
           });
}

double free_energy(const ScalarField& n, const ScalarField& c, double alpha) {
    const VectorField2D gc = gradient(c);
    return phys_entropy(n) - integrate_product(n, c) + 0.5 * integrate_dot(gc, gc) +
           0.5 * alpha * integrate_product(c, c);
}

double entropy(const ScalarField& n, const ScalarField& c) {
    return phys_entropy(n) - integrate_product(n, c);
}

double chemical_energy(const ScalarField& c, const ScalarField& n, double alpha) {
    const VectorField2D gc = gradient(c);
    return 0.5 * integrate_dot(gc, gc) + 0.5 * alpha * integrate_product(c, c) -
           integrate_product(n, c);
}

double entropy_production(const ScalarField& n, const ScalarField& c) {
    return entropy_production(n, gradient(c));
}

double entropy_production(const ScalarField& n, const VectorField2D& grad_c) {
    ScalarField s(n.grid());
    for (std::size_t k = 0; k < n.size(); ++k) s[k] = std::sqrt(std::max(n[k], 0.0));
    const VectorField2D gs = gradient(s);
    const double theta = log_threshold(n);
    const double* nv = n.data();
    const double* sv = s.data();
    const double* gx = gs.x.data();
    const double* gy = gs.y.data();
    const double* cx = grad_c.x.data();
    const double* cy = grad_c.y.data();
    return n.grid().cell_area() * detail::pairwise_sum(0, n.size(), [=](std::size_t k) {
               if (nv[k] <= theta) return 0.0;
               const double fx = 2.0 * gx[k] - sv[k] * cx[k];
               const double fy = 2.0 * gy[k] - sv[k] * cy[k];
               return fx * fx + fy * fy;
           });
}

Moments moments(const ScalarField& n) {
    const Grid2D& g = n.grid();
    const int N = g.points_per_axis;
    const double* v = n.data();
    Moments m;
    m.log_moment = g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
                       const int i = static_cast<int>(k) % N, j = static_cast<int>(k) / N;
                       const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
                       return v[k] * std::log1p(r2);
                   });
    m.first = g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
                  const int i = static_cast<int>(k) % N, j = static_cast<int>(k) / N;
                  return v[k] * std::hypot(g.x(i), g.y(j));
              });
    m.second = g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
                   const int i = static_cast<int>(k) % N, j = static_cast<int>(k) / N;
                   return v[k] * (g.x(i) * g.x(i) + g.y(j) * g.y(j));
               });
    return m;
}

double equi_integrability(const ScalarField& n, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("equi_integrability: k must be positive");
    const double* v = n.data();
    return n.grid().cell_area() * detail::pairwise_sum(0, n.size(), [v, k](std::size_t q) {
               return std::max(v[q] - k, 0.0);
           });
}

double lp_norm(const ScalarField& n, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double* v = n.data();
    const double s = n.grid().cell_area() * detail::pairwise_sum(0, n.size(), [v, p](std::size_t k) {
                         return std::pow(std::max(v[k], 0.0), p);
                     });
    return std::pow(s, 1.0 / p);
}

double integral_n_log_H(const ScalarField& n) {
    const Grid2D& g = n.grid();
    const int N = g.points_per_axis;
    const double* v = n.data();
    return g.cell_area() * detail::pairwise_sum(0, n.size(), [&](std::size_t k) {
               const int i = static_cast<int>(k) % N, j = static_cast<int>(k) / N;
               return v[k] * log_stereo_weight(g.x(i), g.y(j));
           });
}

double integral_against_H(const ScalarField& u) {
    const Grid2D& g = u.grid();
    const int N = g.points_per_axis;
    const double* v = u.data();
    return g.cell_area() * detail::pairwise_sum(0, u.size(), [&](std::size_t k) {
               const int i = static_cast<int>(k) % N, j = static_cast<int>(k) / N;
               return v[k] * stereo_weight(g.x(i), g.y(j));
           });
}

double modified_free_energy(const ScalarField& n, const ScalarField& c, double alpha) {
    return free_energy(n, c, alpha) - integral_n_log_H(n);
}

double corrected_free_energy(const ScalarField& n, const ScalarField& u) {
    const double mass = integrate(n);
    const VectorField2D gu = gradient(u);
    return phys_entropy(n) - integrate_product(n, u) + 0.5 * integrate_dot(gu, gu) -
           mass / (8.0 * M_PI) * integral_n_log_H(n) + mass * integral_against_H(u);
}

}  // namespace kslab
