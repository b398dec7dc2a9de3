#pragma once

#include <cmath>

#include "kslab/grid.hpp"

namespace kslab {

enum class ModelVariant { ParabolicParabolic, ParabolicElliptic, CorrectedParabolicParabolic };

struct ModelParams {
    ModelVariant variant = ModelVariant::ParabolicParabolic;
    double epsilon = 1.0;       // chemical time constant; 0 for the elliptic model
    double alpha = 0.0;         // degradation rate
    double mass = 4.0 * M_PI;   // target mass of the initial data
    double sigma_mollify = 0.0; // mollifier width, 0 = off

    void validate() const;
};

/// One time sample of every monitored functional. The first 19 fields are the
/// trajectory CSV schema, in column order; the trailing fields are in-memory
/// companions used by the trajectory checks.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double moment_log = 0.0;          // int n log(1+|x|^2)
    double moment_1 = 0.0;            // int |x| n
    double moment_2 = 0.0;            // int |x|^2 n
    double phys_entropy = 0.0;        // int n log n
    double coupling = 0.0;            // int n c
    double grad_c_sq = 0.0;           // int |grad c|^2
    double c_sq = 0.0;                // int c^2
    double free_energy = 0.0;
    double modified_free_energy = 0.0;
    double entropy_production = 0.0;  // int n |grad(log n - c)|^2, sqrt-form
    double dt_c_sq = 0.0;             // int |dt c|^2 from discrete increments
    double lp2 = 0.0, lp3 = 0.0, lp4 = 0.0;
    double equi_k1 = 0.0, equi_k2 = 0.0;
    double dt_used = 0.0;

    double max_n = 0.0;
    double cum_entropy_prod = 0.0;    // int_0^t entropy_production ds
    double cum_dt_c_sq = 0.0;         // int_0^t dt_c_sq ds
};

/// Threshold below which cells are dropped from log-containing integrands
/// (the 0 log 0 = 0 convention): 1e-14 times the peak of n.
double log_threshold(const ScalarField& n);

/// int n log n with the 0 log 0 = 0 convention.
double phys_entropy(const ScalarField& n);

/// E(t) = int n log n - int n c + 1/2 int |grad c|^2 + alpha/2 int c^2.
/// grad c is spectral; callers with non-periodic c go through the solver paths.
double free_energy(const ScalarField& n, const ScalarField& c, double alpha);

/// E(n;c) = int (n log n - n c).
double entropy(const ScalarField& n, const ScalarField& c);

/// F_alpha(c;n) = 1/2 int |grad c|^2 + alpha/2 int c^2 - int n c.
double chemical_energy(const ScalarField& c, const ScalarField& n, double alpha);

/// int n |grad(log n - c)|^2 evaluated as int |2 grad sqrt(n) - sqrt(n) grad c|^2,
/// finite where n vanishes.
double entropy_production(const ScalarField& n, const ScalarField& c);
/// Same, with the drift field supplied directly (grad c already in hand).
double entropy_production(const ScalarField& n, const VectorField2D& grad_c);

struct Moments {
    double log_moment = 0.0;  // int n log(1+|x|^2)
    double first = 0.0;       // int |x| n
    double second = 0.0;      // int |x|^2 n
};
Moments moments(const ScalarField& n);

/// int (n - k)_+.
double equi_integrability(const ScalarField& n, double k);

/// (int n^p)^(1/p), p >= 1.
double lp_norm(const ScalarField& n, double p);

/// int n log H with the analytic log H per cell.
double integral_n_log_H(const ScalarField& n);
/// int u H with analytic H per cell.
double integral_against_H(const ScalarField& u);

/// E_H(t) = E(t) - int n log H.
double modified_free_energy(const ScalarField& n, const ScalarField& c, double alpha);

/// Free energy of the corrected system in the deviation variable u:
/// int n log n - int n u + 1/2 int |grad u|^2 - (M/8pi) int n log H + M int u H,
/// with M the discrete mass of n.
double corrected_free_energy(const ScalarField& n, const ScalarField& u);

}  // namespace kslab
