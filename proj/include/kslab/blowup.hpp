#pragma once

#include <optional>
#include <string>

#include "kslab/functionals.hpp"
#include "kslab/grid.hpp"
#include "kslab/solver.hpp"

namespace kslab {

struct BlowupVerdict {
    enum class Class { GlobalLike, BlowupLike, Inconclusive };
    Class classification = Class::Inconclusive;
    std::optional<double> t_detect;
    std::optional<double> bound_Tstar;
    double virial_slope_fit = 0.0;
    bool threshold_ok = false;

    std::string to_json() const;
};

const char* to_string(BlowupVerdict::Class c);

/// Exact second-moment rate: 4M(1 - M/8pi) for alpha = 0; for alpha > 0 adds
/// (1/2pi) int int n [1 - g_alpha(x-y)] n via a padded free-space convolution
/// with the bounded kernel 1 - g_alpha.
double virial_rhs(const ScalarField& n, double alpha);

struct BlowupBound {
    bool threshold_ok = false;        // alpha I0 <= (M - 8pi)^2 / (4 C^2 M)
    std::optional<double> t_star;     // 2 pi I0 / (M (M - 8pi - 2 C sqrt(alpha M I0)))
};

/// Requires supercritical mass M > 8pi; c_const >= 1 from virial_constant().
BlowupBound blowup_bound(double mass, double alpha, double second_moment0, double c_const);

/// Frozen classification thresholds.
struct ClassifierConfig {
    double last_fraction = 0.10;      // trailing time window for peak growth
    double monotone_fraction = 0.90;  // required fraction of increasing steps
    double dip_tolerance = 1e-6;      // relative dips ignored by monotonicity
    double critical_band = 0.05;      // |1 - M/8pi| band declared inconclusive
    double slope_rtol = 0.10;         // virial slope match for the elliptic model
    double fit_l2_cap = 0.05;         // drop records with h^2 |n|_2^2 > cap M^2
    double collapse_floor = 0.5;      // I(t_end)/I(0) below this counts as collapsing
    double bounded_growth = 1.25;     // allowed tail growth of |n|_2 for GlobalLike
};

BlowupVerdict classify(const Trajectory& trajectory, const ModelParams& params, const Grid2D& grid,
                       const ClassifierConfig& cfg = {});

/// Least-squares slope of moment_2 against t over the trusted window.
double fit_virial_slope(const Trajectory& trajectory, const Grid2D& grid, double mass,
                        double fit_l2_cap = 0.05);

}  // namespace kslab
