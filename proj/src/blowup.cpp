#include "kslab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kslab/kernels.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

const char* to_string(BlowupVerdict::Class c) {
    switch (c) {
        case BlowupVerdict::Class::GlobalLike: return "GlobalLike";
        case BlowupVerdict::Class::BlowupLike: return "BlowupLike";
        case BlowupVerdict::Class::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string BlowupVerdict::to_json() const {
    char buf[320];
    char td[48] = "null", ts[48] = "null";
    if (t_detect) std::snprintf(td, sizeof(td), "%.17g", *t_detect);
    if (bound_Tstar) std::snprintf(ts, sizeof(ts), "%.17g", *bound_Tstar);
    std::snprintf(buf, sizeof(buf),
                  "{\"classification\":\"%s\",\"t_detect\":%s,\"bound_Tstar\":%s,"
                  "\"virial_slope_fit\":%.17g,\"threshold_ok\":%s}",
                  to_string(classification), td, ts, virial_slope_fit,
                  threshold_ok ? "true" : "false");
    return buf;
}

double virial_rhs(const ScalarField& n, double alpha) {
    const double mass = integrate(n);
    if (!(mass > 0.0)) throw std::invalid_argument("virial_rhs: mass must be positive");
    const double base = 4.0 * mass * (1.0 - mass / (8.0 * M_PI));
    if (alpha == 0.0) return base;

    static thread_local std::unique_ptr<FreeSpaceConvolver> conv;
    if (!conv || !(conv->grid() == n.grid()) || conv->alpha() != alpha)
        conv = std::make_unique<FreeSpaceConvolver>(n.grid(),
                                                    FreeSpaceConvolver::Kind::OneMinusScreening,
                                                    alpha);
    ScalarField w(n.grid());
    conv->value(n, w);
    return base + integrate_product(n, w) / (2.0 * M_PI);
}

BlowupBound blowup_bound(double mass, double alpha, double second_moment0, double c_const) {
    if (!(mass > 8.0 * M_PI))
        throw std::invalid_argument("blowup_bound: requires supercritical mass M > 8*pi");
    if (!(second_moment0 > 0.0))
        throw std::invalid_argument("blowup_bound: second moment must be positive");
    if (c_const < 1.0) throw std::invalid_argument("blowup_bound: constant must be >= 1");
    if (alpha < 0.0) throw std::invalid_argument("blowup_bound: alpha must be nonnegative");

    BlowupBound out;
    const double excess = mass - 8.0 * M_PI;
    out.threshold_ok = alpha * second_moment0 <= excess * excess / (4.0 * c_const * c_const * mass);
    if (out.threshold_ok) {
        const double denom = mass * (excess - 2.0 * c_const * std::sqrt(alpha * mass * second_moment0));
        if (denom > 0.0) out.t_star = 2.0 * M_PI * second_moment0 / denom;
    }
    return out;
}

double fit_virial_slope(const Trajectory& traj, const Grid2D& grid, double mass, double fit_l2_cap) {
    const double h2 = grid.cell_area();
    double st = 0, si = 0, stt = 0, sti = 0;
    long count = 0;
    for (const DiagnosticsRecord& r : traj.records) {
        // discrete aggregates saturate the pairing; trust only well-resolved records
        if (h2 * r.lp2 * r.lp2 > fit_l2_cap * mass * mass) continue;
        st += r.t;
        si += r.moment_2;
        stt += r.t * r.t;
        sti += r.t * r.moment_2;
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = count * stt - st * st;
    if (denom == 0.0) return 0.0;
    return (count * sti - st * si) / denom;
}

namespace {

bool peak_growing(const Trajectory& traj, const ClassifierConfig& cfg) {
    const auto& recs = traj.records;
    if (recs.size() < 3) return false;
    const double t_end = recs.back().t;
    const double t_from = t_end * (1.0 - cfg.last_fraction);
    std::size_t first = 0;
    while (first + 1 < recs.size() && recs[first].t < t_from) ++first;
    if (recs.size() - first < 3) first = recs.size() - 3;
    long up = 0, total = 0;
    for (std::size_t k = first + 1; k < recs.size(); ++k) {
        ++total;
        if (recs[k].max_n >= recs[k - 1].max_n * (1.0 - cfg.dip_tolerance)) ++up;
    }
    return total > 0 && up >= cfg.monotone_fraction * total;
}

}  // namespace

BlowupVerdict classify(const Trajectory& traj, const ModelParams& params, const Grid2D& grid,
                       const ClassifierConfig& cfg) {
    if (traj.records.empty()) throw std::invalid_argument("classify: empty trajectory");
    const auto& recs = traj.records;
    const double mass = traj.mass0 > 0.0 ? traj.mass0 : recs.front().mass;

    BlowupVerdict v;
    v.virial_slope_fit = fit_virial_slope(traj, grid, mass, cfg.fit_l2_cap);

    if (mass > 8.0 * M_PI) {
        const BlowupBound b = blowup_bound(mass, params.alpha, recs.front().moment_2,
                                           virial_constant());
        v.threshold_ok = b.threshold_ok;
        v.bound_Tstar = b.t_star;
    }

    const bool elliptic_zero =
        params.variant == ModelVariant::ParabolicElliptic && params.alpha == 0.0;

    // flat virial band: the dichotomy is degenerate at the critical mass
    if (elliptic_zero && std::abs(1.0 - mass / (8.0 * M_PI)) <= cfg.critical_band) {
        v.classification = BlowupVerdict::Class::Inconclusive;
        return v;
    }

    if (traj.termination == Termination::DtUnderflow) {
        bool corroborated = peak_growing(traj, cfg);
        if (elliptic_zero) {
            const double theory = 4.0 * mass * (1.0 - mass / (8.0 * M_PI));
            corroborated = corroborated && theory < 0.0 &&
                           std::abs(v.virial_slope_fit - theory) <= cfg.slope_rtol * std::abs(theory);
        }
        if (corroborated) {
            v.classification = BlowupVerdict::Class::BlowupLike;
            v.t_detect = recs.back().t;
            return v;
        }
    }

    if (traj.termination == Termination::TimeReached) {
        // |n|_2 bounded: the tail must not outgrow the mid-run level
        double mid_max = 0.0, tail_max = 0.0;
        const double t_end = recs.back().t;
        for (const DiagnosticsRecord& r : recs) {
            if (r.t <= 0.75 * t_end) mid_max = std::max(mid_max, r.lp2);
            if (r.t >= 0.75 * t_end) tail_max = std::max(tail_max, r.lp2);
        }
        const bool l2_bounded = tail_max <= cfg.bounded_growth * std::max(mid_max, 1e-300);
        const bool non_collapsing =
            recs.back().moment_2 >= cfg.collapse_floor * recs.front().moment_2;
        if (l2_bounded && non_collapsing) {
            v.classification = BlowupVerdict::Class::GlobalLike;
            return v;
        }
    }

    v.classification = BlowupVerdict::Class::Inconclusive;
    return v;
}

}  // namespace kslab
