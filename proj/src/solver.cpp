#include "kslab/solver.hpp"

#include <algorithm>
#include <stdexcept>

#include "kslab/kernels.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

void StepControl::validate() const {
    if (!(dt_min > 0.0) || !(dt_max > 0.0) || !(dt_init > 0.0))
        throw std::invalid_argument("StepControl: time steps must be positive");
    if (dt_min > dt_init || dt_init > dt_max)
        throw std::invalid_argument("StepControl: need dt_min <= dt_init <= dt_max");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw std::invalid_argument("StepControl: cfl_safety must lie in (0, 1]");
    if (!(t_end > 0.0)) throw std::invalid_argument("StepControl: t_end must be positive");
    if (record_every < 1) throw std::invalid_argument("StepControl: record_every must be >= 1");
}

InitPreset InitPreset::gaussian(double mass, double sigma, double cx, double cy) {
    InitPreset p;
    p.kind = Kind::Gaussian;
    p.mass = mass;
    p.sigma = sigma;
    p.center_x = cx;
    p.center_y = cy;
    return p;
}

InitPreset InitPreset::two_bumps(double mass, double sigma, double separation) {
    InitPreset p;
    p.kind = Kind::TwoBumps;
    p.mass = mass;
    p.sigma = sigma;
    p.separation = separation;
    return p;
}

InitPreset InitPreset::h_family(double mass, double lambda) {
    InitPreset p;
    p.kind = Kind::HFamily;
    p.mass = mass;
    p.lambda = lambda;
    return p;
}

InitPreset InitPreset::spiky_l1(double mass, double width) {
    InitPreset p;
    p.kind = Kind::SpikyL1;
    p.mass = mass;
    p.width = width;
    return p;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::TimeReached: return "TimeReached";
        case Termination::DtUnderflow: return "DtUnderflow";
        case Termination::NanAbort: return "NanAbort";
    }
    return "?";
}

namespace {

ScalarField build_preset(const InitPreset& p, const Grid2D& grid) {
    if (!(p.mass > 0.0)) throw std::invalid_argument("init_state: preset mass must be positive");
    switch (p.kind) {
        case InitPreset::Kind::Gaussian: {
            if (grid.spacing > 2.0 * p.sigma)
                throw std::invalid_argument("init_state: grid too coarse for the Gaussian preset");
            const double a = p.mass / (2.0 * M_PI * p.sigma * p.sigma);
            const double inv = 0.5 / (p.sigma * p.sigma);
            return ScalarField::sample(grid, [&](double x, double y) {
                const double dx = x - p.center_x, dy = y - p.center_y;
                return a * std::exp(-(dx * dx + dy * dy) * inv);
            });
        }
        case InitPreset::Kind::TwoBumps: {
            if (grid.spacing > 2.0 * p.sigma)
                throw std::invalid_argument("init_state: grid too coarse for the TwoBumps preset");
            const double a = 0.5 * p.mass / (2.0 * M_PI * p.sigma * p.sigma);
            const double inv = 0.5 / (p.sigma * p.sigma);
            const double off = 0.5 * p.separation;
            return ScalarField::sample(grid, [&](double x, double y) {
                const double l = (x + off) * (x + off) + y * y;
                const double r = (x - off) * (x - off) + y * y;
                return a * (std::exp(-l * inv) + std::exp(-r * inv));
            });
        }
        case InitPreset::Kind::HFamily: {
            const double l2 = p.lambda * p.lambda;
            return ScalarField::sample(grid, [&](double x, double y) {
                return p.mass * l2 * stereo_weight(p.lambda * x, p.lambda * y);
            });
        }
        case InitPreset::Kind::SpikyL1: {
            // Deliberately unresolved L1 concentration: sample and renormalize
            // the discrete mass exactly.
            const double a = p.mass / (2.0 * M_PI * p.width * p.width);
            const double inv = 0.5 / (p.width * p.width);
            ScalarField n = ScalarField::sample(grid, [&](double x, double y) {
                return a * std::exp(-(x * x + y * y) * inv);
            });
            const double m = integrate(n);
            if (!(m > 0.0)) throw std::invalid_argument("init_state: spike lost under the grid");
            for (std::size_t k = 0; k < n.size(); ++k) n[k] *= p.mass / m;
            return n;
        }
    }
    throw std::logic_error("init_state: unknown preset");
}

// Periodic convolution with a unit-discrete-mass compact bump of width sigma.
// Exact mass preservation; identical to the free-space mollification for
// interior-supported data.
ScalarField mollify(const ScalarField& f, double sigma) {
    const Grid2D& g = f.grid();
    const int n = g.points_per_axis;
    ScalarField bump(g);
    for (int j = 0; j < n; ++j) {
        const int mj = (j <= n / 2) ? j : j - n;
        for (int i = 0; i < n; ++i) {
            const int mi = (i <= n / 2) ? i : i - n;
            const double r = std::hypot(mi * g.spacing, mj * g.spacing) / sigma;
            bump(i, j) = (r < 1.0) ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
        }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < bump.size(); ++k) total += bump[k];
    if (!(total > 0.0)) return f;  // bump below grid resolution: nothing to do
    for (std::size_t k = 0; k < bump.size(); ++k) bump[k] /= total;

    ScalarField out(g);
    Spectral::shared(g).periodic_convolve(f, bump, out);
    return out;
}

}  // namespace

SimState init_state(const ModelParams& params, const InitPreset& preset, const Grid2D& grid) {
    params.validate();
    ScalarField n = build_preset(preset, grid);
    if (params.sigma_mollify > 0.0) n = mollify(n, params.sigma_mollify);

    SimState s;
    s.mass0 = integrate(n);
    s.t = 0.0;
    s.step = 0;

    switch (params.variant) {
        case ModelVariant::ParabolicElliptic: {
            const KernelSpec spec{params.alpha > 0.0 ? KernelSpec::Kind::Bessel
                                                     : KernelSpec::Kind::LogE2,
                                  params.alpha};
            s.c = convolve_free_space(n, spec);
            break;
        }
        case ModelVariant::ParabolicParabolic:
            // discrete steady response of the chemical equation
            s.c = solve_screened_poisson(n, params.alpha);
            break;
        case ModelVariant::CorrectedParabolicParabolic: {
            const ScalarField c0 = convolve_free_space(n, {KernelSpec::Kind::LogE2, 0.0});
            const double scale = s.mass0 / (8.0 * M_PI);
            s.c = ScalarField(grid);
            const int N = grid.points_per_axis;
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i)
                    s.c(i, j) = c0(i, j) - scale * log_stereo_weight(grid.x(i), grid.y(j));
            break;
        }
    }
    s.n = std::move(n);
    return s;
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

struct Stepper::Impl {
    Grid2D grid;
    ModelParams params;
    StepControl ctrl;
    Spectral spec;
    std::unique_ptr<FreeSpaceConvolver> conv;  // PE only
    SimState state;

    VectorField2D vel;       // drift at the current state
    VectorField2D corr_drift;  // analytic (M/8pi) grad log H for the corrected variant
    ScalarField n_star, n_next, c_next, src;
    double last_dt_c_sq = 0.0;
    double last_dt = 0.0;
    double cum_iprod = 0.0;
    double cum_dtc = 0.0;
    long clips = 0;
    bool vel_fresh = false;

    Impl(const Grid2D& g, const ModelParams& p, const StepControl& c)
        : grid(g), params(p), ctrl(c), spec(g), vel(g), corr_drift(g), n_star(g), n_next(g),
          c_next(g), src(g) {
        p.validate();
        c.validate();
        if (p.variant == ModelVariant::ParabolicElliptic)
            conv = std::make_unique<FreeSpaceConvolver>(
                g,
                p.alpha > 0.0 ? FreeSpaceConvolver::Kind::Bessel : FreeSpaceConvolver::Kind::LogE2,
                p.alpha);
    }

    void refresh_drift() {
        if (ctrl.drift_off) {
            std::fill(vel.x.data(), vel.x.data() + vel.x.size(), 0.0);
            std::fill(vel.y.data(), vel.y.data() + vel.y.size(), 0.0);
            vel_fresh = true;
            return;
        }
        switch (params.variant) {
            case ModelVariant::ParabolicElliptic:
                conv->value_and_gradient(state.n, state.c, vel);
                break;
            case ModelVariant::ParabolicParabolic:
                spec.gradient(state.c, vel);
                break;
            case ModelVariant::CorrectedParabolicParabolic: {
                spec.gradient(state.c, vel);
                const double scale = state.mass0 / (8.0 * M_PI);
                const int N = grid.points_per_axis;
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i < N; ++i) {
                        double gx, gy;
                        grad_log_stereo_weight(grid.x(i), grid.y(j), gx, gy);
                        vel.x(i, j) += scale * gx;
                        vel.y(i, j) += scale * gy;
                    }
                break;
            }
        }
        vel_fresh = true;
    }

    double max_speed() const {
        double m = 0.0;
        for (std::size_t k = 0; k < vel.x.size(); ++k)
            m = std::max(m, std::abs(vel.x[k]) + std::abs(vel.y[k]));
        return m;
    }

    static double minmod(double a, double b) {
        if (a > 0.0 && b > 0.0) return std::min(a, b);
        if (a < 0.0 && b < 0.0) return std::max(a, b);
        return 0.0;
    }

    // Conservative MUSCL upwind divergence of (n v): out = div F with
    // face-reconstructed minmod slopes. Flux form, so mass is conserved to
    // roundoff; positivity holds under the advective CFL bound.
    void advective_divergence(const ScalarField& n, ScalarField& out) {
        const int N = grid.points_per_axis;
        const double inv_h = 1.0 / grid.spacing;
        std::vector<double> fx(static_cast<std::size_t>(N) * N), fy(fx.size());
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i < N; ++i) {
                const int im = (i + N - 1) % N, ip = (i + 1) % N, ipp = (i + 2) % N;
                const double u = 0.5 * (vel.x(i, j) + vel.x(ip, j));
                const double sl = minmod(n(i, j) - n(im, j), n(ip, j) - n(i, j));
                const double sr = minmod(n(ip, j) - n(i, j), n(ipp, j) - n(ip, j));
                const double nl = n(i, j) + 0.5 * sl;
                const double nr = n(ip, j) - 0.5 * sr;
                fx[n.idx(i, j)] = std::max(u, 0.0) * nl + std::min(u, 0.0) * nr;

                const int jm = (j + N - 1) % N, jp = (j + 1) % N, jpp = (j + 2) % N;
                const double v = 0.5 * (vel.y(i, j) + vel.y(i, jp));
                const double tl = minmod(n(i, j) - n(i, jm), n(i, jp) - n(i, j));
                const double tr = minmod(n(i, jp) - n(i, j), n(i, jpp) - n(i, jp));
                const double nb = n(i, j) + 0.5 * tl;
                const double nt = n(i, jp) - 0.5 * tr;
                fy[n.idx(i, j)] = std::max(v, 0.0) * nb + std::min(v, 0.0) * nt;
            }
        }
        for (int j = 0; j < N; ++j) {
            const int jm = (j + N - 1) % N;
            for (int i = 0; i < N; ++i) {
                const int im = (i + N - 1) % N;
                out(i, j) = (fx[n.idx(i, j)] - fx[n.idx(im, j)] + fy[n.idx(i, j)] -
                             fy[n.idx(i, jm)]) *
                            inv_h;
            }
        }
    }

    Outcome step() {
        Outcome o;
        if (state.t >= ctrl.t_end) {
            o.stop = Termination::TimeReached;
            return o;
        }
        if (!vel_fresh) refresh_drift();

        // 1) advective CFL
        double dt = ctrl.dt_max;
        if (state.step == 0) dt = std::min(dt, ctrl.dt_init);
        const double speed = max_speed();
        if (speed > 0.0) dt = std::min(dt, ctrl.cfl_safety * grid.spacing / speed);
        if (dt < ctrl.dt_min) {
            o.stop = Termination::DtUnderflow;
            return o;
        }
        dt = std::min(dt, ctrl.t_end - state.t);

        // 2) dissipation integrals at the pre-step state (left endpoint)
        if (ctrl.track_cumulative) cum_iprod += dt * entropy_production(state.n, vel);

        // 3) explicit MUSCL advection
        advective_divergence(state.n, n_star);
        for (std::size_t k = 0; k < n_star.size(); ++k) n_star[k] = state.n[k] - dt * n_star[k];

        // 4) implicit five-point diffusion: n+ = (1/dt)((1/dt) - lap)^{-1} n*
        spec.solve_fd_diffusion(1.0 / dt, n_star, n_next);
        const double inv_dt = 1.0 / dt;
        double peak = 0.0;
        for (std::size_t k = 0; k < n_next.size(); ++k) {
            n_next[k] *= inv_dt;
            peak = std::max(peak, n_next[k]);
        }
        // roundoff floor: transform roundoff may leave O(1e-15 * peak) noise
        // where n vanishes; anything more negative counts as a clip event
        const double floor = -1e-12 * peak;
        for (std::size_t k = 0; k < n_next.size(); ++k) {
            if (n_next[k] < 0.0) {
                if (n_next[k] < floor) ++clips;
                n_next[k] = 0.0;
            }
        }

        // 5) chemical update
        switch (params.variant) {
            case ModelVariant::ParabolicElliptic:
                state.n = n_next;
                refresh_drift();  // also restores c = K * n
                last_dt_c_sq = 0.0;
                break;
            case ModelVariant::ParabolicParabolic: {
                spec.chemical_step(params.epsilon / dt, params.alpha, state.c, n_next, false,
                                   c_next);
                accumulate_dtc(dt);
                state.n = n_next;
                state.c = c_next;
                vel_fresh = false;
                break;
            }
            case ModelVariant::CorrectedParabolicParabolic: {
                const int N = grid.points_per_axis;
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i < N; ++i)
                        src(i, j) = n_next(i, j) -
                                    state.mass0 * stereo_weight(grid.x(i), grid.y(j));
                spec.chemical_step(params.epsilon / dt, 0.0, state.c, src, true, c_next);
                accumulate_dtc(dt);
                state.n = n_next;
                state.c = c_next;
                vel_fresh = false;
                break;
            }
        }

        state.t += dt;
        state.step += 1;
        last_dt = dt;
        o.advanced = true;
        o.dt = dt;

        // NaN guard on the updated fields
        if (!state.n.all_finite() || !state.c.all_finite()) {
            o.stop = Termination::NanAbort;
        } else if (state.t >= ctrl.t_end - 1e-15 * ctrl.t_end) {
            o.stop = Termination::TimeReached;
        }
        return o;
    }

    void accumulate_dtc(double dt) {
        const double inv = 1.0 / dt;
        const double* a = c_next.data();
        const double* b = state.c.data();
        last_dt_c_sq = grid.cell_area() * detail::pairwise_sum(0, c_next.size(), [=](std::size_t k) {
                           const double d = (a[k] - b[k]) * inv;
                           return d * d;
                       });
        if (ctrl.track_cumulative) cum_dtc += dt * last_dt_c_sq;
    }

    DiagnosticsRecord diagnostics() {
        if (!vel_fresh) refresh_drift();
        DiagnosticsRecord r;
        r.t = state.t;
        r.mass = integrate(state.n);
        const Moments m = moments(state.n);
        r.moment_log = m.log_moment;
        r.moment_1 = m.first;
        r.moment_2 = m.second;
        r.phys_entropy = phys_entropy(state.n);
        r.coupling = integrate_product(state.n, state.c);

        // grad c: convolver gradient for PE, spectral otherwise; for the
        // corrected variant this is grad u (the evolved field)
        if (params.variant == ModelVariant::ParabolicElliptic && !ctrl.drift_off) {
            r.grad_c_sq = integrate_dot(vel, vel);
        } else {
            VectorField2D gc(grid);
            spec.gradient(state.c, gc);
            r.grad_c_sq = integrate_dot(gc, gc);
        }
        r.c_sq = integrate_product(state.c, state.c);

        if (params.variant == ModelVariant::CorrectedParabolicParabolic) {
            r.free_energy = r.phys_entropy - r.coupling + 0.5 * r.grad_c_sq -
                            state.mass0 / (8.0 * M_PI) * integral_n_log_H(state.n) +
                            state.mass0 * integral_against_H(state.c);
        } else {
            r.free_energy =
                r.phys_entropy - r.coupling + 0.5 * r.grad_c_sq + 0.5 * params.alpha * r.c_sq;
        }
        r.modified_free_energy = r.free_energy - integral_n_log_H(state.n);
        r.entropy_production = entropy_production(state.n, vel);
        r.dt_c_sq = last_dt_c_sq;
        r.lp2 = lp_norm(state.n, 2.0);
        r.lp3 = lp_norm(state.n, 3.0);
        r.lp4 = lp_norm(state.n, 4.0);
        r.equi_k1 = equi_integrability(state.n, ctrl.equi_k1);
        r.equi_k2 = equi_integrability(state.n, ctrl.equi_k2);
        r.dt_used = last_dt;
        r.max_n = max_value(state.n);
        r.cum_entropy_prod = cum_iprod;
        r.cum_dt_c_sq = cum_dtc;
        return r;
    }
};

Stepper::Stepper(const Grid2D& grid, const ModelParams& params, const StepControl& ctrl)
    : impl_(std::make_unique<Impl>(grid, params, ctrl)) {}
Stepper::~Stepper() = default;

void Stepper::set_state(SimState state) {
    impl_->state = std::move(state);
    impl_->vel_fresh = false;
    impl_->cum_iprod = 0.0;
    impl_->cum_dtc = 0.0;
    impl_->last_dt = 0.0;
    impl_->last_dt_c_sq = 0.0;
}

const SimState& Stepper::state() const { return impl_->state; }

Stepper::Outcome Stepper::step() { return impl_->step(); }

DiagnosticsRecord Stepper::diagnostics() const { return impl_->diagnostics(); }

long Stepper::clip_events() const { return impl_->clips; }

Trajectory run_from(SimState state, const ModelParams& params, const Grid2D& grid,
                    const StepControl& ctrl) {
    Stepper stepper(grid, params, ctrl);
    stepper.set_state(std::move(state));

    Trajectory traj;
    traj.mass0 = stepper.state().mass0;
    traj.records.push_back(stepper.diagnostics());

    long since_record = 0;
    while (true) {
        const Stepper::Outcome o = stepper.step();
        if (o.advanced) {
            ++since_record;
            if (since_record >= ctrl.record_every) {
                traj.records.push_back(stepper.diagnostics());
                since_record = 0;
            }
        }
        if (o.stop) {
            traj.termination = *o.stop;
            if (since_record > 0) traj.records.push_back(stepper.diagnostics());
            break;
        }
    }
    traj.clip_events = stepper.clip_events();
    return traj;
}

Trajectory run(const ModelParams& params, const InitPreset& preset, const Grid2D& grid,
               const StepControl& ctrl) {
    return run_from(init_state(params, preset, grid), params, grid, ctrl);
}

}  // namespace kslab
