#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kslab/functionals.hpp"
#include "kslab/grid.hpp"

namespace kslab {

enum class Termination { TimeReached, DtUnderflow, NanAbort };

struct StepControl {
    double dt_init = 1e-3;
    double dt_min = 1e-7;
    double dt_max = 5e-3;
    double cfl_safety = 0.4;   // dt <= cfl_safety * h / max(|vx|+|vy|)
    double t_end = 1.0;
    int record_every = 1;
    double equi_k1 = 1.0;
    double equi_k2 = 10.0;
    bool drift_off = false;        // test hook: pure diffusion
    bool track_cumulative = true;  // accumulate dissipation integrals every step

    void validate() const;
};

struct InitPreset {
    enum class Kind { Gaussian, TwoBumps, HFamily, SpikyL1 };
    Kind kind = Kind::Gaussian;
    double mass = 4.0 * M_PI;
    double sigma = 1.0;       // Gaussian / TwoBumps width
    double center_x = 0.0, center_y = 0.0;
    double separation = 4.0;  // TwoBumps center distance
    double lambda = 1.0;      // HFamily dilation
    double width = 0.02;      // SpikyL1 concentration scale

    static InitPreset gaussian(double mass, double sigma, double cx = 0.0, double cy = 0.0);
    static InitPreset two_bumps(double mass, double sigma, double separation);
    static InitPreset h_family(double mass, double lambda);
    static InitPreset spiky_l1(double mass, double width = 0.02);
};

/// (n, c, t, step); for the corrected variant the c slot stores the deviation
/// u = c - (M/8pi) log H. mass0 is the discrete quadrature mass of n0 that
/// conservation is measured against.
struct SimState {
    ScalarField n;
    ScalarField c;
    double t = 0.0;
    long step = 0;
    double mass0 = 0.0;
};

struct Trajectory {
    std::vector<DiagnosticsRecord> records;
    Termination termination = Termination::TimeReached;
    double mass0 = 0.0;
    long clip_events = 0;  // diffusion-solve outputs below the roundoff floor
};

const char* to_string(Termination t);

/// Builds the initial state: the preset density (optionally mollified by a
/// unit-mass bump of width params.sigma_mollify) and the matching chemical
/// field per variant.
SimState init_state(const ModelParams& params, const InitPreset& preset, const Grid2D& grid);

/// One-step access for scheme tests; run() drives it to t_end.
class Stepper {
public:
    Stepper(const Grid2D& grid, const ModelParams& params, const StepControl& ctrl);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    void set_state(SimState state);
    const SimState& state() const;

    struct Outcome {
        bool advanced = false;
        double dt = 0.0;
        std::optional<Termination> stop;
    };
    /// One IMEX step: explicit MUSCL upwind advection, implicit five-point
    /// diffusion of n, implicit linear c update (elliptic response for the
    /// parabolic-elliptic variant).
    Outcome step();

    DiagnosticsRecord diagnostics() const;
    long clip_events() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Trajectory run(const ModelParams& params, const InitPreset& preset, const Grid2D& grid,
               const StepControl& ctrl);
Trajectory run_from(SimState state, const ModelParams& params, const Grid2D& grid,
                    const StepControl& ctrl);

}  // namespace kslab
