#pragma once

#include "fullerlab/system.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fullerlab {

/// A localized sign change of one switching function.
struct SwitchEvent {
    double t = 0.0;
    int input_index = 0;
    int direction = 0;     // sign of the switching function after the event
    double phi_slope = 0.0; // d(phi)/dt as the trajectory arrives at the event
};

enum class StopReason { horizon, zeno_floor, target_ball, error };

struct SimOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_max = 0.05;
    double h_min = 1e-14;
    double tol_event = 1e-13;   // event time localization tolerance
    double zeno_floor = 1e-10;  // per-input inter-switch interval that stops the run
    double graze_slope = 1e-12; // |slope| below which a detected crossing is grazing
    double target_ball = 0.0;   // feedback mode: stop at state norm <= this (0 disables)
    int max_events = 200000;
    long max_steps = 20000000;
    std::vector<double> sample_times; // forced output times (strictly increasing)
    bool record_steps = true;         // keep every accepted step in samples
};

/// Integrated extremal or closed-loop run. In feedback mode the adjoint
/// entries of each sample are zero-filled so the sample schema is uniform.
struct Trajectory {
    std::vector<ExtremalPoint> samples;
    std::vector<SwitchEvent> events;
    StopReason terminated_by = StopReason::horizon;
    std::string error_message;
    int grazing_count = 0;
    double final_time = 0.0;
    double max_abs_hamiltonian = 0.0; // extremal mode only
    int state_dim = 0; // augmented N
    int input_dim = 0; // m
};

/// Bang-bang state feedback u_i = -sign(s_i(x)) K(t). Supported switching
/// surfaces: per-input polynomials in the state, or the double-integrator
/// curve s = x + beta * v * |v|.
struct FeedbackLaw {
    enum class Kind { polynomial, fuller_curve };
    Kind kind = Kind::polynomial;
    std::vector<Poly> s; // per input, over the n state variables
    double beta = 0.0;

    static FeedbackLaw polynomial(std::vector<Poly> surfaces);
    static FeedbackLaw fuller_curve(double beta);
};

/// Integrates the state-adjoint system with u_i = sign(phi_i) K(t) frozen
/// between events; each sign change is bisected to within tol_event.
/// z0 is the augmented state (cost first); p0_state is the n-dimensional
/// adjoint, adjoined as (-lambda, p0_state). (lambda, p0_state) must not
/// both vanish. Stops at the horizon, at a per-input inter-switch interval
/// below zeno_floor, or on a non-finite state.
Trajectory integrate_extremal(const AugmentedSystem& aug, std::span<const double> z0,
                              std::span<const double> p0_state, double lambda, double horizon,
                              const SimOptions& opts = {});

/// Closed-loop bang-bang run of the state system under `law`, with the same
/// event machinery applied to the switching surfaces. The running cost is
/// integrated as state component 0. Also stops inside the target ball.
Trajectory simulate_feedback(const AffineSystem& sys, const FeedbackLaw& law,
                             std::span<const double> x0, double horizon,
                             const SimOptions& opts = {});

/// Per-input geometric fit of the inter-switch intervals.
struct ChatterInput {
    int input_index = 0;
    std::string status;              // "ok" or "insufficient-switches"
    int switch_count = 0;
    std::vector<double> switch_times;
    std::vector<double> intervals;
    std::optional<double> rho;       // requires >= 6 switches
    double fit_r2 = 0.0;
    std::optional<double> accumulation_time; // requires 0 < rho < 1
    bool accumulation = false;       // rho < 1 - 1e-3 and fit_r2 >= 0.99
};

struct ChatterReport {
    std::vector<ChatterInput> inputs;
    bool any_accumulation = false;
};

ChatterReport fit_chatter(const Trajectory& traj);

/// One-sided comparison of the control and its divided differences around
/// t_c, orders 0..3.
struct JunctionEstimate {
    std::optional<int> r;  // lowest discontinuous derivative order; empty = smooth up to 3
    double u_jump = 0.0;
    int input_index = -1;
    std::array<double, 4> left{};
    std::array<double, 4> right{};
};

JunctionEstimate estimate_junction(const Trajectory& traj, double t_c, const Poly& K,
                                   double tol_jump = 1e-6);

/// CSV with header t,z0..z{N-1},p0..p{N-1},u0..u{m-1}; 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// CSV with header t,input,direction,slope.
void write_events_csv(std::ostream& out, const Trajectory& traj);

} // namespace fullerlab
