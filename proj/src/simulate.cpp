#include "fullerlab/simulate.hpp"

#include "fullerlab/liecone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

namespace fullerlab {

FeedbackLaw FeedbackLaw::polynomial(std::vector<Poly> surfaces) {
    FeedbackLaw law;
    law.kind = Kind::polynomial;
    law.s = std::move(surfaces);
    return law;
}

FeedbackLaw FeedbackLaw::fuller_curve(double beta) {
    FeedbackLaw law;
    law.kind = Kind::fuller_curve;
    law.beta = beta;
    return law;
}

namespace {

using Rhs = std::function<void(double, const double*, double*)>;

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const Rhs& rhs;
    int dim;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp;

    explicit Stepper(const Rhs& f, int d)
        : rhs(f), dim(d), k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), tmp(d) {}

    // One trial step; fills y5 and returns the weighted RMS error norm.
    double step(double t, const std::vector<double>& y, double h, std::vector<double>& y5,
                double atol, double rtol) {
        rhs(t, y.data(), k1.data());
        for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, tmp.data(), k2.data());
        for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, tmp.data(), k3.data());
        for (int i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, tmp.data(), k4.data());
        for (int i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, tmp.data(), k5.data());
        for (int i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, tmp.data(), k6.data());
        y5.resize(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            y5[static_cast<size_t>(i)] =
                y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, y5.data(), k7.data());
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
            double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[static_cast<size_t>(i)]));
            double r = err / scale;
            acc += r * r;
        }
        return std::sqrt(acc / dim);
    }
};

struct RunContext {
    int dim = 0; // ODE dimension
    int m = 0;   // switching functions
    Rhs rhs;     // uses the frozen sign vector through u(t) = dir * sigma_i * K(t)
    std::function<void(double, const double*, double*)> events;
    std::function<double(double, const double*, int)> slope; // with the current u
    std::function<std::vector<double>(double)> control;      // current control vector
    std::vector<int> sigma;
};

// Error-controlled advance without event handling; used by the bisection.
bool advance(Stepper& st, double t_from, std::vector<double>& y, double t_to,
             const SimOptions& opts) {
    double t = t_from;
    double h = std::max(t_to - t_from, opts.h_min);
    std::vector<double> ynew;
    int guard = 0;
    while (t < t_to && ++guard < 100000) {
        h = std::min(h, t_to - t);
        if (t + h <= t) break; // time resolution exhausted
        double err = st.step(t, y, h, ynew, opts.abs_tol, opts.rel_tol);
        if (err <= 1.0 || h <= opts.h_min * 1.01) {
            t += h;
            y = ynew;
            double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = std::max(opts.h_min, h * std::clamp(grow, 0.2, 5.0));
        } else {
            h = std::max(opts.h_min, h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9));
        }
        if (!std::isfinite(y[0])) return false;
    }
    return guard < 100000;
}

bool all_finite(const std::vector<double>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

struct EventBookkeeping {
    std::vector<double> last_event_per_input; // NaN when none yet
    double last_event_global = std::numeric_limits<double>::quiet_NaN();
    double d_latest = std::numeric_limits<double>::quiet_NaN();
    double d_prev = std::numeric_limits<double>::quiet_NaN();

    explicit EventBookkeeping(int m)
        : last_event_per_input(static_cast<size_t>(m), std::numeric_limits<double>::quiet_NaN()) {}

    void note(double t) {
        if (!std::isnan(last_event_global)) {
            d_prev = d_latest;
            d_latest = t - last_event_global;
        }
        last_event_global = t;
    }

    // Step cap so that geometrically shrinking inter-event gaps stay resolved.
    double step_cap(double tol_event) const {
        if (std::isnan(d_latest)) return std::numeric_limits<double>::infinity();
        double ratio = 1.0;
        if (!std::isnan(d_prev) && d_prev > 0.0) ratio = std::clamp(d_latest / d_prev, 0.05, 1.0);
        return std::max(0.25 * d_latest * ratio, 4.0 * tol_event);
    }
};

Trajectory run_with_events(RunContext& ctx, std::vector<double> y, double t0, double horizon,
                           const SimOptions& opts, const AugmentedSystem* ham_aug, int sample_N,
                           bool feedback_mode) {
    Trajectory traj;
    traj.state_dim = sample_N;
    traj.input_dim = ctx.m;

    Stepper stepper(ctx.rhs, ctx.dim);
    EventBookkeeping book(ctx.m);

    auto record_sample = [&](double t) {
        ExtremalPoint pt;
        pt.t = t;
        pt.z.assign(y.begin(), y.begin() + sample_N);
        if (feedback_mode) {
            pt.p.assign(static_cast<size_t>(sample_N), 0.0);
        } else {
            pt.p.assign(y.begin() + sample_N, y.begin() + 2 * sample_N);
        }
        pt.u = ctx.control(t);
        if (ham_aug) {
            double h = hamiltonian_eval(*ham_aug, pt.z, pt.p, pt.u);
            traj.max_abs_hamiltonian = std::max(traj.max_abs_hamiltonian, std::abs(h));
        }
        traj.samples.push_back(std::move(pt));
    };

    auto state_norm = [&](const std::vector<double>& yy) {
        double acc = 0.0;
        for (int i = 1; i < sample_N; ++i) acc += yy[static_cast<size_t>(i)] * yy[static_cast<size_t>(i)];
        return std::sqrt(acc);
    };

    std::vector<double> ev(static_cast<size_t>(ctx.m));
    ctx.events(t0, y.data(), ev.data());
    for (int i = 0; i < ctx.m; ++i) {
        double v = ev[static_cast<size_t>(i)];
        int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) {
            double sl = ctx.slope(t0, y.data(), i);
            s = sl > 0.0 ? 1 : (sl < 0.0 ? -1 : 1);
        }
        ctx.sigma[static_cast<size_t>(i)] = s;
    }

    double t = t0;
    record_sample(t);

    size_t next_sample = 0;
    while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] <= t0)
        ++next_sample;

    double h = std::min(opts.h_init, opts.h_max);
    std::vector<double> ynew, evnew(static_cast<size_t>(ctx.m));
    long steps = 0;

    while (t < horizon - 1e-15 * std::max(1.0, std::abs(horizon))) {
        if (++steps > opts.max_steps) {
            traj.terminated_by = StopReason::error;
            traj.error_message = "step budget exhausted at t=" + std::to_string(t);
            break;
        }
        h = std::clamp(h, opts.h_min, opts.h_max);
        h = std::min(h, book.step_cap(opts.tol_event));
        bool forced_boundary = false;
        double boundary = horizon;
        if (next_sample < opts.sample_times.size())
            boundary = std::min(boundary, opts.sample_times[next_sample]);
        if (t + h >= boundary) {
            h = boundary - t;
            forced_boundary = true;
            if (h <= 0.0 || t + h <= t) {
                // Boundary reached within floating resolution.
                bool was_sample = next_sample < opts.sample_times.size() &&
                                  boundary == opts.sample_times[next_sample];
                t = boundary;
                if (was_sample) {
                    ++next_sample;
                    if (traj.samples.empty() || traj.samples.back().t != t) record_sample(t);
                }
                continue;
            }
        }

        double err = stepper.step(t, y, h, ynew, opts.abs_tol, opts.rel_tol);
        if (err > 1.0 && h > opts.h_min * 1.01 && !(forced_boundary && h <= 4.0 * opts.h_min)) {
            h = std::max(opts.h_min, h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9));
            continue;
        }

        if (!all_finite(ynew)) {
            traj.terminated_by = StopReason::error;
            traj.error_message = "non-finite state at t=" + std::to_string(t + h);
            break;
        }

        ctx.events(t + h, ynew.data(), evnew.data());
        std::vector<int> crossed;
        for (int i = 0; i < ctx.m; ++i)
            if (evnew[static_cast<size_t>(i)] * ctx.sigma[static_cast<size_t>(i)] < 0.0)
                crossed.push_back(i);

        if (!crossed.empty()) {
            // Bisect the step to the earliest instant past a crossing.
            double lo = t, hi = t + h;
            std::vector<double> ylo = y;
            std::vector<double> yhi = ynew;
            std::vector<double> evm(static_cast<size_t>(ctx.m));
            while (hi - lo > opts.tol_event) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break; // double resolution exhausted
                std::vector<double> ym = ylo;
                if (!advance(stepper, lo, ym, mid, opts)) break;
                ctx.events(mid, ym.data(), evm.data());
                bool any = false;
                for (int i = 0; i < ctx.m; ++i)
                    if (evm[static_cast<size_t>(i)] * ctx.sigma[static_cast<size_t>(i)] < 0.0) any = true;
                if (any) {
                    hi = mid;
                    yhi = std::move(ym);
                } else {
                    lo = mid;
                    ylo = std::move(ym);
                }
            }
            double te = hi;
            std::vector<double>& ye = yhi;
            ctx.events(te, ye.data(), evm.data());

            bool any_real = false;
            std::vector<int> real_inputs;
            for (int i = 0; i < ctx.m; ++i) {
                if (evm[static_cast<size_t>(i)] * ctx.sigma[static_cast<size_t>(i)] >= 0.0) continue;
                double sl = ctx.slope(te, ye.data(), i);
                if (std::abs(sl) < opts.graze_slope) {
                    ++traj.grazing_count;
                    continue;
                }
                any_real = true;
                real_inputs.push_back(i);
                SwitchEvent evrec;
                evrec.t = te;
                evrec.input_index = i;
                evrec.direction = -ctx.sigma[static_cast<size_t>(i)];
                evrec.phi_slope = sl;
                traj.events.push_back(evrec);
            }

            if (!any_real) {
                // Grazing contact: carry on from the step end, signs unchanged.
                t = t + h;
                y = ynew;
                if (opts.record_steps) record_sample(t);
                double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h = h * std::clamp(grow, 0.2, 5.0);
                continue;
            }

            bool zeno = false;
            for (int i : real_inputs) {
                double prev = book.last_event_per_input[static_cast<size_t>(i)];
                if (!std::isnan(prev) && te - prev < opts.zeno_floor) zeno = true;
                book.last_event_per_input[static_cast<size_t>(i)] = te;
                ctx.sigma[static_cast<size_t>(i)] = -ctx.sigma[static_cast<size_t>(i)];
            }
            book.note(te);

            t = te;
            y = ye;
            record_sample(t);

            if (zeno) {
                traj.terminated_by = StopReason::zeno_floor;
                break;
            }
            if (static_cast<int>(traj.events.size()) >= opts.max_events) {
                traj.terminated_by = StopReason::error;
                traj.error_message = "event budget exhausted at t=" + std::to_string(t);
                break;
            }
            if (feedback_mode && opts.target_ball > 0.0 && state_norm(y) <= opts.target_ball) {
                traj.terminated_by = StopReason::target_ball;
                break;
            }
            h = std::min(h, book.step_cap(opts.tol_event));
            continue;
        }

        // Plain accepted step.
        t = t + h;
        y = ynew;
        bool at_forced_sample =
            next_sample < opts.sample_times.size() && t >= opts.sample_times[next_sample];
        if (at_forced_sample) ++next_sample;
        if (opts.record_steps || at_forced_sample) record_sample(t);
        if (feedback_mode && opts.target_ball > 0.0 && state_norm(y) <= opts.target_ball) {
            traj.terminated_by = StopReason::target_ball;
            break;
        }
        double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = h * std::clamp(grow, 0.2, 5.0);
    }

    if (!opts.record_steps &&
        (traj.samples.empty() || traj.samples.back().t != t))
        record_sample(t);
    traj.final_time = t;
    return traj;
}

} // namespace

Trajectory integrate_extremal(const AugmentedSystem& aug, std::span<const double> z0,
                              std::span<const double> p0_state, double lambda, double horizon,
                              const SimOptions& opts) {
    if (static_cast<int>(z0.size()) != aug.N)
        throw std::invalid_argument("integrate_extremal: z0 must have augmented dimension");
    if (static_cast<int>(p0_state.size()) != aug.N - 1)
        throw std::invalid_argument("integrate_extremal: p0 must have state dimension");
    double pnorm = std::abs(lambda);
    for (double v : p0_state) pnorm += std::abs(v);
    if (pnorm == 0.0)
        throw std::invalid_argument("integrate_extremal: (lambda, p0) must not vanish");

    // K must be usable on the horizon.
    for (int i = 0; i <= 64; ++i) {
        double tt = horizon * static_cast<double>(i) / 64.0;
        double kv = aug.K.eval(std::span<const double>(&tt, 1));
        if (!(kv > 0.0))
            throw std::domain_error("integrate_extremal: K(t) not strictly positive at t=" +
                                    std::to_string(tt));
    }

    const int N = aug.N;
    const int m = aug.m;

    // Brackets for exact switching-function slopes.
    std::vector<PolyVec> adf_g;
    std::vector<std::vector<PolyVec>> gg;
    adf_g.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) adf_g.push_back(lie_bracket(aug.fbar, aug.gbar[static_cast<size_t>(i)]));
    gg.resize(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            gg[static_cast<size_t>(j)].push_back(
                lie_bracket(aug.gbar[static_cast<size_t>(j)], aug.gbar[static_cast<size_t>(i)]));

    RunContext ctx;
    ctx.dim = 2 * N;
    ctx.m = m;
    ctx.sigma.assign(static_cast<size_t>(m), 1);

    auto control_at = [&aug, m, &ctx](double t) {
        double kv = aug.K.eval(std::span<const double>(&t, 1));
        std::vector<double> u(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = ctx.sigma[static_cast<size_t>(i)] * kv;
        return u;
    };
    ctx.control = control_at;

    ctx.rhs = [&aug, N, m, control_at](double t, const double* y, double* dy) {
        std::span<const double> z(y, static_cast<size_t>(N));
        std::span<const double> p(y + N, static_cast<size_t>(N));
        std::vector<double> u = control_at(t);
        extremal_rhs(aug, z, p, u, std::span<double>(dy, static_cast<size_t>(N)),
                     std::span<double>(dy + N, static_cast<size_t>(N)));
    };

    ctx.events = [&aug, N, m](double, const double* y, double* out) {
        std::span<const double> z(y, static_cast<size_t>(N));
        std::span<const double> p(y + N, static_cast<size_t>(N));
        std::vector<double> phi = switching_vector(aug, z, p);
        for (int i = 0; i < m; ++i) out[i] = phi[static_cast<size_t>(i)];
    };

    ctx.slope = [&aug, &adf_g, &gg, N, m, control_at](double t, const double* y, int i) {
        std::span<const double> z(y, static_cast<size_t>(N));
        const double* p = y + N;
        std::vector<double> u = control_at(t);
        std::vector<double> field = adf_g[static_cast<size_t>(i)].eval(z);
        for (int j = 0; j < m; ++j) {
            const PolyVec& br = gg[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (br.is_zero()) continue;
            std::vector<double> bv = br.eval(z);
            for (int k = 0; k < N; ++k) field[static_cast<size_t>(k)] += u[static_cast<size_t>(j)] * bv[static_cast<size_t>(k)];
        }
        double acc = 0.0;
        for (int k = 0; k < N; ++k) acc += p[k] * field[static_cast<size_t>(k)];
        return acc;
    };

    std::vector<double> y(static_cast<size_t>(2 * N));
    for (int i = 0; i < N; ++i) y[static_cast<size_t>(i)] = z0[static_cast<size_t>(i)];
    y[static_cast<size_t>(N)] = -lambda;
    for (int i = 0; i < N - 1; ++i) y[static_cast<size_t>(N + 1 + i)] = p0_state[static_cast<size_t>(i)];

    return run_with_events(ctx, std::move(y), 0.0, horizon, opts, &aug, N, false);
}

Trajectory simulate_feedback(const AffineSystem& sys, const FeedbackLaw& law,
                             std::span<const double> x0, double horizon, const SimOptions& opts) {
    sys.validate();
    if (static_cast<int>(x0.size()) != sys.n)
        throw std::invalid_argument("simulate_feedback: x0 must have state dimension n");
    if (law.kind == FeedbackLaw::Kind::polynomial) {
        if (static_cast<int>(law.s.size()) != sys.m)
            throw std::invalid_argument("simulate_feedback: law needs one surface per input");
        for (const auto& si : law.s)
            if (si.nvars() != sys.n)
                throw std::invalid_argument("simulate_feedback: surface has wrong variable count");
    } else {
        if (sys.n != 2 || sys.m != 1)
            throw std::invalid_argument(
                "simulate_feedback: the fuller_curve law applies to 2-state single-input systems");
    }
    sys.check_bound_positive(0.0, horizon);

    AugmentedSystem aug = augment(sys);
    const int N = aug.N;
    const int m = aug.m;

    // Gradients of polynomial surfaces, for slopes.
    std::vector<std::vector<Poly>> grads;
    if (law.kind == FeedbackLaw::Kind::polynomial) {
        grads.resize(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < sys.n; ++j)
                grads[static_cast<size_t>(i)].push_back(law.s[static_cast<size_t>(i)].partial(j));
    }

    RunContext ctx;
    ctx.dim = N;
    ctx.m = m;
    ctx.sigma.assign(static_cast<size_t>(m), 1);

    auto control_at = [&aug, m, &ctx](double t) {
        double kv = aug.K.eval(std::span<const double>(&t, 1));
        std::vector<double> u(static_cast<size_t>(m));
        // u = -sign(s) K on each input.
        for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = -ctx.sigma[static_cast<size_t>(i)] * kv;
        return u;
    };
    ctx.control = control_at;

    ctx.rhs = [&aug, N, m, control_at](double t, const double* y, double* dy) {
        std::span<const double> z(y, static_cast<size_t>(N));
        std::vector<double> u = control_at(t);
        for (int j = 0; j < N; ++j) {
            double v = aug.fbar[j].eval(z);
            for (int i = 0; i < m; ++i) v += aug.gbar[static_cast<size_t>(i)][j].eval(z) * u[static_cast<size_t>(i)];
            dy[j] = v;
        }
    };

    auto surface_values = [&law, N, m](const double* y, double* out) {
        if (law.kind == FeedbackLaw::Kind::polynomial) {
            std::span<const double> x(y + 1, static_cast<size_t>(N - 1));
            for (int i = 0; i < m; ++i) out[i] = law.s[static_cast<size_t>(i)].eval(x);
        } else {
            double x = y[1], v = y[2];
            out[0] = x + law.beta * v * std::abs(v);
        }
    };
    ctx.events = [surface_values](double, const double* y, double* out) { surface_values(y, out); };

    ctx.slope = [&law, &grads, &ctx, N, m](double t, const double* y, int i) {
        std::vector<double> dy(static_cast<size_t>(N));
        ctx.rhs(t, y, dy.data());
        if (law.kind == FeedbackLaw::Kind::polynomial) {
            std::span<const double> x(y + 1, static_cast<size_t>(N - 1));
            double acc = 0.0;
            for (int j = 0; j < N - 1; ++j)
                acc += grads[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(x) * dy[static_cast<size_t>(j + 1)];
            return acc;
        }
        double v = y[2];
        return dy[1] + 2.0 * law.beta * std::abs(v) * dy[2];
    };

    std::vector<double> y(static_cast<size_t>(N), 0.0);
    for (int i = 0; i < sys.n; ++i) y[static_cast<size_t>(i + 1)] = x0[static_cast<size_t>(i)];

    return run_with_events(ctx, std::move(y), 0.0, horizon, opts, nullptr, N, true);
}

ChatterReport fit_chatter(const Trajectory& traj) {
    ChatterReport rep;
    for (int i = 0; i < traj.input_dim; ++i) {
        ChatterInput ci;
        ci.input_index = i;
        for (const auto& e : traj.events)
            if (e.input_index == i) ci.switch_times.push_back(e.t);
        ci.switch_count = static_cast<int>(ci.switch_times.size());
        for (size_t j = 0; j + 1 < ci.switch_times.size(); ++j)
            ci.intervals.push_back(ci.switch_times[j + 1] - ci.switch_times[j]);
        if (ci.switch_count < 6) {
            ci.status = "insufficient-switches";
            rep.inputs.push_back(std::move(ci));
            continue;
        }
        ci.status = "ok";

        size_t s = ci.intervals.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t j = 0; j < s; ++j) {
            double xj = static_cast<double>(j);
            double yj = std::log(ci.intervals[j]);
            sx += xj;
            sy += yj;
            sxx += xj * xj;
            sxy += xj * yj;
        }
        double denom = s * sxx - sx * sx;
        double slope = denom != 0.0 ? (s * sxy - sx * sy) / denom : 0.0;
        double intercept = (sy - slope * sx) / s;
        double ss_res = 0, ss_tot = 0;
        double mean = sy / s;
        for (size_t j = 0; j < s; ++j) {
            double yj = std::log(ci.intervals[j]);
            double fit = intercept + slope * static_cast<double>(j);
            ss_res += (yj - fit) * (yj - fit);
            ss_tot += (yj - mean) * (yj - mean);
        }
        ci.rho = std::exp(slope);
        ci.fit_r2 = ss_tot <= 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
        if (*ci.rho > 0.0 && *ci.rho < 1.0)
            ci.accumulation_time = ci.switch_times.back() + ci.intervals.back() * *ci.rho / (1.0 - *ci.rho);
        ci.accumulation = (*ci.rho < 1.0 - 1e-3) && ci.fit_r2 >= 0.99;
        rep.any_accumulation = rep.any_accumulation || ci.accumulation;
        rep.inputs.push_back(std::move(ci));
    }
    return rep;
}

namespace {

// One-sided limits of u and its derivatives at t_c: the cubic through the
// four nearest samples, expanded around t_c. Returns (value, u', u'', u''').
std::array<double, 4> one_sided_derivatives(const std::vector<double>& ts,
                                            const std::vector<double>& us, double t_c) {
    constexpr int n = 4;
    // Solve the Vandermonde system in the shifted variable s = t - t_c.
    double a[n][n + 1];
    for (int i = 0; i < n; ++i) {
        double s = ts[static_cast<size_t>(i)] - t_c;
        double pw = 1.0;
        for (int j = 0; j < n; ++j) {
            a[i][j] = pw;
            pw *= s;
        }
        a[i][n] = us[static_cast<size_t>(i)];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        for (int c = 0; c <= n; ++c) std::swap(a[piv][c], a[col][c]);
        for (int r = 0; r < n; ++r) {
            if (r == col || a[col][col] == 0.0) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::array<double, 4> coeff{};
    for (int i = 0; i < n; ++i)
        coeff[static_cast<size_t>(i)] = a[i][i] != 0.0 ? a[i][n] / a[i][i] : 0.0;
    return {coeff[0], coeff[1], 2.0 * coeff[2], 6.0 * coeff[3]};
}

} // namespace

JunctionEstimate estimate_junction(const Trajectory& traj, double t_c, const Poly& K,
                                   double tol_jump) {
    if (traj.samples.size() < 8)
        throw std::invalid_argument("estimate_junction: trajectory too short");
    if (t_c <= traj.samples.front().t || t_c >= traj.samples.back().t)
        throw std::invalid_argument("estimate_junction: t_c at trajectory boundary");

    // Jumps are compared against the control scale at the junction.
    double k_at = K.eval(std::span<const double>(&t_c, 1));
    double tol = tol_jump * std::max(1.0, std::abs(k_at));
    const int m = traj.input_dim;
    JunctionEstimate est;
    for (int order = 0; order < 4 && !est.r; ++order) {
        for (int i = 0; i < m; ++i) {
            std::vector<double> tl, ul, tr, ur;
            for (const auto& s : traj.samples) {
                if (s.t < t_c) {
                    tl.push_back(s.t);
                    ul.push_back(s.u[static_cast<size_t>(i)]);
                } else if (s.t > t_c) {
                    tr.push_back(s.t);
                    ur.push_back(s.u[static_cast<size_t>(i)]);
                }
            }
            if (tl.size() < 4 || tr.size() < 4)
                throw std::invalid_argument("estimate_junction: not enough samples on both sides");
            // The four nearest samples on each side.
            std::vector<double> tl4(tl.end() - 4, tl.end()), ul4(ul.end() - 4, ul.end());
            std::vector<double> tr4(tr.begin(), tr.begin() + 4), ur4(ur.begin(), ur.begin() + 4);

            auto left = one_sided_derivatives(tl4, ul4, t_c);
            auto right = one_sided_derivatives(tr4, ur4, t_c);
            double jump = right[static_cast<size_t>(order)] - left[static_cast<size_t>(order)];
            if (std::abs(jump) > tol) {
                est.r = order;
                est.u_jump = jump;
                est.input_index = i;
                est.left = left;
                est.right = right;
                break;
            }
        }
    }
    return est;
}

namespace {

void write_float(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t";
    for (int i = 0; i < traj.state_dim; ++i) out << ",z" << i;
    for (int i = 0; i < traj.state_dim; ++i) out << ",p" << i;
    for (int i = 0; i < traj.input_dim; ++i) out << ",u" << i;
    out << "\n";
    for (const auto& s : traj.samples) {
        write_float(out, s.t);
        for (double v : s.z) {
            out << ",";
            write_float(out, v);
        }
        for (double v : s.p) {
            out << ",";
            write_float(out, v);
        }
        for (double v : s.u) {
            out << ",";
            write_float(out, v);
        }
        out << "\n";
    }
}

void write_events_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,input,direction,slope\n";
    for (const auto& e : traj.events) {
        write_float(out, e.t);
        out << "," << e.input_index << "," << e.direction << ",";
        write_float(out, e.phi_slope);
        out << "\n";
    }
}

} // namespace fullerlab
