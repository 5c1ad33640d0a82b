// Numerical dynamics in the polar phase space (r, theta, p_r, p_theta):
// trajectory integration by a Strang-split symplectic scheme with an exact
// free-flight kinetic substep, or by an adaptive Runge-Kutta (dopri5)
// controlled stepper; conservation monitoring of phase-space observables and
// a closed-orbit detector.
#pragma once

#include "polsep/observables.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace polsep {

using PhaseState = std::array<double, 4>;  // r, theta, p_r, p_theta

enum class IntegratorKind { SymplecticSplit, AdaptiveRK };

struct TrajectoryConfig {
    double t_end = 100.0;
    double step = 1e-3;        // symplectic step size / initial RK step
    double tolerance = 1e-10;  // adaptive RK error tolerance
    IntegratorKind integrator = IntegratorKind::SymplecticSplit;
    int record_every = 1;      // store every n-th step
};

struct TrajectoryPoint {
    double t = 0;
    PhaseState state{};
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    const TrajectoryPoint& front() const { return points.front(); }
    const TrajectoryPoint& back() const { return points.back(); }
};

namespace detail {

/// A trig-Laurent quotient flattened to double coefficients for fast
/// pointwise evaluation inside integrator loops (hbar = 0 slice).
class CompiledRat {
  public:
    CompiledRat() = default;

    template <typename C>
    explicit CompiledRat(const BasicRatExpr<C>& q) {
        num_ = flatten(q.num());
        for (const auto& f : q.den_factors())
            for (int i = 0; i < f.pow; ++i) den_.push_back(flatten(f.base));
    }

    double operator()(double r, double theta) const {
        double v = eval(num_, r, theta);
        for (const auto& d : den_) v /= eval(d, r, theta);
        return v;
    }

  private:
    struct Term {
        double c;
        int rpow;
        int harm;
        bool sin;
    };
    using Terms = std::vector<Term>;

    template <typename C>
    static Terms flatten(const BasicExpr<C>& e) {
        Terms out;
        for (const auto& [k, c] : e.terms()) {
            if (k.hbar != 0) continue;  // classical slice
            out.push_back({CoeffTraits<C>::to_double(c), k.rpow, k.harm, k.phase == Phase::Sin});
        }
        return out;
    }
    static double eval(const Terms& ts, double r, double theta) {
        double acc = 0;
        for (const auto& t : ts) {
            double v = t.c;
            if (t.rpow != 0) v *= std::pow(r, t.rpow);
            if (t.harm != 0)
                v *= t.sin ? std::sin(t.harm * theta) : std::cos(t.harm * theta);
            acc += v;
        }
        return acc;
    }

    Terms num_;
    std::vector<Terms> den_;
};

/// Precompiled force field of V(r, theta) = R(r) + S(theta)/r^2.
struct ForceField {
    CompiledRat dV_dr, dV_dtheta;

    template <typename C>
    explicit ForceField(const BasicPotentialSpec<C>& spec)
        : dV_dr(spec.potential().differentiate(Var::R)),
          dV_dtheta(spec.potential().differentiate(Var::Theta)) {}

    /// Hamilton's equations: r' = p_r, theta' = p_theta / r^2,
    /// p_r' = p_theta^2 / r^3 - dV/dr, p_theta' = -dV/dtheta.
    void rhs(const PhaseState& s, PhaseState& d) const {
        const double r = s[0], th = s[1], pr = s[2], pt = s[3];
        d[0] = pr;
        d[1] = pt / (r * r);
        d[2] = pt * pt / (r * r * r) - dV_dr(r, th);
        d[3] = -dV_dtheta(r, th);
    }

    /// Exact free-flight kinetic substep: the kinetic part
    /// (p_r^2 + p_theta^2/r^2)/2 generates straight-line motion, applied
    /// exactly by drifting in Cartesian coordinates.
    static void drift(PhaseState& s, double h) {
        const double c = std::cos(s[1]), sn = std::sin(s[1]);
        const double px = c * s[2] - sn / s[0] * s[3];
        const double py = sn * s[2] + c / s[0] * s[3];
        const double x = s[0] * c + h * px;
        const double y = s[0] * sn + h * py;
        s[0] = std::hypot(x, y);
        s[1] = std::atan2(y, x);
        const double c2 = std::cos(s[1]), sn2 = std::sin(s[1]);
        s[2] = c2 * px + sn2 * py;
        s[3] = s[0] * (c2 * py - sn2 * px);
    }
    void kick(PhaseState& s, double h) const {
        s[2] += h * (-dV_dr(s[0], s[1]));
        s[3] += h * (-dV_dtheta(s[0], s[1]));
    }
    /// Strang splitting kick-drift-kick; second order, symplectic.
    void strang_step(PhaseState& s, double h) const {
        kick(s, h / 2);
        drift(s, h);
        kick(s, h / 2);
    }
};

}  // namespace detail

/// Integrate Hamilton's equations for the potential from `state0` to
/// `config.t_end`, recording every `record_every`-th step.
template <typename C>
Trajectory integrate_trajectory(const BasicPotentialSpec<C>& spec, const PhaseState& state0,
                                const TrajectoryConfig& config = {}) {
    if (config.step <= 0 || config.t_end <= 0)
        throw std::invalid_argument("trajectory: step and t_end must be positive");
    const detail::ForceField field(spec);
    Trajectory out;
    if (config.integrator == IntegratorKind::SymplecticSplit) {
        const long nsteps = static_cast<long>(std::ceil(config.t_end / config.step));
        const double h = config.t_end / static_cast<double>(nsteps);
        PhaseState s = state0;
        out.points.push_back({0.0, s});
        for (long i = 1; i <= nsteps; ++i) {
            field.strang_step(s, h);
            if (i % config.record_every == 0 || i == nsteps)
                out.points.push_back({static_cast<double>(i) * h, s});
        }
    } else {
        namespace ode = boost::numeric::odeint;
        auto sys = [&field](const PhaseState& s, PhaseState& d, double) { field.rhs(s, d); };
        auto stepper = ode::make_controlled(config.tolerance, config.tolerance,
                                            ode::runge_kutta_dopri5<PhaseState>());
        PhaseState s = state0;
        long count = 0;
        ode::integrate_const(stepper, sys, s, 0.0, config.t_end, config.step,
                             [&](const PhaseState& st, double t) {
                                 if (count++ % config.record_every == 0 ||
                                     t >= config.t_end - config.step / 2)
                                     out.points.push_back({t, st});
                             });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conservation monitoring

struct ConservationEntry {
    std::string name;
    double initial = 0;
    double max_drift = 0;  // max |Q(t) - Q(0)| / max(1, |Q(0)|)
};

struct ConservationReport {
    std::vector<ConservationEntry> entries;
    double worst() const {
        double w = 0;
        for (const auto& e : entries) w = std::max(w, e.max_drift);
        return w;
    }
};

/// Relative drift of each named observable along the trajectory; drifts are
/// measured relative to max(1, |initial value|).
template <typename C>
ConservationReport conservation_report(
    const Trajectory& traj,
    const std::vector<std::pair<std::string, BasicPhaseObservable<C>>>& observables,
    double hbar = 0.0) {
    ConservationReport rep;
    if (traj.points.empty()) return rep;
    for (const auto& [name, obs] : observables) {
        ConservationEntry e;
        e.name = name;
        const auto& s0 = traj.front().state;
        e.initial = obs.evaluate(s0[0], s0[1], s0[2], s0[3], hbar);
        const double scale = std::max(1.0, std::abs(e.initial));
        for (const auto& p : traj.points) {
            const double v = obs.evaluate(p.state[0], p.state[1], p.state[2], p.state[3], hbar);
            e.max_drift = std::max(e.max_drift, std::abs(v - e.initial) / scale);
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Closed-orbit detection

struct ClosedOrbitResult {
    bool closed = false;
    double return_distance = std::numeric_limits<double>::infinity();
    double t_return = 0;
};

namespace detail {

/// Phase-space distance with the angle compared modulo 2 pi.
inline double phase_distance(const PhaseState& a, const PhaseState& b) {
    double dth = std::remainder(a[1] - b[1], 2 * M_PI);
    const double dr = a[0] - b[0], dpr = a[2] - b[2], dpt = a[3] - b[3];
    return std::sqrt(dr * dr + dth * dth + dpr * dpr + dpt * dpt);
}

}  // namespace detail

/// Search for a return of the trajectory to its initial phase-space point
/// after `t_min`. The coarse trajectory is sampled at the recording interval,
/// so distances at recorded points are aliased by |velocity| * dt and the
/// smallest recorded distance need not mark the best return; every
/// competitive local minimum is therefore refined with a fine re-integration
/// and a parabolic fit of the squared distance at its vertex.
template <typename C>
ClosedOrbitResult closed_orbit_check(const BasicPotentialSpec<C>& spec, const PhaseState& state0,
                                     const TrajectoryConfig& config, double t_min,
                                     double closeness_tol = 1e-6) {
    // A high-accuracy base trajectory: global integration error at the return
    // time enters the measured distance directly, so the closure scan always
    // uses the adaptive stepper at a tight tolerance.
    TrajectoryConfig base = config;
    base.integrator = IntegratorKind::AdaptiveRK;
    base.tolerance = std::min(config.tolerance, 1e-13);
    base.record_every = 1;
    const Trajectory traj = integrate_trajectory(spec, state0, base);
    const auto& start = traj.front().state;
    ClosedOrbitResult out;
    if (traj.points.size() < 3) return out;

    // Local minima of the recorded distance after t_min.
    std::vector<std::size_t> minima;
    double coarse_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < traj.points.size(); ++i) {
        if (traj.points[i].t < t_min) continue;
        const double dm = detail::phase_distance(traj.points[i - 1].state, start);
        const double d0 = detail::phase_distance(traj.points[i].state, start);
        const double dp = detail::phase_distance(traj.points[i + 1].state, start);
        if (d0 <= dm && d0 <= dp) {
            minima.push_back(i);
            coarse_best = std::min(coarse_best, d0);
        }
    }
    if (minima.empty()) return out;

    // Fine pass over every candidate within an aliasing margin of the coarse
    // best: re-integrate the bracketing interval with small symplectic steps
    // and fit the vertex of d^2(t) ~ |v|^2 (t - t*)^2 + d*^2.
    const detail::ForceField field(spec);
    const double h = std::max(base.step / 10000, 1e-8);
    for (std::size_t i : minima) {
        const double coarse = detail::phase_distance(traj.points[i].state, start);
        if (coarse > 10 * coarse_best) continue;
        PhaseState s = traj.points[i - 1].state;
        double t = traj.points[i - 1].t;
        const double t_stop = traj.points[i + 1].t;
        double dm1 = detail::phase_distance(s, start), d0 = dm1, dp1 = dm1;
        double tbest = t;
        double dbest = dm1;
        while (t < t_stop) {
            field.strang_step(s, h);
            t += h;
            dm1 = d0;
            d0 = dp1;
            dp1 = detail::phase_distance(s, start);
            if (d0 < dbest) {
                dbest = d0;
                tbest = t - h;
                const double a = dm1 * dm1, b = d0 * d0, c = dp1 * dp1;
                const double denom = a - 2 * b + c;
                if (denom > 0) {
                    const double vertex = b - (a - c) * (a - c) / (8 * denom);
                    if (vertex >= 0 && vertex < dbest * dbest) dbest = std::sqrt(vertex);
                }
            }
        }
        if (dbest < out.return_distance) {
            out.return_distance = dbest;
            out.t_return = tbest;
        }
    }
    out.closed = out.return_distance < closeness_tol;
    return out;
}

// ---------------------------------------------------------------------------
// CSV dump

/// Writes "t,r,theta,p_r,p_theta[,name...]" with one row per recorded point;
/// the named observables are evaluated along the trajectory.
template <typename C>
void write_trajectory_csv(
    std::ostream& os, const Trajectory& traj,
    const std::vector<std::pair<std::string, BasicPhaseObservable<C>>>& observables = {},
    double hbar = 0.0) {
    os << "t,r,theta,p_r,p_theta";
    for (const auto& [name, obs] : observables) os << ',' << name;
    os << '\n';
    os.precision(17);
    for (const auto& p : traj.points) {
        os << p.t << ',' << p.state[0] << ',' << p.state[1] << ',' << p.state[2] << ','
           << p.state[3];
        for (const auto& [name, obs] : observables)
            os << ',' << obs.evaluate(p.state[0], p.state[1], p.state[2], p.state[3], hbar);
        os << '\n';
    }
}

}  // namespace polsep
