#include "rns/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rns/parallel.hpp"

namespace rns::tracking {

using attractor::Metric;
using dynamics::Trajectory;
using spectral::StateVector;

namespace {

// Index of local time t in the trajectory's record grid.
std::size_t record_index(const Trajectory& traj, double t) {
    const double local = t - traj.tau;
    if (!is_grid_multiple(local, traj.dt))
        throw DomainError("trajectory metric: time " + fmt_g17(t) + " off the record grid");
    const std::int64_t i = grid_index(local, traj.dt);
    if (i < 0 || i >= static_cast<std::int64_t>(traj.n_records()))
        throw DomainError("trajectory metric: time " + fmt_g17(t) + " outside the record window");
    return static_cast<std::size_t>(i);
}

Trajectory extract_window(const Trajectory& traj, double t_lo, double t_hi) {
    const std::size_t lo = record_index(traj, t_lo);
    const std::size_t hi = record_index(traj, t_hi);
    Trajectory out;
    out.tau = traj.time_at(lo);
    out.dt = traj.dt;
    out.states.assign(traj.states.begin() + static_cast<std::ptrdiff_t>(lo),
                      traj.states.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    auto slice = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                   v.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    };
    out.mon.energy = slice(traj.mon.energy);
    out.mon.dissipation = slice(traj.mon.dissipation);
    out.mon.work_f = slice(traj.mon.work_f);
    out.mon.work_g = slice(traj.mon.work_g);
    out.mon.zeta = slice(traj.mon.zeta);
    return out;
}

} // namespace

TrajMetricDetail traj_metric_detail(const Trajectory& u, const Trajectory& v,
                                    const TrajectoryMetricSpec& spec) {
    if (spec.t_max < 1) throw ConfigError("trajectory metric: truncation length must be >= 1");
    if (u.dt != v.dt) throw DomainError("trajectory metric: record grids differ (dt)");
    if (!is_grid_multiple(u.tau - v.tau, u.dt))
        throw DomainError("trajectory metric: record grids differ (offset)");
    if (!is_grid_multiple(1.0, u.dt))
        throw DomainError("trajectory metric: unit window boundaries must lie on the record grid");

    const double t_end = spec.a + static_cast<double>(spec.t_max);
    const std::size_t u_lo = record_index(u, spec.a);
    const std::size_t v_lo = record_index(v, spec.a);
    (void)record_index(u, t_end);
    (void)record_index(v, t_end);

    TrajMetricDetail out;
    out.window_sup.resize(static_cast<std::size_t>(spec.t_max), 0.0);
    out.remainder_bound = std::ldexp(1.0, -spec.t_max);

    const std::size_t per_window = static_cast<std::size_t>(grid_index(1.0, u.dt));
    double running = 0.0;
    std::size_t k = 0;
    for (int T = 1; T <= spec.t_max; ++T) {
        const std::size_t stop = per_window * static_cast<std::size_t>(T);
        for (; k <= stop; ++k) {
            const double d = spec.metric == Metric::strong
                                 ? spectral::norm_H_diff(u.states[u_lo + k], v.states[v_lo + k])
                                 : spectral::weak_metric(u.states[u_lo + k], v.states[v_lo + k]);
            running = std::max(running, d);
        }
        out.window_sup[static_cast<std::size_t>(T - 1)] = running;
        out.value += std::ldexp(running / (1.0 + running), -T);
    }
    return out;
}

double traj_metric(const Trajectory& u, const Trajectory& v, const TrajectoryMetricSpec& spec) {
    return traj_metric_detail(u, v, spec).value;
}

CandidateSet build_complete_candidates(const spectral::GalerkinModel& model,
                                       const dynamics::DiffusionOperator& G,
                                       const noise::NoiseProcess& proc,
                                       const attractor::AttractorEstimate& estimate,
                                       const std::vector<StateVector>& a0, double t_back,
                                       double t_fwd, double dt, double checkpoint_interval,
                                       unsigned workers) {
    if (!estimate.stabilized) throw ConfigError("candidates: estimate is not stabilized");
    if (!(t_back > 0.0) || !(t_fwd >= 0.0)) throw ConfigError("candidates: bad span");
    if (!(checkpoint_interval > 0.0))
        throw ConfigError("candidates: checkpoint interval must be positive");
    const double horizon = estimate.horizons_used.back();

    CandidateSet set;
    set.t_back = t_back;
    set.t_fwd = t_fwd;
    for (double c = -t_back; c <= t_fwd + grid_tol; c += checkpoint_interval)
        set.checkpoints.push_back(c);

    // Shared fiber estimates at the checkpoints (one pullback ensemble per
    // checkpoint, reused by every candidate).
    std::vector<std::vector<StateVector>> fibers(set.checkpoints.size());
    for (std::size_t c = 0; c < set.checkpoints.size(); ++c)
        fibers[c] = attractor::pullback_ensemble(model, G, proc, a0, horizon, dt,
                                                 set.checkpoints[c], workers)
                        .points;

    const std::vector<std::size_t>& sources = estimate.cloud.provenance;
    std::vector<Trajectory> raw(sources.size());
    std::vector<char> died(sources.size(), 0);
    parallel_for(sources.size(), workers, [&](std::size_t i) {
        try {
            Trajectory full = dynamics::integrate(model, G, a0[sources[i]],
                                                  -t_back - horizon, t_fwd, dt, proc);
            raw[i] = extract_window(full, -t_back, t_fwd);
            raw[i].complete_candidate = true;
        } catch (const DivergenceError&) {
            died[i] = 1;
        }
    });

    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (died[i]) {
            set.rejected.push_back(sources[i]);
            continue;
        }
        double worst = 0.0;
        for (std::size_t c = 0; c < set.checkpoints.size(); ++c) {
            const std::size_t k = record_index(raw[i], set.checkpoints[c]);
            worst = std::max(worst, attractor::point_set_distance(raw[i].states[k], fibers[c],
                                                                  estimate.metric));
        }
        if (worst > 10.0 * estimate.eps_stab) {
            set.rejected.push_back(sources[i]);
            continue;
        }
        set.max_fiber_deviation.push_back(worst);
        set.source_index.push_back(sources[i]);
        set.trajectories.push_back(std::move(raw[i]));
    }
    return set;
}

TrackingReport weak_tracking_check(const Trajectory& u, const CandidateSet& candidates, double eps,
                                   const TrajectoryMetricSpec& spec) {
    if (candidates.trajectories.empty()) throw ConfigError("tracking: empty candidate list");
    TrackingReport rep;
    rep.eps_requested = eps;
    rep.t_star = spec.a;
    rep.eps_achieved = std::numeric_limits<double>::infinity();
    TrajectoryMetricSpec weak_spec = spec;
    weak_spec.metric = Metric::weak;
    for (std::size_t i = 0; i < candidates.trajectories.size(); ++i) {
        const TrajMetricDetail d = traj_metric_detail(u, candidates.trajectories[i], weak_spec);
        if (d.value < rep.eps_achieved) {
            rep.eps_achieved = d.value;
            rep.window_sup = d.window_sup;
            rep.remainder_bound = d.remainder_bound;
            if (d.value <= eps) rep.matched_trajectory = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (rep.eps_achieved > eps) rep.matched_trajectory = -1;
    return rep;
}

TrackingReport strong_tracking_check(const Trajectory& u, const CandidateSet& candidates,
                                     double eps, double T, double t_star) {
    if (candidates.trajectories.empty()) throw ConfigError("tracking: empty candidate list");
    TrackingReport rep;
    rep.eps_requested = eps;
    rep.t_star = t_star;
    rep.eps_achieved = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.trajectories.size(); ++i) {
        const Trajectory& v = candidates.trajectories[i];
        const std::size_t u_lo = record_index(u, t_star);
        const std::size_t u_hi = record_index(u, t_star + T);
        const std::size_t v_lo = record_index(v, t_star);
        double sup = 0.0;
        for (std::size_t k = 0; k <= u_hi - u_lo; ++k)
            sup = std::max(sup,
                           spectral::norm_H_diff(u.states[u_lo + k], v.states[v_lo + k]));
        if (sup < rep.eps_achieved) {
            rep.eps_achieved = sup;
            rep.window_sup = {sup};
            if (sup <= eps) rep.matched_trajectory = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (rep.eps_achieved > eps) rep.matched_trajectory = -1;
    return rep;
}

} // namespace rns::tracking
