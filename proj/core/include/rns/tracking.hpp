// Trajectory-space metrics and the weak/strong tracking verification
// against an attractor estimate.
#pragma once

#include <vector>

#include "rns/attractor.hpp"

namespace rns::tracking {

/// Weighted trajectory metric
///   d(u,v) = sum_{T=1}^{t_max} 2^{-T} s_T / (1 + s_T),
///   s_T = sup_{[a, a+T]} d_bullet(u(t), v(t)),
/// truncated at t_max with remainder bound 2^{-t_max} reported separately,
/// never absorbed into the value.
struct TrajectoryMetricSpec {
    double a = 0.0;
    int t_max = 8; // truncation length >= 1
    attractor::Metric metric = attractor::Metric::weak;
};

struct TrajMetricDetail {
    double value = 0.0;
    std::vector<double> window_sup; // s_T for T = 1..t_max
    double remainder_bound = 0.0;   // 2^{-t_max}
};

double traj_metric(const dynamics::Trajectory& u, const dynamics::Trajectory& v,
                   const TrajectoryMetricSpec& spec);
TrajMetricDetail traj_metric_detail(const dynamics::Trajectory& u, const dynamics::Trajectory& v,
                                    const TrajectoryMetricSpec& spec);

/// Complete-trajectory candidates: each estimate preimage is pulled back an
/// extra t_back before the span start and integrated across
/// [-t_back, t_fwd], so the stored segment stays near the attractor fibers
/// over the whole span. Candidates drifting farther than 10 eps_stab from a
/// re-estimated fiber at any checkpoint are rejected with diagnostics.
struct CandidateSet {
    std::vector<dynamics::Trajectory> trajectories; // accepted, complete_candidate = true
    std::vector<std::size_t> source_index;          // A0 index per accepted candidate
    std::vector<std::size_t> rejected;              // A0 indices
    std::vector<double> max_fiber_deviation;        // per accepted candidate
    std::vector<double> checkpoints;
    double t_back = 0.0;
    double t_fwd = 0.0;
};

CandidateSet build_complete_candidates(const spectral::GalerkinModel& model,
                                       const dynamics::DiffusionOperator& G,
                                       const noise::NoiseProcess& proc,
                                       const attractor::AttractorEstimate& estimate,
                                       const std::vector<spectral::StateVector>& a0,
                                       double t_back, double t_fwd, double dt,
                                       double checkpoint_interval = 5.0, unsigned workers = 0);

struct TrackingReport {
    double eps_requested = 0.0;
    double eps_achieved = 0.0;
    double t_star = 0.0;
    std::ptrdiff_t matched_trajectory = -1; // present iff eps_achieved <= eps_requested
    std::vector<double> window_sup;         // per-window sups of the minimizer
    double remainder_bound = 0.0;
    bool conditional_on_diagnostics = true; // A1-A3 are heuristic checks
};

/// Minimizes the weak weighted metric over candidates on [t*, t*+t_max].
TrackingReport weak_tracking_check(const dynamics::Trajectory& u, const CandidateSet& candidates,
                                   double eps, const TrajectoryMetricSpec& spec);

/// Minimizes sup_{[t*, t*+T]} ||u(t) - v(t)|| over candidates.
TrackingReport strong_tracking_check(const dynamics::Trajectory& u, const CandidateSet& candidates,
                                     double eps, double T, double t_star);

} // namespace rns::tracking
