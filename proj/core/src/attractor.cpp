#include "rns/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rns/parallel.hpp"

namespace rns::attractor {

using dynamics::DiffusionOperator;
using dynamics::Trajectory;
using spectral::GalerkinModel;
using spectral::StateVector;

namespace {

std::vector<double> first_primes(std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    for (int cand = 2; out.size() < count; ++cand) {
        bool prime = true;
        for (int d = 2; d * d <= cand; ++d)
            if (cand % d == 0) {
                prime = false;
                break;
            }
        if (prime) out.push_back(static_cast<double>(cand));
    }
    return out;
}

double metric_dist(const StateVector& a, const StateVector& b, Metric m) {
    return m == Metric::strong ? spectral::norm_H_diff(a, b) : spectral::weak_metric(a, b);
}

} // namespace

std::vector<StateVector> low_discrepancy_sphere(std::size_t count, std::size_t n_modes,
                                                double radius) {
    if (n_modes == 0) throw ConfigError("sphere sampling: empty mode set");
    const std::size_t dim = n_modes + (n_modes % 2); // Box-Muller consumes pairs
    const std::vector<double> primes = first_primes(dim);
    std::vector<double> alpha(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double r = std::sqrt(primes[i]);
        alpha[i] = r - std::floor(r);
    }

    std::vector<StateVector> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        StateVector z(n_modes);
        for (std::size_t i = 0; i + 1 < dim; i += 2) {
            double u1 = (static_cast<double>(n) + 1.0) * alpha[i];
            double u2 = (static_cast<double>(n) + 1.0) * alpha[i + 1];
            u1 -= std::floor(u1);
            u2 -= std::floor(u2);
            u1 = std::max(u1, 1e-16);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double g1 = r * std::cos(2.0 * M_PI * u2);
            const double g2 = r * std::sin(2.0 * M_PI * u2);
            z[i] = g1;
            if (i + 1 < n_modes) z[i + 1] = g2;
        }
        const double nz = spectral::norm_H(z);
        for (auto& x : z.c) x *= radius / nz;
        out.push_back(std::move(z));
    }
    return out;
}

PointCloud pullback_ensemble(const GalerkinModel& model, const DiffusionOperator& G,
                             const noise::NoiseProcess& proc, const std::vector<StateVector>& a0,
                             double horizon, double dt, double anchor, unsigned workers) {
    if (horizon < 0.0) throw ConfigError("pullback: horizon must be >= 0");
    PointCloud cloud;
    cloud.horizon = horizon;
    cloud.omega_seed = proc.path().seed();
    cloud.omega_shift = proc.path().shift() + anchor - horizon;

    if (horizon == 0.0) {
        cloud.points = a0; // R(0, omega) is the identity
        cloud.provenance.resize(a0.size());
        for (std::size_t i = 0; i < a0.size(); ++i) cloud.provenance[i] = i;
        return cloud;
    }

    std::vector<StateVector> terminal(a0.size());
    std::vector<char> died(a0.size(), 0);
    parallel_for(a0.size(), workers, [&](std::size_t i) {
        try {
            Trajectory t = dynamics::integrate(model, G, a0[i], anchor - horizon, anchor, dt, proc);
            terminal[i] = std::move(t.states.back());
        } catch (const DivergenceError&) {
            died[i] = 1;
        }
    });
    for (std::size_t i = 0; i < a0.size(); ++i) {
        if (died[i]) {
            cloud.divergent.push_back(i);
        } else {
            cloud.points.push_back(std::move(terminal[i]));
            cloud.provenance.push_back(i);
        }
    }
    return cloud;
}

double point_set_distance(const StateVector& a, const std::vector<StateVector>& B, Metric metric) {
    if (B.empty()) throw ConfigError("point-set distance: empty set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : B) best = std::min(best, metric_dist(a, b, metric));
    return best;
}

double hausdorff_semidistance(const std::vector<StateVector>& A, const std::vector<StateVector>& B,
                              Metric metric) {
    if (A.empty() || B.empty()) throw ConfigError("hausdorff: empty point cloud");
    double sup = 0.0;
    for (const auto& a : A) sup = std::max(sup, point_set_distance(a, B, metric));
    return sup;
}

double hausdorff_semidistance(const PointCloud& A, const PointCloud& B, Metric metric) {
    return hausdorff_semidistance(A.points, B.points, metric);
}

double hausdorff_distance(const std::vector<StateVector>& A, const std::vector<StateVector>& B,
                          Metric metric) {
    return std::max(hausdorff_semidistance(A, B, metric), hausdorff_semidistance(B, A, metric));
}

AttractorEstimate omega_limit_estimate(const GalerkinModel& model, const DiffusionOperator& G,
                                       const noise::NoiseProcess& proc,
                                       const std::vector<StateVector>& a0,
                                       const std::vector<double>& horizons, Metric metric,
                                       double eps_stab, double dt,
                                       const dynamics::AbsorbingBall* ball, double anchor,
                                       unsigned workers) {
    if (horizons.empty()) throw ConfigError("omega-limit: empty horizon list");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw ConfigError("omega-limit: horizons must be strictly increasing");
    if (!(eps_stab > 0.0)) throw ConfigError("omega-limit: eps_stab must be positive");

    AttractorEstimate est;
    est.metric = metric;
    est.eps_stab = eps_stab;
    est.horizons_used = horizons;

    PointCloud prev;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        PointCloud cur = pullback_ensemble(model, G, proc, a0, horizons[h], dt, anchor, workers);
        if (cur.points.empty()) throw ConfigError("omega-limit: all ensemble members diverged");
        if (h > 0)
            est.hausdorff_history.push_back(hausdorff_distance(prev.points, cur.points, metric));
        prev = std::move(cur);
    }
    est.cloud = std::move(prev);

    const std::size_t nh = est.hausdorff_history.size();
    est.stabilized = nh >= 3 && est.hausdorff_history[nh - 1] <= eps_stab &&
                     est.hausdorff_history[nh - 2] <= eps_stab &&
                     est.hausdorff_history[nh - 3] <= eps_stab;

    for (const auto& p : est.cloud.points) {
        const double n = spectral::norm_H(p);
        est.max_point_norm2 = std::max(est.max_point_norm2, n * n);
    }
    if (ball) {
        est.ball_checked = true;
        est.in_absorbing_ball = est.max_point_norm2 <= ball->R2 + eps_stab * eps_stab;
    }
    return est;
}

InvarianceReport invariance_check(const GalerkinModel& model, const DiffusionOperator& G,
                                  const noise::NoiseProcess& proc, const AttractorEstimate& estimate,
                                  const std::vector<StateVector>& a0, double t, double dt,
                                  unsigned workers) {
    if (!estimate.stabilized) throw ConfigError("invariance: estimate is not stabilized");
    if (t < 0.0) throw ConfigError("invariance: t must be >= 0");

    InvarianceReport rep;
    rep.t = t;
    if (t == 0.0) {
        rep.dist_strong = 0.0;
        rep.dist_weak = 0.0;
        rep.fiber_stabilized = true;
        return rep;
    }

    // Pushforward of the estimate under omega on [0, t].
    std::vector<StateVector> pushed(estimate.cloud.points.size());
    std::vector<char> died(estimate.cloud.points.size(), 0);
    parallel_for(estimate.cloud.points.size(), workers, [&](std::size_t i) {
        try {
            Trajectory traj =
                dynamics::integrate(model, G, estimate.cloud.points[i], 0.0, t, dt, proc);
            pushed[i] = std::move(traj.states.back());
        } catch (const DivergenceError&) {
            died[i] = 1;
        }
    });
    std::vector<StateVector> fwd;
    for (std::size_t i = 0; i < pushed.size(); ++i) {
        if (died[i])
            ++rep.pushed_divergent;
        else
            fwd.push_back(std::move(pushed[i]));
    }
    if (fwd.empty()) throw ConfigError("invariance: every pushed member diverged");

    // Independent estimate of the fiber at theta_t omega.
    AttractorEstimate fiber =
        omega_limit_estimate(model, G, proc, a0, estimate.horizons_used, estimate.metric,
                             estimate.eps_stab, dt, nullptr, t, workers);
    rep.fiber_stabilized = fiber.stabilized;
    rep.dist_strong = hausdorff_distance(fwd, fiber.cloud.points, Metric::strong);
    rep.dist_weak = hausdorff_distance(fwd, fiber.cloud.points, Metric::weak);
    return rep;
}

CompactnessReport compactness_diagnostics(const std::vector<Trajectory>& ensemble,
                                          const CompactnessTolerances& tol) {
    if (ensemble.size() < 2)
        throw ConfigError("compactness diagnostics: need an ensemble of >= 2 trajectories");
    const double dt = ensemble.front().dt;
    const double tau = ensemble.front().tau;
    const std::size_t n = ensemble.front().n_records();
    for (const auto& t : ensemble)
        if (t.dt != dt || t.tau != tau || t.n_records() != n)
            throw ConfigError("compactness diagnostics: ensemble grids differ");
    const double window = dt * static_cast<double>(n - 1);

    CompactnessReport rep;

    // A1 proxy: weak-metric equicontinuity modulus per window width.
    for (double h : tol.h_values) {
        if (!(h > 0.0) || h > window)
            throw ConfigError("compactness diagnostics: window too short for requested h");
        const std::size_t lag_max = static_cast<std::size_t>(grid_index(h, dt));
        double modulus = 0.0;
        for (const auto& u : ensemble)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 1; l <= lag_max && k + l < n; ++l)
                    modulus = std::max(
                        modulus, spectral::weak_metric(u.states[k], u.states[k + l]));
        rep.a1_modulus.emplace_back(h, modulus);
    }

    // A2: largest delta (grid multiples) such that the norm jump over any
    // look-back window of width delta stays within eps, across the ensemble.
    std::vector<std::vector<double>> norms(ensemble.size(), std::vector<double>(n));
    for (std::size_t e = 0; e < ensemble.size(); ++e)
        for (std::size_t k = 0; k < n; ++k)
            norms[e][k] = std::sqrt(2.0 * ensemble[e].mon.energy[k]);
    auto worst_jump = [&](std::size_t lag) {
        double jump = -std::numeric_limits<double>::infinity();
        for (const auto& seq : norms)
            for (std::size_t k = 1; k < n; ++k)
                for (std::size_t j = k > lag ? k - lag : 0; j < k; ++j)
                    jump = std::max(jump, seq[k] - seq[j]);
        return jump;
    };
    for (double eps : tol.eps_values) {
        double best_delta = 0.0;
        double slack = -eps;
        for (std::size_t lag = n - 1; lag >= 1; --lag) {
            const double jump = worst_jump(lag);
            if (jump <= eps) {
                best_delta = dt * static_cast<double>(lag);
                slack = jump - eps;
                break;
            }
        }
        rep.a2_energy.push_back({eps, best_delta, slack});
    }

    // A3: fraction of grid times where pairwise weak closeness implies
    // strong closeness.
    std::size_t ok = 0;
    for (std::size_t k = 0; k < n; ++k) {
        bool weak_cauchy = true;
        bool strong_cauchy = true;
        for (std::size_t i = 0; i < ensemble.size(); ++i)
            for (std::size_t j = i + 1; j < ensemble.size(); ++j) {
                if (spectral::weak_metric(ensemble[i].states[k], ensemble[j].states[k]) >
                    tol.tol_weak)
                    weak_cauchy = false;
                if (spectral::norm_H_diff(ensemble[i].states[k], ensemble[j].states[k]) >
                    tol.tol_strong)
                    strong_cauchy = false;
            }
        if (!weak_cauchy || strong_cauchy) ++ok;
    }
    rep.a3_fraction = static_cast<double>(ok) / static_cast<double>(n);
    return rep;
}

StateVector linear_pullback_fixed_point(const GalerkinModel& model, const StateVector& g,
                                        const noise::NoiseProcess& proc, double t_back, double dt,
                                        double anchor) {
    if (!(t_back > 0.0)) throw ConfigError("toy oracle: t_back must be positive");
    if (!is_grid_multiple(t_back, dt)) throw ConfigError("toy oracle: t_back must be a dt multiple");
    const std::size_t n_steps = static_cast<std::size_t>(grid_index(t_back, dt));
    const auto& path = proc.path();
    const std::size_t base = path.index_of(anchor - t_back);
    const std::size_t stride = static_cast<std::size_t>(grid_index(dt, path.dt()));
    (void)path.index_of(anchor);

    StateVector a(model.n_modes());
    for (std::size_t j = 0; j < model.n_modes(); ++j) {
        const double rate = model.nu * model.lambda[j];
        double acc = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double zeta_k = proc.zeta_at(base + k * stride);
            const double t0 = -t_back + dt * static_cast<double>(k);
            const double t1 = t0 + dt;
            acc += zeta_k * (std::exp(rate * t1) - std::exp(rate * t0)) / rate;
        }
        a[j] = g[j] * acc;
    }
    return a;
}

} // namespace rns::attractor
