#include "rns/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rns/hash.hpp"
#include "rns/io.hpp"
#include "rns/parallel.hpp"
#include "rns/report.hpp"
#include "rns/tracking.hpp"

namespace rns::cli {

using attractor::AttractorEstimate;
using attractor::Metric;
using attractor::PointCloud;
using dynamics::AbsorbingBall;
using dynamics::DiffusionOperator;
using dynamics::Trajectory;
using spectral::GalerkinModel;
using spectral::StateVector;

namespace {

constexpr const char* kWarnBasis =
    "basis: periodic torus Fourier eigenbasis; no-slip Dirichlet eigenfunctions are out of scope";
constexpr const char* kWarnTrilinear =
    "trilinear form: advection indices run over all spatial dimensions";
constexpr const char* kWarnGronwall =
    "gronwall bound: decay form, no initial-energy factor inside the time integral";
constexpr const char* kWarnDiagnostics =
    "a1-a3 compactness output is a heuristic diagnostic, not a proof";
constexpr const char* kWarnTracking = "tracking: results conditional on the a1-a3 diagnostics";
constexpr const char* kWarnForcing = "forcing was not divergence-free; Leray projection applied";

struct Workspace {
    GalerkinModel model;
    DiffusionOperator G;
    noise::WienerPath path;
    noise::NoiseProcess proc;

    explicit Workspace(const RunConfig& cfg)
        : model(build_model(cfg)),
          G(model, cfg.diffusion),
          path(noise::sample_wiener(cfg.seed, cfg.noise_t_min, cfg.noise_t_max, cfg.noise_dt)),
          proc(path, cfg.delta, cfg.init_mode) {}

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
};

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return cfg.output_dir + "/" + name;
}

double a0_radius(const RunConfig& cfg, const GalerkinModel& model, const DiffusionOperator& G) {
    if (cfg.task.a0_radius > 0.0) return cfg.task.a0_radius;
    const AbsorbingBall ball = dynamics::absorbing_radius(model, G, cfg.tol.c_absorb);
    const double r = 2.0 * std::sqrt(ball.R2);
    if (!(r > 0.0))
        throw ConfigError("[task] a0_radius: auto radius is zero (R^2 = 0); set it explicitly");
    return r;
}

std::vector<StateVector> make_a0(const RunConfig& cfg, const GalerkinModel& model,
                                 const DiffusionOperator& G) {
    return attractor::low_discrepancy_sphere(cfg.task.a0_count, model.n_modes(),
                                             a0_radius(cfg, model, G));
}

StateVector start_state(const RunConfig& cfg, const GalerkinModel& model) {
    if (cfg.task.u0 == "zero") return StateVector(model.n_modes());
    const auto pts = attractor::low_discrepancy_sphere(cfg.task.u0_index + 1, model.n_modes(),
                                                       cfg.task.u0_radius);
    return pts[cfg.task.u0_index];
}

void add_standard_warnings(RunReport& rep, const GalerkinModel& model) {
    rep.warn(kWarnBasis);
    rep.warn(kWarnTrilinear);
    if (model.forcing_projected) rep.warn(kWarnForcing);
}

bool toy_oracle_available(const GalerkinModel& model, const DiffusionOperator& G) {
    return !model.advection && G.is_constant();
}

Trajectory subsample(const Trajectory& traj, std::size_t stride, std::size_t max_records) {
    Trajectory out;
    out.tau = traj.tau;
    out.dt = traj.dt * static_cast<double>(stride);
    for (std::size_t k = 0; k < traj.n_records() && out.n_records() < max_records; k += stride) {
        out.states.push_back(traj.states[k]);
        out.mon.energy.push_back(traj.mon.energy[k]);
        out.mon.dissipation.push_back(traj.mon.dissipation[k]);
        out.mon.work_f.push_back(traj.mon.work_f[k]);
        out.mon.work_g.push_back(traj.mon.work_g[k]);
        out.mon.zeta.push_back(traj.mon.zeta[k]);
    }
    return out;
}

std::uint64_t steps_of(double span, double dt) {
    return static_cast<std::uint64_t>(grid_index(span, dt));
}

// ---------------------------------------------------------------- simulate

int task_simulate(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    const double dt = cfg.integration_dt();
    const StateVector u0 = start_state(cfg, ws.model);
    int rc = 0;

    Trajectory traj;
    try {
        traj = dynamics::integrate(ws.model, ws.G, u0, cfg.task.tau, cfg.task.t_end, dt, ws.proc);
    } catch (const DivergenceError& e) {
        rep.add("divergence_time", e.time);
        rep.add("divergence_step", static_cast<std::uint64_t>(e.step));
        return 3;
    }
    rep.count_steps(traj.n_records() - 1);

    const auto res = dynamics::energy_residual(traj);
    rep.add("records", static_cast<std::uint64_t>(traj.n_records()));
    rep.add("energy_final", traj.mon.energy.back());
    rep.add("residual_max_abs", res.max_abs);
    rep.add("residual_max_signed", res.max_signed);
    rep.add("residual_max_ratio", res.max_ratio);
    if (cfg.tol.c_res > 0.0) {
        const bool ok = res.max_ratio <= cfg.tol.c_res;
        rep.add("residual_within_c_res", ok);
        if (!ok) rc = 2;
    }

    const bool free_decay = spectral::norm_H(ws.model.f_coeffs) == 0.0 && ws.G.is_zero();
    if (free_decay) {
        // E(t) <= E(tau) e^{-2 nu lambda_1 (t-tau)} (1 + 10 dt), per record.
        const double slack = 1.0 + 10.0 * dt;
        bool ok = true;
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.n_records(); ++k) {
            const double bound =
                traj.mon.energy.front() *
                    std::exp(-2.0 * ws.model.nu * ws.model.lambda_1 * (traj.time_at(k) - traj.tau)) *
                    slack +
                1e-300;
            worst = std::max(worst, traj.mon.energy[k] - bound);
            ok = ok && traj.mon.energy[k] <= bound;
        }
        rep.add("decay_check", ok);
        rep.add("decay_worst_excess", worst);
        if (!ok) rc = 2;
    }

    if (cfg.tol.c_gron > 0.0) {
        rep.warn(kWarnGronwall);
        const auto gron = dynamics::gronwall_check(traj, ws.model, ws.G, cfg.tol.c_gron);
        rep.add("gronwall_min_margin", gron.min_margin);
        rep.add("gronwall_violations", gron.first_violation < 0);
        if (gron.first_violation >= 0) rc = 2;
    }

    io::write_trajectory_bin(out_path(cfg, "trajectory.bin"), traj);
    io::write_monitors_csv(out_path(cfg, "monitors.csv"), traj);
    io::write_noise_csv(out_path(cfg, "noise.csv"), ws.proc);
    io::write_noise_bin(out_path(cfg, "noise.bin"), ws.proc);
    const auto cert = noise::certify_noise_bound(ws.proc, ws.path.t_min(), ws.path.t_max());
    rep.add("noise_bound_M", cert.M);
    rep.add("noise_max_ratio", cert.max_ratio);
    return rc;
}

// ---------------------------------------------------------------- pullback

int task_pullback(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    const double dt = cfg.integration_dt();
    const auto a0 = make_a0(cfg, ws.model, ws.G);
    const PointCloud cloud = attractor::pullback_ensemble(ws.model, ws.G, ws.proc, a0,
                                                          cfg.task.horizon, dt, 0.0,
                                                          cfg.task.workers);
    rep.count_steps(cloud.points.size() * steps_of(cfg.task.horizon, dt));
    rep.add("points", static_cast<std::uint64_t>(cloud.points.size()));
    rep.add("divergent_members", static_cast<std::uint64_t>(cloud.divergent.size()));
    double max_norm = 0.0;
    for (const auto& p : cloud.points) max_norm = std::max(max_norm, spectral::norm_H(p));
    rep.add("max_point_norm", max_norm);
    io::write_cloud_csv(out_path(cfg, "cloud.csv"), cloud);
    if (cloud.points.empty()) return 3;
    return cloud.divergent.empty() ? 0 : 2;
}

// ---------------------------------------------------------------- attractor

AttractorEstimate estimate_for(const RunConfig& cfg, Workspace& ws, RunReport& rep,
                               const std::vector<StateVector>& a0) {
    const double dt = cfg.integration_dt();
    const AbsorbingBall ball = cfg.has_constants()
                                   ? dynamics::absorbing_radius(ws.model, ws.G, cfg.tol.c_absorb)
                                   : AbsorbingBall{};
    const AttractorEstimate est = attractor::omega_limit_estimate(
        ws.model, ws.G, ws.proc, a0, cfg.task.horizons, cfg.task.metric, cfg.task.eps_stab, dt,
        cfg.has_constants() ? &ball : nullptr, 0.0, cfg.task.workers);
    double total = 0.0;
    for (double h : cfg.task.horizons) total += h;
    rep.count_steps(a0.size() * steps_of(total, dt));
    return est;
}

int task_attractor(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    const auto a0 = make_a0(cfg, ws.model, ws.G);
    const AttractorEstimate est = estimate_for(cfg, ws, rep, a0);
    int rc = est.stabilized ? 0 : 2;

    rep.add("stabilized", est.stabilized);
    rep.add("points", static_cast<std::uint64_t>(est.cloud.points.size()));
    rep.add("divergent_members", static_cast<std::uint64_t>(est.cloud.divergent.size()));
    rep.add("hausdorff_history", fmt_vec(est.hausdorff_history));
    rep.add("max_point_norm2", est.max_point_norm2);
    if (est.ball_checked) rep.add("in_absorbing_ball", est.in_absorbing_ball);

    if (toy_oracle_available(ws.model, ws.G) && cfg.task.oracle_tol > 0.0) {
        const double t_back = cfg.task.horizons.back();
        const StateVector a = attractor::linear_pullback_fixed_point(
            ws.model, ws.G.constant_coeffs(), ws.proc, t_back, cfg.integration_dt());
        double dev = 0.0;
        for (const auto& p : est.cloud.points)
            for (std::size_t j = 0; j < p.size(); ++j)
                dev = std::max(dev, std::abs(p[j] - a[j]));
        rep.add("oracle_max_componentwise_dev", dev);
        rep.add("oracle_within_tol", dev <= cfg.task.oracle_tol);
        rep.add("oracle_hausdorff_strong",
                attractor::hausdorff_distance(est.cloud.points, {a}, Metric::strong));
        rep.add("oracle_hausdorff_weak",
                attractor::hausdorff_distance(est.cloud.points, {a}, Metric::weak));
        if (dev > cfg.task.oracle_tol) rc = 2;
    }

    io::write_cloud_csv(out_path(cfg, "cloud.csv"), est.cloud);
    io::write_estimate_manifest(out_path(cfg, "estimate.txt"), est);
    return rc;
}

// ---------------------------------------------------------------- invariance

int task_invariance(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    const auto a0 = make_a0(cfg, ws.model, ws.G);
    const AttractorEstimate est = estimate_for(cfg, ws, rep, a0);
    if (!est.stabilized) {
        rep.add("stabilized", false);
        return 2;
    }
    rep.add("stabilized", true);
    int rc = 0;
    const double dt = cfg.integration_dt();
    for (double t : cfg.task.t_push) {
        const auto inv = attractor::invariance_check(ws.model, ws.G, ws.proc, est, a0, t, dt,
                                                     cfg.task.workers);
        const std::string tag = "t_" + fmt_g17(t);
        rep.add(tag + "_dist_strong", inv.dist_strong);
        rep.add(tag + "_dist_weak", inv.dist_weak);
        rep.add(tag + "_fiber_stabilized", inv.fiber_stabilized);
        if (cfg.task.invariance_tol > 0.0 &&
            (inv.dist_strong > cfg.task.invariance_tol || inv.dist_weak > cfg.task.invariance_tol))
            rc = 2;
    }
    io::write_cloud_csv(out_path(cfg, "cloud.csv"), est.cloud);
    io::write_estimate_manifest(out_path(cfg, "estimate.txt"), est);
    return rc;
}

// ---------------------------------------------------------------- track

int task_track(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    rep.warn(kWarnTracking);
    const double dt = cfg.integration_dt();
    const auto a0 = make_a0(cfg, ws.model, ws.G);
    const AttractorEstimate est = estimate_for(cfg, ws, rep, a0);
    if (!est.stabilized) {
        rep.add("stabilized", false);
        return 2;
    }
    rep.add("stabilized", true);

    const auto candidates = tracking::build_complete_candidates(
        ws.model, ws.G, ws.proc, est, a0, cfg.task.t_back, cfg.task.t_fwd, dt,
        cfg.task.check_interval, cfg.task.workers);
    rep.add("candidates_accepted", static_cast<std::uint64_t>(candidates.trajectories.size()));
    rep.add("candidates_rejected", static_cast<std::uint64_t>(candidates.rejected.size()));
    rep.count_steps(candidates.trajectories.size() *
                    steps_of(cfg.task.t_back + est.horizons_used.back() + cfg.task.t_fwd, dt));

    const StateVector u0 = start_state(cfg, ws.model);
    const double u_end = cfg.task.t_star + std::max(cfg.task.window, double(cfg.task.t_max));
    const Trajectory u = dynamics::integrate(ws.model, ws.G, u0, 0.0, u_end, dt, ws.proc);
    rep.count_steps(u.n_records() - 1);

    tracking::TrajectoryMetricSpec spec;
    spec.a = cfg.task.t_star;
    spec.t_max = cfg.task.t_max;
    spec.metric = Metric::weak;
    const auto weak = tracking::weak_tracking_check(u, candidates, cfg.task.eps, spec);
    rep.add("weak_eps_requested", weak.eps_requested);
    rep.add("weak_eps_achieved", weak.eps_achieved);
    rep.add("weak_matched", weak.matched_trajectory >= 0);
    rep.add("weak_remainder_bound", weak.remainder_bound);

    int rc = weak.matched_trajectory >= 0 ? 0 : 2;

    double eps_strong = std::numeric_limits<double>::infinity();
    if (toy_oracle_available(ws.model, ws.G)) {
        const StateVector a = attractor::linear_pullback_fixed_point(
            ws.model, ws.G.constant_coeffs(), ws.proc, est.horizons_used.back(), dt);
        eps_strong = 1.1 * std::exp(-ws.model.nu * ws.model.lambda_1 * cfg.task.t_star) *
                     spectral::norm_H_diff(u0, a);
        rep.add("strong_contraction_bound", eps_strong);
    }
    const auto strong =
        tracking::strong_tracking_check(u, candidates, eps_strong, cfg.task.window, cfg.task.t_star);
    rep.add("strong_sup_achieved", strong.eps_achieved);
    if (std::isfinite(eps_strong)) {
        rep.add("strong_within_bound", strong.matched_trajectory >= 0);
        if (strong.matched_trajectory < 0) rc = 2;
    }

    {
        std::ofstream os(out_path(cfg, "tracking.txt"));
        os << "# tracking report\n";
        os << "banner = conditional on a1-a3 diagnostics\n";
        os << "t_star = " << fmt_g17(cfg.task.t_star) << '\n';
        os << "weak_eps_requested = " << fmt_g17(weak.eps_requested) << '\n';
        os << "weak_eps_achieved = " << fmt_g17(weak.eps_achieved) << '\n';
        os << "weak_remainder_bound = " << fmt_g17(weak.remainder_bound) << '\n';
        os << "weak_matched_candidate = " << weak.matched_trajectory << '\n';
        os << "strong_window = " << fmt_g17(cfg.task.window) << '\n';
        os << "strong_sup_achieved = " << fmt_g17(strong.eps_achieved) << '\n';
        os << "candidates_accepted = " << candidates.trajectories.size() << '\n';
        os << "candidates_rejected = " << candidates.rejected.size() << '\n';
    }
    {
        std::ofstream os(out_path(cfg, "window_sups.csv"));
        os << "window_T,weak_sup\n";
        for (std::size_t i = 0; i < weak.window_sup.size(); ++i)
            os << (i + 1) << ',' << fmt_g17(weak.window_sup[i]) << '\n';
    }
    if (weak.matched_trajectory >= 0)
        io::write_trajectory_bin(out_path(cfg, "candidate.bin"),
                                 candidates.trajectories[static_cast<std::size_t>(
                                     weak.matched_trajectory)]);
    io::write_estimate_manifest(out_path(cfg, "estimate.txt"), est);
    return rc;
}

// ---------------------------------------------------------------- verify

struct SuiteStats {
    double res_max_ratio = 0.0;
    double res_max_abs = 0.0;
    double gron_max_ratio = 0.0;
    std::ptrdiff_t gron_violations = 0;
    std::size_t diverged = 0;
};

SuiteStats run_suite(const RunConfig& cfg, const GalerkinModel& model, const DiffusionOperator& G,
                     double dt, double t_end, std::size_t runs, double c_gron,
                     const std::vector<StateVector>& starts,
                     std::vector<Trajectory>* keep, std::size_t keep_count, RunReport& rep) {
    SuiteStats stats;
    std::vector<SuiteStats> per(runs);
    if (keep) keep->resize(std::min(keep_count, runs));
    parallel_for(runs, cfg.task.workers, [&](std::size_t i) {
        const noise::WienerPath path = noise::sample_wiener(
            cfg.seed + i, cfg.noise_t_min, cfg.noise_t_max, cfg.noise_dt);
        const noise::NoiseProcess proc(path, cfg.delta, cfg.init_mode);
        try {
            const Trajectory traj =
                dynamics::integrate(model, G, starts[i % starts.size()], 0.0, t_end, dt, proc);
            const auto res = dynamics::energy_residual(traj);
            per[i].res_max_ratio = res.max_ratio;
            per[i].res_max_abs = res.max_abs;
            const auto gron = dynamics::gronwall_check(traj, model, G, c_gron);
            per[i].gron_max_ratio = gron.max_ratio;
            per[i].gron_violations = gron.first_violation >= 0 ? 1 : 0;
            if (keep && i < keep->size()) (*keep)[i] = traj;
        } catch (const DivergenceError&) {
            per[i].diverged = 1;
        }
    });
    for (const auto& s : per) {
        stats.res_max_ratio = std::max(stats.res_max_ratio, s.res_max_ratio);
        stats.res_max_abs = std::max(stats.res_max_abs, s.res_max_abs);
        stats.gron_max_ratio = std::max(stats.gron_max_ratio, s.gron_max_ratio);
        stats.gron_violations += s.gron_violations;
        stats.diverged += s.diverged;
    }
    rep.count_steps(runs * steps_of(t_end, dt));
    return stats;
}

int task_verify(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    rep.warn(kWarnGronwall);
    rep.warn(kWarnDiagnostics);
    const double dt = cfg.integration_dt();
    int rc = 0;

    const auto a0 = make_a0(cfg, ws.model, ws.G);
    std::vector<Trajectory> diag_raw;
    const SuiteStats suite = run_suite(cfg, ws.model, ws.G, dt, cfg.task.t_end, cfg.task.runs,
                                       cfg.tol.c_gron, a0, &diag_raw, cfg.task.diag_members, rep);
    if (suite.diverged > 0) {
        rep.add("suite_diverged_runs", static_cast<std::uint64_t>(suite.diverged));
        return 3;
    }
    rep.add("suite_runs", static_cast<std::uint64_t>(cfg.task.runs));
    rep.add("residual_max_ratio", suite.res_max_ratio);
    rep.add("residual_max_abs", suite.res_max_abs);
    rep.add("residual_within_c_res", suite.res_max_ratio <= cfg.tol.c_res);
    if (suite.res_max_ratio > cfg.tol.c_res) rc = 2;
    rep.add("gronwall_violations", static_cast<std::uint64_t>(suite.gron_violations));
    rep.add("gronwall_max_ratio", suite.gron_max_ratio);
    if (suite.gron_violations > 0) rc = 2;

    if (cfg.task.check_halving) {
        const double half = dt / 2.0;
        if (!is_grid_multiple(half, cfg.noise_dt))
            throw ConfigError("[task] check_halving: noise dt must divide dt/2");
        const SuiteStats fine = run_suite(cfg, ws.model, ws.G, half, cfg.task.t_end,
                                          cfg.task.runs, cfg.tol.c_gron, a0, nullptr, 0, rep);
        const double ratio = fine.res_max_abs / suite.res_max_abs;
        rep.add("halving_residual_ratio", ratio);
        const bool ok = ratio >= 0.4 && ratio <= 0.6;
        rep.add("halving_within_20pct", ok);
        if (!ok) rc = 2;
    }

    // Pullback absorption on the base path.
    const AbsorbingBall ball = dynamics::absorbing_radius(ws.model, ws.G, cfg.tol.c_absorb);
    rep.add("absorbing_R2", ball.R2);
    const auto absorb = dynamics::verify_absorbing(ws.model, ws.G, ws.proc, a0, cfg.task.horizons,
                                                   dt, ball, cfg.tol.eps_zero, cfg.task.workers);
    double total = 0.0;
    for (double h : cfg.task.horizons) total += h;
    rep.count_steps(a0.size() * steps_of(total, dt));
    rep.add("absorb_all_entered", absorb.all_entered);
    rep.add("absorb_divergent", static_cast<std::uint64_t>(absorb.divergent.size()));
    double worst_entry = 0.0;
    for (double e : absorb.entry_horizon) worst_entry = std::max(worst_entry, e);
    rep.add("absorb_worst_entry_horizon", worst_entry);
    if (!absorb.all_entered) rc = 2;

    // A1-A3 diagnostics on same-path trajectories from distinct starts.
    {
        std::vector<Trajectory> ensemble;
        for (std::size_t i = 0; i < cfg.task.diag_members; ++i) {
            const Trajectory traj = dynamics::integrate(ws.model, ws.G, a0[i % a0.size()], 0.0,
                                                        cfg.task.t_end, dt, ws.proc);
            const std::size_t stride =
                std::max<std::size_t>(1, (traj.n_records() - 1) / (cfg.task.diag_records - 1));
            ensemble.push_back(subsample(traj, stride, cfg.task.diag_records));
        }
        rep.count_steps(cfg.task.diag_members * steps_of(cfg.task.t_end, dt));
        const double ddt = ensemble.front().dt;
        attractor::CompactnessTolerances tol;
        tol.h_values = {ddt, 5 * ddt, 10 * ddt};
        tol.eps_values = {0.05, 0.2, 1.0};
        tol.tol_weak = 0.05;
        tol.tol_strong = 0.1;
        const auto diag = attractor::compactness_diagnostics(ensemble, tol);
        bool finite = std::isfinite(diag.a3_fraction);
        for (const auto& [h, m] : diag.a1_modulus) finite = finite && std::isfinite(m);
        for (const auto& row : diag.a2_energy)
            finite = finite && std::isfinite(row[1]) && std::isfinite(row[2]);
        rep.add("diag_entries_finite", finite);
        const bool a2_ok = !diag.a2_energy.empty() && diag.a2_energy.back()[1] >= ddt;
        rep.add("diag_a2_satisfied", a2_ok);
        rep.add("diag_a3_fraction", diag.a3_fraction);
        if (!finite || !a2_ok) rc = 2;

        std::ofstream os(out_path(cfg, "verify.txt"));
        os << "# verification suite\n";
        os << "runs = " << cfg.task.runs << '\n';
        os << "residual_max_ratio = " << fmt_g17(suite.res_max_ratio) << '\n';
        os << "residual_c_res = " << fmt_g17(cfg.tol.c_res) << '\n';
        os << "gronwall_violations = " << suite.gron_violations << '\n';
        os << "gronwall_c_gron = " << fmt_g17(cfg.tol.c_gron) << '\n';
        os << "absorb_R2 = " << fmt_g17(ball.R2) << '\n';
        os << "absorb_all_entered = " << (absorb.all_entered ? "yes" : "no") << '\n';
        os << "# a1 modulus: h sup_dw\n";
        for (const auto& [h, m] : diag.a1_modulus)
            os << "a1 = " << fmt_g17(h) << ' ' << fmt_g17(m) << '\n';
        os << "# a2: eps delta_max slack\n";
        for (const auto& row : diag.a2_energy)
            os << "a2 = " << fmt_g17(row[0]) << ' ' << fmt_g17(row[1]) << ' ' << fmt_g17(row[2])
               << '\n';
        os << "a3_fraction = " << fmt_g17(diag.a3_fraction) << '\n';
        os << "heuristic = yes\n";
        os << "# absorption entry horizon per start point\n";
        for (std::size_t i = 0; i < absorb.entry_horizon.size(); ++i)
            os << "entry " << i << " = " << fmt_g17(absorb.entry_horizon[i]) << '\n';
    }
    return rc;
}

// ---------------------------------------------------------------- calibrate

int task_calibrate(const RunConfig& cfg, Workspace& ws, RunReport& rep) {
    rep.warn(kWarnGronwall);
    const double dt = cfg.integration_dt();

    // Designated suite: the configured system with advection disabled. The
    // zero start is always included: with no initial energy the decay term
    // vanishes and every step probes the drive-side constants.
    const GalerkinModel linear =
        spectral::build_torus_model(cfg.dim, cfg.N, cfg.nu, cfg.forcing, false);
    const DiffusionOperator G(linear, cfg.diffusion);

    std::vector<StateVector> a0{StateVector(linear.n_modes())};
    for (auto& p : attractor::low_discrepancy_sphere(cfg.task.a0_count, linear.n_modes(),
                                                     cfg.task.a0_radius))
        a0.push_back(std::move(p));
    const SuiteStats suite = run_suite(cfg, linear, G, dt, cfg.task.t_end, cfg.task.runs,
                                       std::numeric_limits<double>::infinity(), a0, nullptr, 0,
                                       rep);
    if (suite.diverged > 0) {
        rep.add("suite_diverged_runs", static_cast<std::uint64_t>(suite.diverged));
        return 3;
    }

    AbsorbingBall open_ball = dynamics::absorbing_radius(linear, G, 1.0);
    open_ball.R2 = std::numeric_limits<double>::infinity(); // ratio collection only
    const auto absorb = dynamics::verify_absorbing(linear, G, ws.proc, a0, cfg.task.horizons, dt,
                                                   open_ball, cfg.tol.eps_zero, cfg.task.workers);
    double total = 0.0;
    for (double h : cfg.task.horizons) total += h;
    rep.count_steps(a0.size() * steps_of(total, dt));

    const double floor = 1e-12;
    if (suite.gron_max_ratio <= floor || absorb.max_ratio <= floor)
        rep.warn("calibration suite never reached the drive-dominated regime; "
                 "lengthen t_end or the horizons before trusting these constants");
    const double c_res = 2.0 * std::max(suite.res_max_ratio, floor);
    const double c_gron = 2.0 * std::max(suite.gron_max_ratio, floor);
    const double c_absorb = 2.0 * std::max(absorb.max_ratio, floor);

    rep.add("c_res", c_res);
    rep.add("c_gron", c_gron);
    rep.add("c_absorb", c_absorb);
    rep.add("raw_residual_max_ratio", suite.res_max_ratio);
    rep.add("raw_gronwall_max_ratio", suite.gron_max_ratio);
    rep.add("raw_absorb_max_ratio", absorb.max_ratio);

    std::ofstream os(out_path(cfg, "constants.txt"));
    os << "# calibration constants manifest\n";
    os << "# suite: advection-off model, " << cfg.task.runs << " seeds from " << cfg.seed
       << ", t_end = " << fmt_g17(cfg.task.t_end) << ", dt = " << fmt_g17(dt) << '\n';
    os << "c_res = " << fmt_g17(c_res) << '\n';
    os << "c_gron = " << fmt_g17(c_gron) << '\n';
    os << "c_absorb = " << fmt_g17(c_absorb) << '\n';
    os << "raw_residual_max_ratio = " << fmt_g17(suite.res_max_ratio) << '\n';
    os << "raw_gronwall_max_ratio = " << fmt_g17(suite.gron_max_ratio) << '\n';
    os << "raw_absorb_max_ratio = " << fmt_g17(absorb.max_ratio) << '\n';
    os << "config_hash = " << hash::git_blob_hash(cfg.raw_text) << '\n';
    return 0;
}

} // namespace

int run_task(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.output_dir);

    Workspace ws(cfg);
    RunReport rep(cfg);
    add_standard_warnings(rep, ws.model);
    io::write_model_manifest(out_path(cfg, "model.txt"), ws.model);

    int rc = 0;
    try {
        switch (cfg.task.name) {
            case Task::simulate: rc = task_simulate(cfg, ws, rep); break;
            case Task::pullback: rc = task_pullback(cfg, ws, rep); break;
            case Task::attractor: rc = task_attractor(cfg, ws, rep); break;
            case Task::invariance: rc = task_invariance(cfg, ws, rep); break;
            case Task::track: rc = task_track(cfg, ws, rep); break;
            case Task::verify: rc = task_verify(cfg, ws, rep); break;
            case Task::calibrate: rc = task_calibrate(cfg, ws, rep); break;
        }
    } catch (const DivergenceError& e) {
        rep.add("divergence_time", e.time);
        rep.add("divergence_step", static_cast<std::uint64_t>(e.step));
        rc = 3;
    }
    rep.add("exit_status", static_cast<std::uint64_t>(rc));
    const auto t1 = std::chrono::steady_clock::now();
    rep.write(cfg.output_dir, std::chrono::duration<double>(t1 - t0).count());
    return rc;
}

int run_config_file(const std::string& path) { return run_task(load_config(path)); }

} // namespace rns::cli
