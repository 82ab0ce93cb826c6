#include "rns/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>

#include "rns/parallel.hpp"

namespace rns::dynamics {

using spectral::GalerkinModel;
using spectral::ScalarField;
using spectral::StateVector;
using spectral::Vec3;

namespace {

double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z / 6.0);
    return std::expm1(z) / z;
}

// Canonical spectral form of a scalar field: constant part plus one
// (cos, sin) amplitude pair per representative wavevector. Exact Parseval
// L2 norm follows directly.
struct CanonicalScalar {
    double constant = 0.0;
    std::map<std::array<int, 3>, std::pair<double, double>> terms;
};

CanonicalScalar canonicalize(const GalerkinModel& model, const ScalarField& f) {
    CanonicalScalar out;
    for (const auto& t : f) {
        if (model.dim == 2 && t.k[2] != 0)
            throw ConfigError("scalar field: z wavenumber must vanish for dim = 2");
        if (t.k[0] == 0 && t.k[1] == 0 && t.k[2] == 0) {
            out.constant += t.amp_cos;
            continue;
        }
        std::array<int, 3> k = t.k;
        double ac = t.amp_cos, as = t.amp_sin;
        for (int i = 0; i < 3; ++i) {
            if (k[i] > 0) break;
            if (k[i] < 0) { // reduce to representative: flip sign of sin part
                k = {-k[0], -k[1], -k[2]};
                as = -as;
                break;
            }
        }
        auto& slot = out.terms[k];
        slot.first += ac;
        slot.second += as;
    }
    return out;
}

double parseval_L2(const CanonicalScalar& c) {
    double s = c.constant * c.constant;
    for (const auto& [k, amps] : c.terms) s += amps.first * amps.first + amps.second * amps.second;
    return std::sqrt(s);
}

} // namespace

DiffusionOperator::DiffusionOperator(const GalerkinModel& model, DiffusionSpec spec)
    : model_(model), spec_(std::move(spec)) {
    if (!(spec_.p >= 0.0 && spec_.p < 1.0))
        throw ConfigError("diffusion: exponent p must lie in [0, 1)");
    if (spec_.kind == DiffusionKind::additive && !spec_.eta1.empty())
        throw ConfigError("diffusion: kind = additive forces eta1 to be empty");

    const double inv_root_dim = 1.0 / std::sqrt(static_cast<double>(model.dim));
    dir_ = {inv_root_dim, inv_root_dim, model.dim == 3 ? inv_root_dim : 0.0};

    const CanonicalScalar c2 = canonicalize(model, spec_.eta2);
    eta2_norm_ = parseval_L2(c2);

    if (spec_.kind == DiffusionKind::additive) {
        // Exact coefficient-space projection of eta2(x) d_hat.
        std::vector<spectral::ForcingMode> terms;
        for (const auto& [k, amps] : c2.terms) {
            spectral::ForcingMode fm;
            fm.k = k;
            for (int i = 0; i < 3; ++i) {
                fm.amp_cos[static_cast<std::size_t>(i)] = amps.first * dir_[static_cast<std::size_t>(i)];
                fm.amp_sin[static_cast<std::size_t>(i)] = amps.second * dir_[static_cast<std::size_t>(i)];
            }
            terms.push_back(fm);
        }
        const_coeffs_ = project_modes(model, terms);
        zero_ = spectral::norm_H(const_coeffs_) == 0.0 && eta2_norm_ == 0.0;
        return;
    }

    const int min_n = 2 * (2 * model.cutoff + 1);
    int n = spec_.collocation_n == 0 ? min_n : spec_.collocation_n;
    if (n < min_n)
        throw ConfigError("diffusion: collocation_n below the 2(2N+1) anti-aliasing floor");
    spec_.collocation_n = n;
    grid_ = std::make_unique<spectral::CollocationGrid>(model, n);
    eta1_vals_ = grid_->eval_scalar(spec_.eta1);
    eta2_vals_ = grid_->eval_scalar(spec_.eta2);
    const double q = 2.0 / (1.0 - spec_.p);
    eta1_norm_ = spec_.eta1.empty() ? 0.0 : grid_->scalar_norm_Lq(spec_.eta1, q);
    zero_ = eta1_norm_ == 0.0 && eta2_norm_ == 0.0;
}

StateVector DiffusionOperator::eval(const StateVector& u) const {
    if (is_constant()) return const_coeffs_;
    const std::vector<Vec3> vel = grid_->eval_velocity(u);
    std::vector<Vec3> field(vel.size());
    for (std::size_t i = 0; i < vel.size(); ++i) {
        const double speed = std::sqrt(vel[i][0] * vel[i][0] + vel[i][1] * vel[i][1] +
                                       vel[i][2] * vel[i][2]);
        const double s = eta1_vals_[i] * std::pow(speed, spec_.p) + eta2_vals_[i];
        field[i] = {s * dir_[0], s * dir_[1], s * dir_[2]};
    }
    return grid_->project(field);
}

StateVector G_eval(const GalerkinModel& model, const DiffusionSpec& spec, const StateVector& u) {
    return DiffusionOperator(model, spec).eval(u);
}

StateVector step(const GalerkinModel& model, const DiffusionOperator& G, const StateVector& u,
                 double dt, double zeta_t) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    StateVector rhs = G.is_zero() ? StateVector(model.n_modes()) : G.eval(u);
    for (auto& x : rhs.c) x *= zeta_t;
    if (model.advection) {
        const StateVector n = nonlinear_term(model, u);
        for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += n[j];
    }
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += model.f_coeffs[j];

    StateVector out(model.n_modes());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double z = -model.nu * model.lambda[j] * dt;
        out[j] = std::exp(z) * u[j] + dt * phi1(z) * rhs[j];
    }
    if (!std::isfinite(spectral::norm_H(out)))
        throw DivergenceError("step: non-finite state", 0.0, 0, u.c);
    return out;
}

Trajectory integrate(const GalerkinModel& model, const DiffusionOperator& G,
                     const StateVector& u_tau, double tau, double t_end, double dt,
                     const noise::NoiseProcess& proc) {
    if (!(dt > 0.0)) throw ConfigError("integrate: dt must be positive");
    if (u_tau.size() != model.n_modes()) throw ConfigError("integrate: state does not conform");
    const auto& path = proc.path();
    if (!is_grid_multiple(dt, path.dt()) || grid_index(dt, path.dt()) < 1)
        throw DomainError("integrate: dt must be a positive grid multiple of the path step");
    const std::size_t stride = static_cast<std::size_t>(grid_index(dt, path.dt()));
    if (!(t_end >= tau)) throw ConfigError("integrate: t_end must be >= tau");
    if (!is_grid_multiple(t_end - tau, dt))
        throw DomainError("integrate: [tau, t_end] is not a whole number of steps");
    const std::size_t n_steps = static_cast<std::size_t>(grid_index(t_end - tau, dt));
    const std::size_t base = path.index_of(tau);
    (void)path.index_of(t_end); // window must sit inside the stored path

    std::vector<double> decay(model.n_modes()), wphi(model.n_modes());
    for (std::size_t j = 0; j < model.n_modes(); ++j) {
        const double z = -model.nu * model.lambda[j] * dt;
        decay[j] = std::exp(z);
        wphi[j] = dt * phi1(z);
    }

    Trajectory traj;
    traj.tau = tau;
    traj.dt = dt;
    traj.states.reserve(n_steps + 1);
    auto& mon = traj.mon;
    mon.energy.reserve(n_steps + 1);
    mon.dissipation.reserve(n_steps + 1);
    mon.work_f.reserve(n_steps + 1);
    mon.work_g.reserve(n_steps + 1);
    mon.zeta.reserve(n_steps + 1);

    StateVector u = u_tau;
    for (std::size_t k = 0;; ++k) {
        const double zeta_k = proc.zeta_at(base + k * stride);
        const StateVector g = G.is_zero() ? StateVector(model.n_modes()) : G.eval(u);

        const double nh = spectral::norm_H(u);
        mon.energy.push_back(0.5 * nh * nh);
        const double nv = spectral::norm_V(model, u);
        mon.dissipation.push_back(model.nu * nv * nv);
        mon.work_f.push_back(spectral::inner(model.f_coeffs, u));
        mon.work_g.push_back(zeta_k * spectral::inner(g, u));
        mon.zeta.push_back(zeta_k);
        traj.states.push_back(u);

        if (k == n_steps) break;

        StateVector rhs = g;
        for (auto& x : rhs.c) x *= zeta_k;
        if (model.advection) {
            const StateVector n = nonlinear_term(model, u);
            for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += n[j];
        }
        StateVector next(model.n_modes());
        for (std::size_t j = 0; j < next.size(); ++j)
            next[j] = decay[j] * u[j] + wphi[j] * (rhs[j] + model.f_coeffs[j]);

        if (!std::isfinite(spectral::norm_H(next)))
            throw DivergenceError("integrate: blow-up at t = " + fmt_g17(traj.time_at(k + 1)),
                                  traj.time_at(k + 1), k + 1, u.c);
        u = std::move(next);
    }
    return traj;
}

Trajectory integrate(const GalerkinModel& model, const DiffusionSpec& spec,
                     const StateVector& u_tau, double tau, double t_end, double dt,
                     const noise::NoiseProcess& proc) {
    const DiffusionOperator G(model, spec);
    return integrate(model, G, u_tau, tau, t_end, dt, proc);
}

double residual_scale(const Trajectory& traj, std::size_t k) {
    const auto& m = traj.mon;
    return std::max(1.0, m.energy[k] + m.dissipation[k] + std::abs(m.work_f[k]) +
                             std::abs(m.work_g[k]));
}

ResidualReport energy_residual(const Trajectory& traj) {
    ResidualReport rep;
    if (traj.n_records() < 2) return rep;
    const auto& m = traj.mon;
    rep.r.resize(traj.n_records() - 1);
    for (std::size_t k = 0; k + 1 < traj.n_records(); ++k) {
        const double r = (m.energy[k + 1] - m.energy[k]) / traj.dt + m.dissipation[k] -
                         m.work_f[k] - m.work_g[k];
        rep.r[k] = r;
        rep.max_signed = std::max(rep.max_signed, r);
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
        rep.max_ratio = std::max(rep.max_ratio, std::abs(r) / (traj.dt * residual_scale(traj, k)));
    }
    return rep;
}

GronwallReport gronwall_check(const Trajectory& traj, const GalerkinModel& model,
                              const DiffusionOperator& G, double c_gron) {
    GronwallReport rep;
    rep.c_used = c_gron;
    const std::size_t n = traj.n_records();
    if (n == 0) return rep;

    const double a = 0.5 * model.nu * model.lambda_1;
    const double h = traj.dt;
    const double decay_step = std::exp(-a * h);
    const double q1 = 2.0 / (1.0 - G.p());
    const double f2 = model.f_norm_Vstar * model.f_norm_Vstar;
    const double e1 = std::pow(G.eta1_norm(), q1);
    const double e2 = G.eta2_norm() * G.eta2_norm();

    auto integrand = [&](std::size_t k) {
        const double z = std::abs(traj.mon.zeta[k]);
        return f2 + std::pow(z, q1) * e1 + z * z * e2;
    };

    const double u0sq = 2.0 * traj.mon.energy[0];
    rep.margin.resize(n);
    double J = 0.0;
    double decay_factor = 1.0;
    double prev_I = integrand(0);
    rep.margin[0] = 0.0;
    rep.min_margin = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double I = integrand(k);
        J = decay_step * J + 0.5 * h * (decay_step * prev_I + I);
        prev_I = I;
        decay_factor *= decay_step;
        const double lhs = 2.0 * traj.mon.energy[k];
        const double bound = decay_factor * u0sq + (J > 0.0 ? c_gron * J : 0.0);
        rep.margin[k] = bound - lhs;
        if (rep.margin[k] < rep.min_margin) rep.min_margin = rep.margin[k];
        if (rep.margin[k] < 0.0 && rep.first_violation < 0)
            rep.first_violation = static_cast<std::ptrdiff_t>(k);
        if (J > 1e-12)
            rep.max_ratio = std::max(rep.max_ratio, (lhs - decay_factor * u0sq) / J);
    }
    return rep;
}

AbsorbingBall absorbing_radius(const GalerkinModel& model, const DiffusionOperator& G,
                               double c_cal) {
    if (!(c_cal > 0.0)) throw ConfigError("absorbing radius: calibration constant must be positive");
    AbsorbingBall ball;
    ball.C_cal = c_cal;
    ball.comp_eta1 = std::pow(G.eta1_norm(), 2.0 / (1.0 - G.p()));
    ball.comp_eta2 = G.eta2_norm() * G.eta2_norm();
    ball.comp_f = model.f_norm_Vstar * model.f_norm_Vstar;
    ball.R2 = c_cal * (ball.comp_eta1 + ball.comp_eta2 + ball.comp_f);
    return ball;
}

AbsorbReport verify_absorbing(const GalerkinModel& model, const DiffusionOperator& G,
                              const noise::NoiseProcess& proc,
                              const std::vector<StateVector>& a0,
                              const std::vector<double>& horizons, double dt,
                              const AbsorbingBall& ball, double eps_zero, unsigned workers) {
    if (a0.empty()) throw ConfigError("verify_absorbing: empty initial set");
    if (horizons.empty()) throw ConfigError("verify_absorbing: no horizons");

    AbsorbReport rep;
    rep.target2 = ball.R2 > 0.0 ? ball.R2 : eps_zero * eps_zero;
    const std::size_t np = a0.size();
    const std::size_t nh = horizons.size();
    std::vector<double> norm2(np * nh, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> died(np * nh, 0);

    const double a = 0.5 * model.nu * model.lambda_1;
    const double norm_sum = ball.comp_eta1 + ball.comp_eta2 + ball.comp_f;

    parallel_for(np * nh, workers, [&](std::size_t idx) {
        const std::size_t i = idx / nh;
        const std::size_t hi = idx % nh;
        try {
            const Trajectory t =
                integrate(model, G, a0[i], -horizons[hi], 0.0, dt, proc);
            const double n = spectral::norm_H(t.states.back());
            norm2[idx] = n * n;
        } catch (const DivergenceError&) {
            died[idx] = 1;
        }
    });

    rep.entry_horizon.assign(np, -1.0);
    rep.worst_norm2.assign(np, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
        bool diverged = false;
        for (std::size_t hi = 0; hi < nh; ++hi) diverged = diverged || died[i * nh + hi];
        if (diverged) {
            rep.divergent.push_back(i);
            continue;
        }
        const double u02 = spectral::norm_H(a0[i]) * spectral::norm_H(a0[i]);
        for (std::size_t hi = 0; hi < nh; ++hi) {
            const double lhs = norm2[i * nh + hi];
            if (norm_sum > 0.0) {
                const double excess = lhs - std::exp(-a * horizons[hi]) * u02;
                rep.max_ratio = std::max(rep.max_ratio, excess / norm_sum);
            }
        }
        for (std::size_t hi = 0; hi < nh; ++hi) {
            bool all_in = true;
            double worst = 0.0;
            for (std::size_t hj = hi; hj < nh; ++hj) {
                all_in = all_in && norm2[i * nh + hj] <= rep.target2;
                worst = std::max(worst, norm2[i * nh + hj]);
            }
            if (all_in) {
                rep.entry_horizon[i] = horizons[hi];
                rep.worst_norm2[i] = worst;
                break;
            }
        }
    }
    rep.all_entered = rep.divergent.empty();
    for (std::size_t i = 0; i < np; ++i)
        rep.all_entered = rep.all_entered && rep.entry_horizon[i] >= 0.0;
    return rep;
}

} // namespace rns::dynamics
