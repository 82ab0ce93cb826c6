#include <doctest.h>

#include <cmath>
#include <random>

#include "rns/attractor.hpp"

using namespace rns;
using attractor::AttractorEstimate;
using attractor::Metric;
using attractor::PointCloud;
using dynamics::DiffusionOperator;
using dynamics::DiffusionSpec;
using dynamics::Trajectory;
using noise::InitMode;
using noise::NoiseProcess;
using noise::WienerPath;
using spectral::GalerkinModel;
using spectral::StateVector;

namespace {

// Advection-free 2D model with additive noise: the pullback attractor is
// the singleton a(omega) with an explicit quadrature formula.
struct Toy {
    GalerkinModel model;
    DiffusionOperator G;
    Toy()
        : model(spectral::build_torus_model(2, 1, 1.0, {}, false)),
          G(model, make_spec()) {}
    static DiffusionSpec make_spec() {
        DiffusionSpec spec;
        spec.kind = dynamics::DiffusionKind::additive;
        spec.eta2.push_back({{1, 0, 0}, 0.5, 0.0});
        spec.eta2.push_back({{0, 1, 0}, 0.0, 0.3});
        spec.eta2.push_back({{1, 1, 0}, 0.2, -0.1});
        return spec;
    }
};

NoiseProcess quiet_process(double t_min, double t_max, double dt) {
    const auto n = static_cast<std::size_t>(std::llround((t_max - t_min) / dt)) + 1;
    return NoiseProcess(WienerPath::from_values(0, t_min, dt, std::vector<double>(n, 0.0)), 0.5,
                        InitMode::zero_at_left_edge);
}

StateVector random_state(const GalerkinModel& m, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    StateVector u(m.n_modes());
    for (auto& x : u.c) x = g(rng);
    return u;
}

} // namespace

TEST_CASE("low-discrepancy sphere: deterministic, on-sphere, spread out") {
    const auto a = attractor::low_discrepancy_sphere(16, 7, 2.5);
    const auto b = attractor::low_discrepancy_sphere(16, 7, 2.5);
    REQUIRE(a.size() == 16);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(spectral::norm_H(a[i]) == doctest::Approx(2.5).epsilon(1e-12));
        for (std::size_t j = 0; j < 7; ++j) CHECK(a[i][j] == b[i][j]);
    }
    double min_gap = 10.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            min_gap = std::min(min_gap, spectral::norm_H_diff(a[i], a[j]));
    CHECK(min_gap > 0.1);
}

TEST_CASE("pullback at horizon 0 returns A0 bit-exactly") {
    Toy toy;
    const NoiseProcess proc = quiet_process(-2.0, 1.0, 0.01);
    const auto a0 = attractor::low_discrepancy_sphere(8, toy.model.n_modes(), 2.0);
    const PointCloud cloud =
        attractor::pullback_ensemble(toy.model, toy.G, proc, a0, 0.0, 0.01, 0.0, 1);
    REQUIRE(cloud.points.size() == a0.size());
    for (std::size_t i = 0; i < a0.size(); ++i)
        for (std::size_t j = 0; j < a0[i].size(); ++j) CHECK(cloud.points[i][j] == a0[i][j]);
}

TEST_CASE("free decay: cloud diameter contracts at the Poincare rate") {
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0);
    const DiffusionOperator G(m, DiffusionSpec{});
    const NoiseProcess proc = quiet_process(-6.0, 1.0, 0.01);
    const auto a0 = attractor::low_discrepancy_sphere(6, m.n_modes(), 1.0);
    double diam0 = 0.0;
    for (std::size_t i = 0; i < a0.size(); ++i)
        for (std::size_t j = i + 1; j < a0.size(); ++j)
            diam0 = std::max(diam0, spectral::norm_H_diff(a0[i], a0[j]));
    const PointCloud cloud =
        attractor::pullback_ensemble(m, G, proc, a0, 5.0, 0.01, 0.0, 1);
    double diam = 0.0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.points.size(); ++j)
            diam = std::max(diam, spectral::norm_H_diff(cloud.points[i], cloud.points[j]));
    CHECK(diam <= std::exp(-m.nu * m.lambda_1 * 5.0) * diam0 * 1.001);
}

TEST_CASE("hausdorff distances") {
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0);
    std::mt19937 rng(3);
    SUBCASE("containment gives zero semidistance") {
        std::vector<StateVector> B;
        for (int i = 0; i < 10; ++i) B.push_back(random_state(m, rng));
        const std::vector<StateVector> A(B.begin(), B.begin() + 4);
        CHECK(attractor::hausdorff_semidistance(A, B, Metric::strong) == 0.0);
        CHECK(attractor::hausdorff_semidistance(A, B, Metric::weak) == 0.0);
    }
    SUBCASE("single pair: unit vector vs origin") {
        StateVector e1(m.n_modes());
        e1[0] = 1.0;
        const std::vector<StateVector> A{e1}, B{StateVector(m.n_modes())};
        CHECK(attractor::hausdorff_semidistance(A, B, Metric::strong) == 1.0);
    }
    SUBCASE("matches an exhaustive brute-force recomputation") {
        std::vector<StateVector> A, B;
        for (int i = 0; i < 33; ++i) A.push_back(random_state(m, rng));
        for (int i = 0; i < 17; ++i) B.push_back(random_state(m, rng));
        for (Metric metric : {Metric::strong, Metric::weak}) {
            double brute = 0.0;
            for (const auto& a : A) {
                double inf = 1e300;
                for (const auto& b : B) {
                    const double d = metric == Metric::strong ? spectral::norm_H_diff(a, b)
                                                              : spectral::weak_metric(a, b);
                    inf = std::min(inf, d);
                }
                brute = std::max(brute, inf);
            }
            CHECK(attractor::hausdorff_semidistance(A, B, metric) == brute);
        }
    }
    SUBCASE("empty clouds are rejected") {
        const std::vector<StateVector> empty;
        const std::vector<StateVector> one{StateVector(m.n_modes())};
        CHECK_THROWS_AS(attractor::hausdorff_semidistance(empty, one, Metric::strong), ConfigError);
        CHECK_THROWS_AS(attractor::hausdorff_semidistance(one, empty, Metric::strong), ConfigError);
    }
}

TEST_CASE("omega-limit estimate on the linear toy matches the quadrature oracle") {
    Toy toy;
    const WienerPath path = noise::sample_wiener(42, -45.0, 3.0, 0.005);
    const NoiseProcess proc(path, 0.5);
    const auto a0 = attractor::low_discrepancy_sphere(12, toy.model.n_modes(), 2.0);
    const std::vector<double> horizons{20.0, 25.0, 30.0, 35.0, 40.0};

    const AttractorEstimate est = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, horizons, Metric::strong, 1e-6, 0.005, nullptr, 0.0, 1);
    REQUIRE(est.stabilized);
    REQUIRE(est.cloud.points.size() == a0.size());

    const StateVector oracle = attractor::linear_pullback_fixed_point(
        toy.model, toy.G.constant_coeffs(), proc, 40.0, 0.005);
    for (const auto& p : est.cloud.points)
        for (std::size_t j = 0; j < p.size(); ++j)
            CHECK(std::abs(p[j] - oracle[j]) <= 1e-9);

    // the same estimate stabilizes in the weak metric as well
    const AttractorEstimate weak = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, horizons, Metric::weak, 1e-6, 0.005, nullptr, 0.0, 1);
    CHECK(weak.stabilized);
    CHECK(attractor::hausdorff_distance(est.cloud.points, weak.cloud.points, Metric::strong) <=
          1e-6);
}

TEST_CASE("free decay estimate collapses to the origin") {
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0);
    const DiffusionOperator G(m, DiffusionSpec{});
    const NoiseProcess proc = quiet_process(-30.0, 1.0, 0.01);
    const auto a0 = attractor::low_discrepancy_sphere(8, m.n_modes(), 1.0);
    const AttractorEstimate est = attractor::omega_limit_estimate(
        m, G, proc, a0, {20.0, 22.0, 24.0, 26.0}, Metric::strong, 1e-8, 0.01, nullptr, 0.0, 1);
    REQUIRE(est.stabilized);
    const std::vector<StateVector> origin{StateVector(m.n_modes())};
    CHECK(attractor::hausdorff_distance(est.cloud.points, origin, Metric::strong) <= 1e-8);
}

TEST_CASE("estimate requires enough horizons and positive eps") {
    Toy toy;
    const NoiseProcess proc = quiet_process(-5.0, 1.0, 0.01);
    const auto a0 = attractor::low_discrepancy_sphere(4, toy.model.n_modes(), 1.0);
    CHECK_THROWS_AS(attractor::omega_limit_estimate(toy.model, toy.G, proc, a0, {2.0, 1.0, 3.0, 4.0},
                                                    Metric::strong, 1e-6, 0.01, nullptr, 0.0, 1),
                    ConfigError);
    CHECK_THROWS_AS(attractor::omega_limit_estimate(toy.model, toy.G, proc, a0, {1.0, 2.0, 3.0, 4.0},
                                                    Metric::strong, 0.0, 0.01, nullptr, 0.0, 1),
                    ConfigError);
    // too few pairs for the 3-consecutive rule: inconclusive, not an estimate
    const AttractorEstimate inconclusive = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, {1.0, 2.0, 3.0}, Metric::strong, 1e-12, 0.01, nullptr, 0.0, 1);
    CHECK(!inconclusive.stabilized);
}

TEST_CASE("invariance check") {
    SUBCASE("t = 0 distance vanishes") {
        Toy toy;
        const WienerPath path = noise::sample_wiener(7, -35.0, 3.0, 0.01);
        const NoiseProcess proc(path, 0.5);
        const auto a0 = attractor::low_discrepancy_sphere(6, toy.model.n_modes(), 2.0);
        const AttractorEstimate est = attractor::omega_limit_estimate(
            toy.model, toy.G, proc, a0, {20.0, 24.0, 28.0, 32.0}, Metric::strong, 1e-6, 0.01,
            nullptr, 0.0, 1);
        REQUIRE(est.stabilized);
        const auto rep =
            attractor::invariance_check(toy.model, toy.G, proc, est, a0, 0.0, 0.01, 1);
        CHECK(rep.dist_strong == 0.0);
        CHECK(rep.dist_weak == 0.0);
    }
    SUBCASE("linear toy: pushforward matches the re-estimated fiber") {
        Toy toy;
        const WienerPath path = noise::sample_wiener(11, -35.0, 3.0, 0.01);
        const NoiseProcess proc(path, 0.5);
        const auto a0 = attractor::low_discrepancy_sphere(6, toy.model.n_modes(), 2.0);
        const AttractorEstimate est = attractor::omega_limit_estimate(
            toy.model, toy.G, proc, a0, {20.0, 24.0, 28.0, 32.0}, Metric::strong, 1e-6, 0.01,
            nullptr, 0.0, 1);
        REQUIRE(est.stabilized);
        for (double t : {1.0, 2.0}) {
            const auto rep =
                attractor::invariance_check(toy.model, toy.G, proc, est, a0, t, 0.01, 1);
            CHECK(rep.fiber_stabilized);
            CHECK(rep.dist_strong <= 1e-5);
            CHECK(rep.dist_weak <= 1e-5);
        }
    }
    SUBCASE("free decay: both sides collapse to the origin") {
        const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0);
        const DiffusionOperator G(m, DiffusionSpec{});
        const NoiseProcess proc = quiet_process(-30.0, 3.0, 0.01);
        const auto a0 = attractor::low_discrepancy_sphere(6, m.n_modes(), 1.0);
        const AttractorEstimate est = attractor::omega_limit_estimate(
            m, G, proc, a0, {20.0, 22.0, 24.0, 26.0}, Metric::strong, 1e-8, 0.01, nullptr, 0.0, 1);
        REQUIRE(est.stabilized);
        const auto rep = attractor::invariance_check(m, G, proc, est, a0, 1.0, 0.01, 1);
        CHECK(rep.dist_strong <= 1e-8);
    }
}

TEST_CASE("divergent ensemble members are flagged, the cloud survives") {
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0); // advection on
    const DiffusionOperator G(m, DiffusionSpec{});
    const NoiseProcess proc = quiet_process(-4.0, 1.0, 0.5);
    std::mt19937 rng(5);
    std::vector<StateVector> a0{random_state(m, rng, 0.1), random_state(m, rng, 0.1)};
    for (auto& x : a0[1].c) x *= 1e150; // this member blows up immediately
    const PointCloud cloud = attractor::pullback_ensemble(m, G, proc, a0, 4.0, 0.5, 0.0, 1);
    REQUIRE(cloud.points.size() == 1);
    REQUIRE(cloud.divergent.size() == 1);
    CHECK(cloud.divergent[0] == 1);
    CHECK(cloud.provenance[0] == 0);
    CHECK(std::isfinite(spectral::norm_H(cloud.points[0])));
}

TEST_CASE("semigroup subordination for a deterministic path") {
    // zeta = 0: the flow is autonomous, so R(t+s) equals R(t) after R(s)
    // pointwise and bit-exactly (restartability).
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0,
                                                        {{{1, 0, 0}, {0.0, 0.3, 0.0}, {}}});
    const DiffusionOperator G(m, DiffusionSpec{});
    const NoiseProcess proc = quiet_process(-8.0, 1.0, 0.01);
    const auto a0 = attractor::low_discrepancy_sphere(5, m.n_modes(), 1.0);

    const PointCloud direct = attractor::pullback_ensemble(m, G, proc, a0, 3.0, 0.01, 0.0, 1);
    const PointCloud stage1 = attractor::pullback_ensemble(m, G, proc, a0, 1.0, 0.01, -2.0, 1);
    const PointCloud stage2 =
        attractor::pullback_ensemble(m, G, proc, stage1.points, 2.0, 0.01, 0.0, 1);
    REQUIRE(direct.points.size() == stage2.points.size());
    for (std::size_t i = 0; i < direct.points.size(); ++i)
        for (std::size_t j = 0; j < direct.points[i].size(); ++j)
            CHECK(direct.points[i][j] == stage2.points[i][j]);
}

TEST_CASE("compactness diagnostics") {
    const GalerkinModel m = spectral::build_torus_model(2, 1, 1.0);
    auto make_traj = [&](const StateVector& u0, bool decay) {
        Trajectory t;
        t.tau = 0.0;
        t.dt = 0.1;
        for (int k = 0; k <= 50; ++k) {
            StateVector u = u0;
            if (decay)
                for (std::size_t j = 0; j < u.size(); ++j)
                    u[j] *= std::exp(-m.lambda[j] * t.dt * k);
            t.states.push_back(u);
            const double nh = spectral::norm_H(u);
            t.mon.energy.push_back(0.5 * nh * nh);
            t.mon.dissipation.push_back(0.0);
            t.mon.work_f.push_back(0.0);
            t.mon.work_g.push_back(0.0);
            t.mon.zeta.push_back(0.0);
        }
        return t;
    };
    std::mt19937 rng(8);
    attractor::CompactnessTolerances tol;
    tol.h_values = {0.1, 0.5};
    tol.eps_values = {0.01, 0.1};
    tol.tol_weak = 1e-6;
    tol.tol_strong = 1e-6;

    SUBCASE("constant ensemble: zero modulus, unconstrained delta, fraction 1") {
        std::vector<Trajectory> ensemble{make_traj(random_state(m, rng), false),
                                         make_traj(random_state(m, rng), false)};
        const auto rep = attractor::compactness_diagnostics(ensemble, tol);
        for (const auto& [h, mod] : rep.a1_modulus) CHECK(mod == 0.0);
        for (const auto& row : rep.a2_energy) CHECK(row[1] == doctest::Approx(5.0)); // full window
        CHECK(rep.a3_fraction == 1.0);
    }
    SUBCASE("pure decay: norms nonincreasing, any delta works") {
        std::vector<Trajectory> ensemble{make_traj(random_state(m, rng), true),
                                         make_traj(random_state(m, rng), true)};
        const auto rep = attractor::compactness_diagnostics(ensemble, tol);
        for (const auto& row : rep.a2_energy) {
            CHECK(row[1] == doctest::Approx(5.0));
            CHECK(row[2] <= 0.0);
        }
    }
    SUBCASE("window too short for the requested width is rejected") {
        std::vector<Trajectory> ensemble{make_traj(random_state(m, rng), false),
                                         make_traj(random_state(m, rng), false)};
        attractor::CompactnessTolerances bad = tol;
        bad.h_values = {100.0};
        CHECK_THROWS_AS(attractor::compactness_diagnostics(ensemble, bad), ConfigError);
        CHECK_THROWS_AS(attractor::compactness_diagnostics({ensemble[0]}, tol), ConfigError);
    }
}

TEST_CASE("results do not depend on the worker count") {
    Toy toy;
    const WienerPath path = noise::sample_wiener(17, -30.0, 1.0, 0.01);
    const NoiseProcess proc(path, 0.5);
    const auto a0 = attractor::low_discrepancy_sphere(7, toy.model.n_modes(), 2.0);
    const std::vector<double> horizons{20.0, 22.0, 24.0, 26.0};
    const AttractorEstimate serial = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, horizons, Metric::strong, 1e-6, 0.01, nullptr, 0.0, 1);
    const AttractorEstimate threaded = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, horizons, Metric::strong, 1e-6, 0.01, nullptr, 0.0, 4);
    REQUIRE(serial.cloud.points.size() == threaded.cloud.points.size());
    for (std::size_t i = 0; i < serial.cloud.points.size(); ++i)
        for (std::size_t j = 0; j < serial.cloud.points[i].size(); ++j)
            CHECK(serial.cloud.points[i][j] == threaded.cloud.points[i][j]);
    for (std::size_t h = 0; h < serial.hausdorff_history.size(); ++h)
        CHECK(serial.hausdorff_history[h] == threaded.hausdorff_history[h]);
}

TEST_CASE("estimate containment in the absorbing ball is recorded") {
    Toy toy;
    const WienerPath path = noise::sample_wiener(13, -35.0, 1.0, 0.01);
    const NoiseProcess proc(path, 0.5);
    const auto a0 = attractor::low_discrepancy_sphere(6, toy.model.n_modes(), 2.0);
    const auto ball = dynamics::absorbing_radius(toy.model, toy.G, 50.0);
    const AttractorEstimate est = attractor::omega_limit_estimate(
        toy.model, toy.G, proc, a0, {20.0, 24.0, 28.0, 32.0}, Metric::strong, 1e-6, 0.01, &ball,
        0.0, 1);
    CHECK(est.ball_checked);
    CHECK(est.in_absorbing_ball);
    CHECK(est.max_point_norm2 <= ball.R2);
}
