// Run configuration: flat key = value sections, strict schema (unknown or
// missing keys abort before any computation), echoed verbatim into every
// report.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rns/attractor.hpp"
#include "rns/dynamics.hpp"
#include "rns/noise.hpp"
#include "rns/spectral.hpp"

namespace rns::cli {

enum class Task { simulate, pullback, attractor, invariance, track, verify, calibrate };

const char* task_name(Task t);
Task task_from_name(const std::string& name);

struct TaskBlock {
    Task name = Task::simulate;
    double dt = 0.0;      // integration step; 0 = path step
    unsigned workers = 0; // 0 = auto; RNS_WORKERS env overrides

    // simulate / track start state
    double tau = 0.0;
    double t_end = 0.0;
    std::string u0 = "zero"; // zero | sphere
    std::size_t u0_index = 0;
    double u0_radius = 1.0;

    // pullback / attractor / invariance / track
    double horizon = 0.0;
    std::vector<double> horizons;
    double eps_stab = 0.0;
    attractor::Metric metric = attractor::Metric::strong;
    std::size_t a0_count = 64;
    double a0_radius = 0.0; // 0 = auto: 2R from the absorbing ball
    double oracle_tol = 0.0;
    std::vector<double> t_push;
    double invariance_tol = 0.0;

    // track
    double t_star = 0.0;
    double window = 1.0;
    double t_back = 0.0;
    double t_fwd = 0.0;
    double eps = 0.0;
    double check_interval = 5.0;
    int t_max = 8;

    // verify / calibrate
    std::size_t runs = 0;
    bool check_halving = false;
    std::size_t diag_members = 6;
    std::size_t diag_records = 401;
};

struct Tolerances {
    double c_res = 0.0;   // 0 = unset
    double c_gron = 0.0;
    double c_absorb = 0.0;
    std::string constants_file;
    std::string constants_file_text; // loaded content, hashed into reports
    double eps_zero = 1e-8;
};

struct RunConfig {
    std::string raw_text;
    std::string source_path;

    // [model]
    int dim = 3;
    int N = 1;
    double nu = 1.0;
    bool advection = true;
    std::vector<spectral::ForcingMode> forcing;

    // [diffusion]
    dynamics::DiffusionSpec diffusion;

    // [noise]
    std::uint64_t seed = 0;
    double delta = 0.5;
    double noise_t_min = 0.0;
    double noise_t_max = 0.0;
    double noise_dt = 0.0;
    noise::InitMode init_mode = noise::InitMode::stationary_draw;

    TaskBlock task;
    Tolerances tol;
    std::string output_dir;

    double integration_dt() const { return task.dt > 0.0 ? task.dt : noise_dt; }
    bool has_constants() const {
        return tol.c_res > 0.0 && tol.c_gron > 0.0 && tol.c_absorb > 0.0;
    }
};

/// Parses and fully validates; throws ConfigError with a field-level
/// message ("[section] key: ...") on the first offense.
RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig load_config(const std::string& path);

spectral::GalerkinModel build_model(const RunConfig& cfg);

} // namespace rns::cli
