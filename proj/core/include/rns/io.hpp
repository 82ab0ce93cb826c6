// File formats: noise series (CSV and "RNSW" binary), trajectories ("RNST"
// binary, monitors CSV), point clouds (CSV) and the text manifests.
// Binary layouts are little-endian with fixed headers:
//   RNSW: magic[4] version:u32 n:u64 t_min:f64 dt:f64 delta:f64,
//         then n pairs (omega:f64, zeta:f64)
//   RNST: magic[4] version:u32 flags:u32 n_records:u64 n_coeffs:u64
//         tau:f64 dt:f64, then per record coeffs[n_coeffs] + 5 monitors
//         (E, D, W_f, W_G, zeta); flags bit 0 marks a complete candidate.
#pragma once

#include <string>
#include <vector>

#include "rns/attractor.hpp"
#include "rns/dynamics.hpp"
#include "rns/noise.hpp"
#include "rns/spectral.hpp"

namespace rns::io {

void write_noise_csv(const std::string& file, const noise::NoiseProcess& proc);
void write_noise_bin(const std::string& file, const noise::NoiseProcess& proc);

struct NoiseSeries {
    double t_min = 0.0, dt = 0.0, delta = 0.0;
    std::vector<double> omega, zeta;
};
NoiseSeries read_noise_bin(const std::string& file);

void write_trajectory_bin(const std::string& file, const dynamics::Trajectory& traj);
dynamics::Trajectory read_trajectory_bin(const std::string& file);

void write_monitors_csv(const std::string& file, const dynamics::Trajectory& traj);

void write_cloud_csv(const std::string& file, const attractor::PointCloud& cloud);

void write_model_manifest(const std::string& file, const spectral::GalerkinModel& model);

void write_estimate_manifest(const std::string& file, const attractor::AttractorEstimate& est);

/// StateVector serialization: little-endian f64 array in manifest order.
void write_state_bin(const std::string& file, const spectral::StateVector& u);
spectral::StateVector read_state_bin(const std::string& file);

} // namespace rns::io
