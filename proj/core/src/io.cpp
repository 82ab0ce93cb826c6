#include "rns/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace rns::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts are unsupported");

namespace {

std::ofstream open_out(const std::string& file, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(file, mode);
    if (!os) throw ConfigError("cannot open for writing: " + file);
    return os;
}

std::ifstream open_in(const std::string& file, std::ios::openmode mode = std::ios::in) {
    std::ifstream is(file, mode);
    if (!is) throw ConfigError("cannot open for reading: " + file);
    return is;
}

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::string& file) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("truncated binary file: " + file);
    return v;
}

constexpr char kNoiseMagic[4] = {'R', 'N', 'S', 'W'};
constexpr char kTrajMagic[4] = {'R', 'N', 'S', 'T'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kFlagCompleteCandidate = 1u;

const char* phase_name(spectral::Phase p) {
    return p == spectral::Phase::cos ? "cos" : "sin";
}

} // namespace

void write_noise_csv(const std::string& file, const noise::NoiseProcess& proc) {
    std::ofstream os = open_out(file);
    os << "t,omega,zeta\n";
    const auto& path = proc.path();
    for (std::size_t i = 0; i < path.size(); ++i)
        os << fmt_g17(path.time_at(i)) << ',' << fmt_g17(path.value_at(i)) << ','
           << fmt_g17(proc.zeta_at(i)) << '\n';
}

void write_noise_bin(const std::string& file, const noise::NoiseProcess& proc) {
    std::ofstream os = open_out(file, std::ios::binary);
    os.write(kNoiseMagic, 4);
    put(os, kFormatVersion);
    const auto& path = proc.path();
    put(os, static_cast<std::uint64_t>(path.size()));
    put(os, path.t_min());
    put(os, path.dt());
    put(os, proc.delta());
    for (std::size_t i = 0; i < path.size(); ++i) {
        put(os, path.value_at(i));
        put(os, proc.zeta_at(i));
    }
}

NoiseSeries read_noise_bin(const std::string& file) {
    std::ifstream is = open_in(file, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kNoiseMagic, 4) != 0)
        throw ConfigError("not a noise series file: " + file);
    if (get<std::uint32_t>(is, file) != kFormatVersion)
        throw ConfigError("unsupported noise file version: " + file);
    NoiseSeries s;
    const auto n = get<std::uint64_t>(is, file);
    s.t_min = get<double>(is, file);
    s.dt = get<double>(is, file);
    s.delta = get<double>(is, file);
    s.omega.resize(n);
    s.zeta.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        s.omega[i] = get<double>(is, file);
        s.zeta[i] = get<double>(is, file);
    }
    return s;
}

void write_trajectory_bin(const std::string& file, const dynamics::Trajectory& traj) {
    std::ofstream os = open_out(file, std::ios::binary);
    os.write(kTrajMagic, 4);
    put(os, kFormatVersion);
    put(os, traj.complete_candidate ? kFlagCompleteCandidate : 0u);
    put(os, static_cast<std::uint64_t>(traj.n_records()));
    const std::uint64_t m = traj.states.empty() ? 0 : traj.states.front().size();
    put(os, m);
    put(os, traj.tau);
    put(os, traj.dt);
    for (std::size_t k = 0; k < traj.n_records(); ++k) {
        os.write(reinterpret_cast<const char*>(traj.states[k].c.data()),
                 static_cast<std::streamsize>(sizeof(double) * m));
        put(os, traj.mon.energy[k]);
        put(os, traj.mon.dissipation[k]);
        put(os, traj.mon.work_f[k]);
        put(os, traj.mon.work_g[k]);
        put(os, traj.mon.zeta[k]);
    }
}

dynamics::Trajectory read_trajectory_bin(const std::string& file) {
    std::ifstream is = open_in(file, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kTrajMagic, 4) != 0)
        throw ConfigError("not a trajectory file: " + file);
    if (get<std::uint32_t>(is, file) != kFormatVersion)
        throw ConfigError("unsupported trajectory file version: " + file);
    const std::uint32_t flags = get<std::uint32_t>(is, file);
    const auto n = get<std::uint64_t>(is, file);
    const auto m = get<std::uint64_t>(is, file);
    dynamics::Trajectory traj;
    traj.complete_candidate = (flags & kFlagCompleteCandidate) != 0;
    traj.tau = get<double>(is, file);
    traj.dt = get<double>(is, file);
    traj.states.resize(n, spectral::StateVector(m));
    traj.mon.energy.resize(n);
    traj.mon.dissipation.resize(n);
    traj.mon.work_f.resize(n);
    traj.mon.work_g.resize(n);
    traj.mon.zeta.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        is.read(reinterpret_cast<char*>(traj.states[k].c.data()),
                static_cast<std::streamsize>(sizeof(double) * m));
        traj.mon.energy[k] = get<double>(is, file);
        traj.mon.dissipation[k] = get<double>(is, file);
        traj.mon.work_f[k] = get<double>(is, file);
        traj.mon.work_g[k] = get<double>(is, file);
        traj.mon.zeta[k] = get<double>(is, file);
        if (!is) throw ConfigError("truncated trajectory file: " + file);
    }
    return traj;
}

void write_monitors_csv(const std::string& file, const dynamics::Trajectory& traj) {
    std::ofstream os = open_out(file);
    os << "t,E,D,W_f,W_G,zeta\n";
    for (std::size_t k = 0; k < traj.n_records(); ++k)
        os << fmt_g17(traj.time_at(k)) << ',' << fmt_g17(traj.mon.energy[k]) << ','
           << fmt_g17(traj.mon.dissipation[k]) << ',' << fmt_g17(traj.mon.work_f[k]) << ','
           << fmt_g17(traj.mon.work_g[k]) << ',' << fmt_g17(traj.mon.zeta[k]) << '\n';
}

void write_cloud_csv(const std::string& file, const attractor::PointCloud& cloud) {
    std::ofstream os = open_out(file);
    os << "point_id,horizon";
    const std::size_t m = cloud.points.empty() ? 0 : cloud.points.front().size();
    for (std::size_t j = 0; j < m; ++j) os << ",coeff_" << j;
    os << '\n';
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        os << cloud.provenance[i] << ',' << fmt_g17(cloud.horizon);
        for (std::size_t j = 0; j < m; ++j) os << ',' << fmt_g17(cloud.points[i][j]);
        os << '\n';
    }
}

void write_model_manifest(const std::string& file, const spectral::GalerkinModel& model) {
    std::ofstream os = open_out(file);
    os << "# galerkin model manifest\n";
    os << "dim = " << model.dim << '\n';
    os << "cutoff = " << model.cutoff << '\n';
    os << "nu = " << fmt_g17(model.nu) << '\n';
    os << "advection = " << (model.advection ? "on" : "off") << '\n';
    os << "n_modes = " << model.n_modes() << '\n';
    os << "n_wavevectors = " << model.wavevectors.size() << '\n';
    os << "lambda_1 = " << fmt_g17(model.lambda_1) << '\n';
    os << "f_norm_Vstar = " << fmt_g17(model.f_norm_Vstar) << '\n';
    os << "forcing_projected = " << (model.forcing_projected ? "yes" : "no") << '\n';
    os << "# mode ordering: index k1 k2 k3 polarization phase lambda f_coeff\n";
    for (std::size_t j = 0; j < model.modes.size(); ++j) {
        const auto& mo = model.modes[j];
        os << "mode " << j << " = " << mo.k[0] << ' ' << mo.k[1] << ' ' << mo.k[2] << ' '
           << mo.polarization << ' ' << phase_name(mo.phase) << ' ' << fmt_g17(mo.lambda) << ' '
           << fmt_g17(model.f_coeffs[j]) << '\n';
    }
}

void write_estimate_manifest(const std::string& file, const attractor::AttractorEstimate& est) {
    std::ofstream os = open_out(file);
    os << "# attractor estimate manifest\n";
    os << "metric = " << (est.metric == attractor::Metric::strong ? "strong" : "weak") << '\n';
    os << "eps_stab = " << fmt_g17(est.eps_stab) << '\n';
    os << "stabilized = " << (est.stabilized ? "yes" : "no") << '\n';
    os << "horizons = " << fmt_vec(est.horizons_used) << '\n';
    os << "hausdorff_history = " << fmt_vec(est.hausdorff_history) << '\n';
    os << "points = " << est.cloud.points.size() << '\n';
    os << "divergent_members = " << est.cloud.divergent.size() << '\n';
    os << "omega_seed = " << est.cloud.omega_seed << '\n';
    os << "omega_shift = " << fmt_g17(est.cloud.omega_shift) << '\n';
    os << "max_point_norm2 = " << fmt_g17(est.max_point_norm2) << '\n';
    os << "absorbing_ball_checked = " << (est.ball_checked ? "yes" : "no") << '\n';
    os << "in_absorbing_ball = " << (est.in_absorbing_ball ? "yes" : "no") << '\n';
}

void write_state_bin(const std::string& file, const spectral::StateVector& u) {
    std::ofstream os = open_out(file, std::ios::binary);
    os.write(reinterpret_cast<const char*>(u.c.data()),
             static_cast<std::streamsize>(sizeof(double) * u.size()));
}

spectral::StateVector read_state_bin(const std::string& file) {
    std::ifstream is = open_in(file, std::ios::binary);
    is.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(is.tellg());
    is.seekg(0);
    if (bytes % sizeof(double) != 0) throw ConfigError("bad state file size: " + file);
    spectral::StateVector u(bytes / sizeof(double));
    is.read(reinterpret_cast<char*>(u.c.data()), static_cast<std::streamsize>(bytes));
    if (!is) throw ConfigError("truncated state file: " + file);
    return u;
}

} // namespace rns::io
