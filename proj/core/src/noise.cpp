#include "rns/noise.hpp"

#include <cmath>
#include <random>

namespace rns::noise {

namespace {

// Normal draws built from raw mt19937_64 output (Box-Muller). The standard
// fully specifies mt19937_64 but not std::normal_distribution, so this
// keeps paths bit-identical across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform01() {
        // 53-bit mantissa, offset so the result is never 0 (log-safe).
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

constexpr std::uint64_t kInitStreamSalt = 0xd1b54a32d192ed03ULL;
constexpr std::size_t kMaxSamples = 100'000'000;

} // namespace

WienerPath WienerPath::sample(std::uint64_t seed, double t_min, double t_max, double dt) {
    if (!std::isfinite(t_min) || !std::isfinite(t_max) || !std::isfinite(dt))
        throw ConfigError("wiener path: non-finite bounds");
    if (dt <= 0.0) throw ConfigError("wiener path: dt must be positive");
    if (!(t_min < 0.0 && 0.0 < t_max))
        throw ConfigError("wiener path: requires t_min < 0 < t_max");
    if (!is_grid_multiple(t_min, dt) || !is_grid_multiple(t_max, dt))
        throw ConfigError("wiener path: t_min and t_max must be grid multiples of dt "
                          "(grid must contain 0; align before sampling)");

    const std::int64_t k_min = grid_index(t_min, dt);
    const std::int64_t k_max = grid_index(t_max, dt);
    const std::size_t n = static_cast<std::size_t>(k_max - k_min) + 1;
    if (n > kMaxSamples) throw ConfigError("wiener path: grid exceeds memory budget");

    GaussianStream stream(seed);
    const double root_dt = std::sqrt(dt);
    auto raw = std::make_shared<std::vector<double>>(n);
    double acc = 0.0;
    (*raw)[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        acc += root_dt * stream.next();
        (*raw)[k] = acc;
    }

    WienerPath p;
    p.raw_ = std::move(raw);
    p.offset_ = 0;
    p.count_ = n;
    p.anchor_ = static_cast<std::size_t>(-k_min);
    p.t_min_ = static_cast<double>(k_min) * dt;
    p.dt_ = dt;
    p.seed_ = seed;
    p.shift_ = 0.0;
    return p;
}

WienerPath WienerPath::from_values(std::uint64_t seed, double t_min, double dt,
                                   std::vector<double> values) {
    if (dt <= 0.0) throw ConfigError("wiener path: dt must be positive");
    if (values.empty()) throw ConfigError("wiener path: empty sample array");
    if (!is_grid_multiple(t_min, dt))
        throw ConfigError("wiener path: t_min must be a grid multiple of dt");
    const std::int64_t k_min = grid_index(t_min, dt);
    if (k_min > 0 || k_min + static_cast<std::int64_t>(values.size()) - 1 < 0)
        throw ConfigError("wiener path: grid must contain t = 0");

    WienerPath p;
    p.raw_ = std::make_shared<std::vector<double>>(std::move(values));
    p.offset_ = 0;
    p.count_ = p.raw_->size();
    p.anchor_ = static_cast<std::size_t>(-k_min);
    p.t_min_ = static_cast<double>(k_min) * dt;
    p.dt_ = dt;
    p.seed_ = seed;
    p.shift_ = 0.0;
    return p;
}

std::size_t WienerPath::index_of(double t) const {
    const double local = t - t_min_;
    if (!is_grid_multiple(local, dt_))
        throw DomainError("path time " + fmt_g17(t) + " is off the sampled grid");
    const std::int64_t i = grid_index(local, dt_);
    if (i < 0 || i >= static_cast<std::int64_t>(count_))
        throw DomainError("path time " + fmt_g17(t) + " outside stored window [" +
                          fmt_g17(t_min()) + ", " + fmt_g17(t_max()) + "]");
    return static_cast<std::size_t>(i);
}

WienerPath WienerPath::shifted(double s) const {
    if (!is_grid_multiple(s, dt_))
        throw DomainError("shift " + fmt_g17(s) + " is not a grid multiple of dt");
    const std::int64_t m = grid_index(s, dt_);
    const std::int64_t new_anchor = static_cast<std::int64_t>(anchor_) + m;
    if (new_anchor < static_cast<std::int64_t>(offset_) ||
        new_anchor >= static_cast<std::int64_t>(offset_ + count_))
        throw DomainError("shift " + fmt_g17(s) + " leaves the stored path window");

    WienerPath p(*this);
    p.anchor_ = static_cast<std::size_t>(new_anchor);
    p.t_min_ = t_min_ - static_cast<double>(m) * dt_;
    p.shift_ = shift_ + static_cast<double>(m) * dt_;
    return p;
}

std::vector<double> WienerPath::values() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = value_at(i);
    return out;
}

NoiseProcess::NoiseProcess(WienerPath path, double delta, InitMode mode)
    : path_(std::move(path)), delta_(delta), mode_(mode) {
    if (!(delta > 0.0) || delta > 1.0)
        throw ConfigError("noise process: delta must lie in (0, 1]");

    const auto& raw = path_.raw();
    const double h = path_.dt();
    const double decay = std::exp(-h / delta);
    const double gain = std::exp(-h / (2.0 * delta)) / delta;

    auto zeta = std::make_shared<std::vector<double>>(raw.size());
    double z = 0.0;
    if (mode_ == InitMode::stationary_draw) {
        GaussianStream init(path_.seed() ^ kInitStreamSalt);
        z = init.next() * std::sqrt(1.0 / (2.0 * delta));
    }
    (*zeta)[0] = z;
    for (std::size_t k = 1; k < raw.size(); ++k) {
        z = decay * z + gain * (raw[k] - raw[k - 1]);
        (*zeta)[k] = z;
    }
    zeta_raw_ = std::move(zeta);
}

std::vector<double> NoiseProcess::zeta_values() const {
    std::vector<double> out(path_.size());
    for (std::size_t i = 0; i < path_.size(); ++i) out[i] = zeta_at(i);
    return out;
}

WienerPath sample_wiener(std::uint64_t seed, double t_min, double t_max, double dt) {
    return WienerPath::sample(seed, t_min, t_max, dt);
}

WienerPath shift_path(const WienerPath& path, double s) { return path.shifted(s); }

double colored_noise(const NoiseProcess& proc, double t) { return proc(t); }

NoiseBoundCertificate certify_noise_bound(const NoiseProcess& proc, double t_a, double t_b) {
    if (!(t_a <= t_b)) throw ConfigError("noise bound: empty window");
    const auto& path = proc.path();
    const std::size_t lo = path.index_of(t_a);
    const std::size_t hi = path.index_of(t_b);

    NoiseBoundCertificate cert;
    cert.window_lo = t_a;
    cert.window_hi = t_b;
    double sup = 0.0;
    double ratio = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double z = std::abs(proc.zeta_at(i));
        sup = std::max(sup, z);
        const double t = std::abs(path.time_at(i));
        ratio = std::max(ratio, z / std::max(1.0, t));
    }
    cert.M = std::max(1.0, sup);
    cert.max_ratio = ratio;
    return cert;
}

} // namespace rns::noise
