// Two-sided Wiener paths, the time-shift group acting on them, and the
// stationary colored noise zeta_delta evaluated consistently across
// pullback shifts.
//
// A WienerPath is an immutable view over a shared array of Brownian
// samples. Shifting by theta_s re-anchors the view (omega(.+s) - omega(s))
// without copying, so shift composition and the colored-noise cocycle are
// exact in floating point, not merely up to a transient.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rns/common.hpp"

namespace rns::noise {

enum class InitMode { stationary_draw, zero_at_left_edge };

class WienerPath {
public:
    /// Samples a fresh two-sided path on the uniform grid
    /// t_k = t_min + k*dt. Requires t_min < 0 < t_max, both grid-aligned
    /// with dt, so that the grid contains 0; omega(0) = 0 exactly.
    /// Increments are N(0, dt) draws fully determined by (seed, k).
    static WienerPath sample(std::uint64_t seed, double t_min, double t_max, double dt);

    /// Wraps externally supplied samples (testing and file import). The
    /// grid must contain 0; values are re-anchored so omega(0) = 0.
    static WienerPath from_values(std::uint64_t seed, double t_min, double dt,
                                  std::vector<double> values);

    /// theta_s: (theta_s omega)(t) = omega(t+s) - omega(s) on the
    /// overlapping grid. s must be grid-aligned and within the domain.
    WienerPath shifted(double s) const;

    double t_min() const { return t_min_; }
    double t_max() const { return t_min_ + dt_ * static_cast<double>(count_ - 1); }
    double dt() const { return dt_; }
    std::size_t size() const { return count_; }
    std::uint64_t seed() const { return seed_; }
    /// Accumulated shift relative to the originally sampled path.
    double shift() const { return shift_; }

    double time_at(std::size_t i) const { return t_min_ + dt_ * static_cast<double>(i); }
    double value_at(std::size_t i) const { return (*raw_)[offset_ + i] - (*raw_)[anchor_]; }

    /// Grid index of local time t; DomainError if t is off-grid or outside
    /// the stored window.
    std::size_t index_of(double t) const;
    double value(double t) const { return value_at(index_of(t)); }

    std::vector<double> values() const;

    // Shared backing storage; increment k of the backing array is
    // raw()[k+1] - raw()[k] regardless of the view's anchor.
    const std::vector<double>& raw() const { return *raw_; }
    std::size_t raw_offset() const { return offset_; }
    const std::shared_ptr<const std::vector<double>>& raw_handle() const { return raw_; }

private:
    WienerPath() = default;

    std::shared_ptr<const std::vector<double>> raw_;
    std::size_t offset_ = 0; // raw index of local sample 0
    std::size_t count_ = 0;
    std::size_t anchor_ = 0; // raw index of local time 0
    double t_min_ = 0.0;
    double dt_ = 0.0;
    std::uint64_t seed_ = 0;
    double shift_ = 0.0;
};

class NoiseProcess {
public:
    /// Caches zeta over the path's full backing grid using the one-step
    /// recursion
    ///   zeta(t_{k+1}) = e^{-dt/delta} zeta(t_k)
    ///                 + (1/delta) e^{-dt/(2 delta)} (omega(t_{k+1}) - omega(t_k)),
    /// seeded at the backing array's left edge per init_mode. Requires
    /// delta in (0, 1].
    NoiseProcess(WienerPath path, double delta, InitMode mode = InitMode::stationary_draw);

    double delta() const { return delta_; }
    InitMode init_mode() const { return mode_; }
    const WienerPath& path() const { return path_; }

    /// zeta at local grid index i (no bounds tolerance games: exact cache
    /// lookup, identical to on-demand recursion by construction).
    double zeta_at(std::size_t i) const { return (*zeta_raw_)[path_.raw_offset() + i]; }
    /// zeta at local grid time t; DomainError off grid.
    double operator()(double t) const { return zeta_at(path_.index_of(t)); }

    std::vector<double> zeta_values() const;

private:
    WienerPath path_;
    double delta_;
    InitMode mode_;
    std::shared_ptr<const std::vector<double>> zeta_raw_;
};

struct NoiseBoundCertificate {
    double M = 1.0;         // >= sup |zeta| over the window, and >= 1
    double window_lo = 0.0;
    double window_hi = 0.0;
    double max_ratio = 0.0; // max |zeta(t)| / max(1, |t|), sublinear-growth monitor
};

WienerPath sample_wiener(std::uint64_t seed, double t_min, double t_max, double dt);
WienerPath shift_path(const WienerPath& path, double s);
double colored_noise(const NoiseProcess& proc, double t);
NoiseBoundCertificate certify_noise_bound(const NoiseProcess& proc, double t_a, double t_b);

} // namespace rns::noise
