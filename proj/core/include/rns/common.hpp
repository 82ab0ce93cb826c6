// Shared error types, grid arithmetic and deterministic formatting helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace rns {

/// Invalid configuration or malformed input (CLI exit status 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A time lies off the sampled grid, or a requested window leaves the
/// stored path domain. Never extrapolated silently.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite state during integration (CLI exit status 3). Carries the
/// last finite state so the caller can report provenance.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double at_time, std::size_t at_step,
                    std::vector<double> state)
        : std::runtime_error(what), time(at_time), step(at_step),
          last_state(std::move(state)) {}
    double time;
    std::size_t step;
    std::vector<double> last_state;
};

// Grid alignment: a value is on the grid of spacing h when it is within
// `grid_tol` steps of an integer multiple.
inline constexpr double grid_tol = 1e-6;

inline bool is_grid_multiple(double x, double h) {
    const double q = x / h;
    return std::abs(q - std::llround(q)) <= grid_tol;
}

inline std::int64_t grid_index(double x, double h) {
    return std::llround(x / h);
}

/// Deterministic round-trippable float formatting shared by every text
/// artifact (reports must be byte-identical across reruns).
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string fmt_vec(const std::vector<double>& v, char sep = ' ') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(sep);
        out += fmt_g17(v[i]);
    }
    return out;
}

// splitmix64: seed scrambler for deriving independent substreams from one
// user seed (path increments vs. stationary initialization draw).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace rns
