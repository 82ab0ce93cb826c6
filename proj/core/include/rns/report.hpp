// Deterministic run reports. The main report is byte-identical across
// reruns of the same config; wall-clock and timestamps live in a separate
// sidecar (timing.txt).
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rns/config.hpp"

namespace rns::cli {

class RunReport {
public:
    explicit RunReport(const RunConfig& cfg);

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::uint64_t value);
    void add(const std::string& key, bool value);
    void warn(const std::string& message);
    void count_steps(std::uint64_t steps) { steps_ += steps; }

    /// Deterministic report text (excludes wall-clock).
    std::string render() const;

    /// Writes report.txt and the timing sidecar into dir.
    void write(const std::string& dir, double wall_seconds) const;

private:
    const RunConfig& cfg_;
    std::vector<std::pair<std::string, std::string>> results_;
    std::vector<std::string> warnings_;
    std::uint64_t steps_ = 0;
};

/// Re-reads dir/report.txt, recomputes the config-echo hash and compares it
/// with the recorded one. Returns the report text via *text.
bool verify_report_file(const std::string& dir, std::string* text, std::string* message);

} // namespace rns::cli
