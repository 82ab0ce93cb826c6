#include "rns/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rns/hash.hpp"

namespace rns::cli {

namespace {
constexpr const char* kConfigMarker = "[config]";
}

RunReport::RunReport(const RunConfig& cfg) : cfg_(cfg) {}

void RunReport::add(const std::string& key, const std::string& value) {
    results_.emplace_back(key, value);
}
void RunReport::add(const std::string& key, double value) { add(key, fmt_g17(value)); }
void RunReport::add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
}
void RunReport::add(const std::string& key, bool value) {
    add(key, value ? std::string("yes") : std::string("no"));
}
void RunReport::warn(const std::string& message) { warnings_.push_back(message); }

std::string RunReport::render() const {
    std::ostringstream os;
    os << "# rns run report\n";
    os << "task = " << task_name(cfg_.task.name) << '\n';
    os << "config_hash = " << hash::git_blob_hash(cfg_.raw_text) << '\n';
    if (!cfg_.tol.constants_file.empty())
        os << "constants_hash = " << hash::git_blob_hash(cfg_.tol.constants_file_text) << '\n';
    os << "steps = " << steps_ << '\n';
    os << "[results]\n";
    for (const auto& [k, v] : results_) os << k << " = " << v << '\n';
    os << "[warnings]\n";
    for (const auto& w : warnings_) os << "- " << w << '\n';
    os << kConfigMarker << '\n';
    os << cfg_.raw_text;
    if (cfg_.raw_text.empty() || cfg_.raw_text.back() != '\n') os << '\n';
    return os.str();
}

void RunReport::write(const std::string& dir, double wall_seconds) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir + "/report.txt");
        if (!os) throw ConfigError("cannot write report in " + dir);
        os << render();
    }
    {
        std::ofstream os(dir + "/timing.txt");
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
        os << "wall_seconds = " << fmt_g17(wall_seconds) << '\n';
        os << "finished_at = " << stamp << '\n';
    }
}

bool verify_report_file(const std::string& dir, std::string* text, std::string* message) {
    std::ifstream is(dir + "/report.txt");
    if (!is) {
        if (message) *message = "no report.txt in " + dir;
        return false;
    }
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string content = buf.str();
    if (text) *text = content;

    const std::string hash_key = "config_hash = ";
    const auto hash_pos = content.find(hash_key);
    const auto marker_pos = content.find(std::string(kConfigMarker) + "\n");
    if (hash_pos == std::string::npos || marker_pos == std::string::npos) {
        if (message) *message = "report.txt is missing the hash or config echo";
        return false;
    }
    const auto hash_end = content.find('\n', hash_pos);
    const std::string recorded =
        content.substr(hash_pos + hash_key.size(), hash_end - hash_pos - hash_key.size());
    std::string echo = content.substr(marker_pos + std::string(kConfigMarker).size() + 1);
    const std::string recomputed = hash::git_blob_hash(echo);
    if (recomputed != recorded) {
        // The echo may have gained a trailing newline on write; retry without it.
        if (!echo.empty() && echo.back() == '\n' &&
            hash::git_blob_hash(echo.substr(0, echo.size() - 1)) == recorded) {
            if (message) *message = "ok";
            return true;
        }
        if (message)
            *message = "config echo hash mismatch: recorded " + recorded + ", recomputed " +
                       recomputed;
        return false;
    }
    if (message) *message = "ok";
    return true;
}

} // namespace rns::cli
