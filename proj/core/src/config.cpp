#include "rns/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace rns::cli {

namespace {

struct Entry {
    std::string key, value;
    int line = 0;
    bool used = false;
};
using Section = std::vector<Entry>;

std::string field(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
}

double parse_double(const std::string& v, const std::string& f) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (...) {
        throw ConfigError(f + ": not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(f + ": trailing characters in '" + v + "'");
    if (!std::isfinite(x)) throw ConfigError(f + ": must be finite");
    return x;
}

long long parse_int(const std::string& v, const std::string& f) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (...) {
        throw ConfigError(f + ": not an integer: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(f + ": trailing characters in '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& f) {
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (...) {
        throw ConfigError(f + ": not an unsigned integer: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(f + ": trailing characters in '" + v + "'");
    return x;
}

bool parse_onoff(const std::string& v, const std::string& f) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw ConfigError(f + ": expected on|off, got '" + v + "'");
}

std::vector<std::string> split_ws(const std::string& v) {
    std::istringstream ss(v);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<double> parse_list(const std::string& v, const std::string& f) {
    std::vector<double> out;
    for (const auto& tok : split_ws(v)) out.push_back(parse_double(tok, f));
    if (out.empty()) throw ConfigError(f + ": empty list");
    return out;
}

int parse_small_int(const std::string& tok, const std::string& f) {
    const long long x = parse_int(tok, f);
    if (x < -1000 || x > 1000) throw ConfigError(f + ": wavenumber out of range");
    return static_cast<int>(x);
}

// Pulls entries out of a section with duplicate/unknown detection.
class Fetcher {
public:
    Fetcher(const std::string& name, Section& sec) : name_(name), sec_(sec) {}

    std::string require(const std::string& key) {
        auto v = optional(key);
        if (!v.has_value()) throw ConfigError(field(name_, key) + ": missing required key");
        return *v;
    }

    std::optional<std::string> optional(const std::string& key) {
        Entry* found = nullptr;
        for (auto& e : sec_) {
            if (e.key != key) continue;
            if (found) throw ConfigError(field(name_, key) + ": duplicate key");
            found = &e;
        }
        if (!found) return std::nullopt;
        found->used = true;
        return found->value;
    }

    std::vector<std::string> repeated(const std::string& key) {
        std::vector<std::string> out;
        for (auto& e : sec_) {
            if (e.key != key) continue;
            e.used = true;
            out.push_back(e.value);
        }
        return out;
    }

    void finish() const {
        for (const auto& e : sec_) {
            if (!e.used)
                throw ConfigError(field(name_, e.key) + ": unknown key (line " +
                                  std::to_string(e.line) + ")");
        }
    }

private:
    std::string name_;
    Section& sec_;
};

spectral::ForcingMode parse_forcing_mode(const std::string& v, const std::string& f) {
    const auto toks = split_ws(v);
    if (toks.size() != 9)
        throw ConfigError(f + ": expected 9 numbers (k1 k2 k3, cos amp xyz, sin amp xyz)");
    spectral::ForcingMode fm;
    for (int i = 0; i < 3; ++i) fm.k[static_cast<std::size_t>(i)] = parse_small_int(toks[static_cast<std::size_t>(i)], f);
    for (int i = 0; i < 3; ++i) fm.amp_cos[static_cast<std::size_t>(i)] = parse_double(toks[static_cast<std::size_t>(3 + i)], f);
    for (int i = 0; i < 3; ++i) fm.amp_sin[static_cast<std::size_t>(i)] = parse_double(toks[static_cast<std::size_t>(6 + i)], f);
    return fm;
}

spectral::ScalarTerm parse_scalar_term(const std::string& v, const std::string& f) {
    const auto toks = split_ws(v);
    if (toks.size() != 5)
        throw ConfigError(f + ": expected 5 numbers (k1 k2 k3, cos amp, sin amp)");
    spectral::ScalarTerm t;
    for (int i = 0; i < 3; ++i) t.k[static_cast<std::size_t>(i)] = parse_small_int(toks[static_cast<std::size_t>(i)], f);
    t.amp_cos = parse_double(toks[3], f);
    t.amp_sin = parse_double(toks[4], f);
    return t;
}

void load_constants_file(RunConfig& cfg) {
    std::ifstream is(cfg.tol.constants_file);
    if (!is)
        throw ConfigError("[tolerances] constants_file: cannot open '" + cfg.tol.constants_file +
                          "'");
    std::stringstream buf;
    buf << is.rdbuf();
    cfg.tol.constants_file_text = buf.str();

    std::istringstream lines(cfg.tol.constants_file_text);
    std::string line;
    std::map<std::string, double> vals;
    while (std::getline(lines, line)) {
        const auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line = line.substr(0, hashpos);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "c_res" || key == "c_gron" || key == "c_absorb")
            vals[key] = parse_double(val, "constants_file " + key);
    }
    for (const char* k : {"c_res", "c_gron", "c_absorb"})
        if (!vals.count(k))
            throw ConfigError("[tolerances] constants_file: missing " + std::string(k));
    // Explicit keys in [tolerances] win over the file.
    if (cfg.tol.c_res == 0.0) cfg.tol.c_res = vals["c_res"];
    if (cfg.tol.c_gron == 0.0) cfg.tol.c_gron = vals["c_gron"];
    if (cfg.tol.c_absorb == 0.0) cfg.tol.c_absorb = vals["c_absorb"];
}

const std::set<std::string>& allowed_task_keys(Task t) {
    static const std::set<std::string> common{"name", "dt", "workers"};
    static const std::map<Task, std::set<std::string>> extra{
        {Task::simulate, {"tau", "t_end", "u0", "u0_index", "u0_radius"}},
        {Task::pullback, {"horizon", "a0_count", "a0_radius"}},
        {Task::attractor, {"horizons", "eps_stab", "metric", "a0_count", "a0_radius", "oracle_tol"}},
        {Task::invariance,
         {"horizons", "eps_stab", "metric", "a0_count", "a0_radius", "t_push", "invariance_tol"}},
        {Task::track,
         {"horizons", "eps_stab", "metric", "a0_count", "a0_radius", "t_star", "window", "t_back",
          "t_fwd", "eps", "check_interval", "t_max", "u0", "u0_index", "u0_radius"}},
        {Task::verify,
         {"runs", "t_end", "horizons", "a0_count", "a0_radius", "check_halving", "diag_members",
          "diag_records"}},
        {Task::calibrate, {"runs", "t_end", "horizons", "a0_count", "a0_radius"}},
    };
    static std::map<Task, std::set<std::string>> merged = [] {
        std::map<Task, std::set<std::string>> m;
        for (const auto& [task, keys] : extra) {
            m[task] = keys;
            m[task].insert(common.begin(), common.end());
        }
        return m;
    }();
    return merged.at(t);
}

} // namespace

const char* task_name(Task t) {
    switch (t) {
        case Task::simulate: return "simulate";
        case Task::pullback: return "pullback";
        case Task::attractor: return "attractor";
        case Task::invariance: return "invariance";
        case Task::track: return "track";
        case Task::verify: return "verify";
        case Task::calibrate: return "calibrate";
    }
    return "?";
}

Task task_from_name(const std::string& name) {
    for (Task t : {Task::simulate, Task::pullback, Task::attractor, Task::invariance, Task::track,
                   Task::verify, Task::calibrate})
        if (name == task_name(t)) return t;
    throw ConfigError("[task] name: unknown task '" + name + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
    static const std::set<std::string> known_sections{"model",     "diffusion", "noise",
                                                      "task",      "tolerances", "output"};
    std::map<std::string, Section> sections;
    {
        std::istringstream lines(text);
        std::string line;
        std::string current;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            const auto hashpos = line.find('#');
            if (hashpos != std::string::npos) line = line.substr(0, hashpos);
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto e = line.find_last_not_of(" \t\r");
            line = line.substr(b, e - b + 1);
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                      ": malformed section header");
                current = line.substr(1, line.size() - 2);
                if (!known_sections.count(current))
                    throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                      ": unknown section [" + current + "]");
                sections[current]; // materialize even if empty
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            if (current.empty())
                throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                  ": key outside any section");
            auto trim = [](std::string s) {
                const auto tb = s.find_first_not_of(" \t");
                const auto te = s.find_last_not_of(" \t");
                return tb == std::string::npos ? std::string() : s.substr(tb, te - tb + 1);
            };
            Entry entry;
            entry.key = trim(line.substr(0, eq));
            entry.value = trim(line.substr(eq + 1));
            entry.line = lineno;
            if (entry.key.empty())
                throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
            sections[current].push_back(entry);
        }
    }
    for (const char* required : {"model", "diffusion", "noise", "task", "output"})
        if (!sections.count(required))
            throw ConfigError(source_name + ": missing section [" + std::string(required) + "]");

    RunConfig cfg;
    cfg.raw_text = text;
    cfg.source_path = source_name;

    {
        Fetcher f("model", sections["model"]);
        cfg.dim = static_cast<int>(parse_int(f.require("dim"), field("model", "dim")));
        cfg.N = static_cast<int>(parse_int(f.require("N"), field("model", "N")));
        cfg.nu = parse_double(f.require("nu"), field("model", "nu"));
        if (auto v = f.optional("advection")) cfg.advection = parse_onoff(*v, field("model", "advection"));
        for (const auto& v : f.repeated("forcing_mode"))
            cfg.forcing.push_back(parse_forcing_mode(v, field("model", "forcing_mode")));
        f.finish();
    }
    {
        Fetcher f("diffusion", sections["diffusion"]);
        const std::string kind = f.require("kind");
        if (kind == "additive")
            cfg.diffusion.kind = dynamics::DiffusionKind::additive;
        else if (kind == "power")
            cfg.diffusion.kind = dynamics::DiffusionKind::power;
        else
            throw ConfigError(field("diffusion", "kind") + ": expected additive|power");
        if (auto v = f.optional("p")) cfg.diffusion.p = parse_double(*v, field("diffusion", "p"));
        if (auto v = f.optional("collocation_n"))
            cfg.diffusion.collocation_n =
                static_cast<int>(parse_int(*v, field("diffusion", "collocation_n")));
        for (const auto& v : f.repeated("eta1_term"))
            cfg.diffusion.eta1.push_back(parse_scalar_term(v, field("diffusion", "eta1_term")));
        for (const auto& v : f.repeated("eta2_term"))
            cfg.diffusion.eta2.push_back(parse_scalar_term(v, field("diffusion", "eta2_term")));
        f.finish();
    }
    {
        Fetcher f("noise", sections["noise"]);
        cfg.seed = parse_u64(f.require("seed"), field("noise", "seed"));
        cfg.delta = parse_double(f.require("delta"), field("noise", "delta"));
        cfg.noise_t_min = parse_double(f.require("t_min"), field("noise", "t_min"));
        cfg.noise_t_max = parse_double(f.require("t_max"), field("noise", "t_max"));
        cfg.noise_dt = parse_double(f.require("dt"), field("noise", "dt"));
        if (auto v = f.optional("init_mode")) {
            if (*v == "stationary")
                cfg.init_mode = noise::InitMode::stationary_draw;
            else if (*v == "zero")
                cfg.init_mode = noise::InitMode::zero_at_left_edge;
            else
                throw ConfigError(field("noise", "init_mode") + ": expected stationary|zero");
        }
        f.finish();
    }
    {
        Fetcher f("task", sections["task"]);
        const std::string name = f.require("name");
        cfg.task.name = task_from_name(name);
        const auto& allowed = allowed_task_keys(cfg.task.name);
        for (const auto& e : sections["task"])
            if (!allowed.count(e.key))
                throw ConfigError(field("task", e.key) + ": not a valid key for task '" + name +
                                  "'");
        auto fd = [&](const char* key) { return field("task", key); };
        if (auto v = f.optional("dt")) cfg.task.dt = parse_double(*v, fd("dt"));
        if (auto v = f.optional("workers"))
            cfg.task.workers = static_cast<unsigned>(parse_u64(*v, fd("workers")));
        if (auto v = f.optional("tau")) cfg.task.tau = parse_double(*v, fd("tau"));
        if (auto v = f.optional("t_end")) cfg.task.t_end = parse_double(*v, fd("t_end"));
        if (auto v = f.optional("u0")) cfg.task.u0 = *v;
        if (auto v = f.optional("u0_index"))
            cfg.task.u0_index = static_cast<std::size_t>(parse_u64(*v, fd("u0_index")));
        if (auto v = f.optional("u0_radius")) cfg.task.u0_radius = parse_double(*v, fd("u0_radius"));
        if (auto v = f.optional("horizon")) cfg.task.horizon = parse_double(*v, fd("horizon"));
        if (auto v = f.optional("horizons")) cfg.task.horizons = parse_list(*v, fd("horizons"));
        if (auto v = f.optional("eps_stab")) cfg.task.eps_stab = parse_double(*v, fd("eps_stab"));
        if (auto v = f.optional("metric")) {
            if (*v == "strong")
                cfg.task.metric = attractor::Metric::strong;
            else if (*v == "weak")
                cfg.task.metric = attractor::Metric::weak;
            else
                throw ConfigError(fd("metric") + ": expected strong|weak");
        }
        if (auto v = f.optional("a0_count"))
            cfg.task.a0_count = static_cast<std::size_t>(parse_u64(*v, fd("a0_count")));
        if (auto v = f.optional("a0_radius")) cfg.task.a0_radius = parse_double(*v, fd("a0_radius"));
        if (auto v = f.optional("oracle_tol")) cfg.task.oracle_tol = parse_double(*v, fd("oracle_tol"));
        if (auto v = f.optional("t_push")) cfg.task.t_push = parse_list(*v, fd("t_push"));
        if (auto v = f.optional("invariance_tol"))
            cfg.task.invariance_tol = parse_double(*v, fd("invariance_tol"));
        if (auto v = f.optional("t_star")) cfg.task.t_star = parse_double(*v, fd("t_star"));
        if (auto v = f.optional("window")) cfg.task.window = parse_double(*v, fd("window"));
        if (auto v = f.optional("t_back")) cfg.task.t_back = parse_double(*v, fd("t_back"));
        if (auto v = f.optional("t_fwd")) cfg.task.t_fwd = parse_double(*v, fd("t_fwd"));
        if (auto v = f.optional("eps")) cfg.task.eps = parse_double(*v, fd("eps"));
        if (auto v = f.optional("check_interval"))
            cfg.task.check_interval = parse_double(*v, fd("check_interval"));
        if (auto v = f.optional("t_max"))
            cfg.task.t_max = static_cast<int>(parse_int(*v, fd("t_max")));
        if (auto v = f.optional("runs"))
            cfg.task.runs = static_cast<std::size_t>(parse_u64(*v, fd("runs")));
        if (auto v = f.optional("check_halving"))
            cfg.task.check_halving = parse_onoff(*v, fd("check_halving"));
        if (auto v = f.optional("diag_members"))
            cfg.task.diag_members = static_cast<std::size_t>(parse_u64(*v, fd("diag_members")));
        if (auto v = f.optional("diag_records"))
            cfg.task.diag_records = static_cast<std::size_t>(parse_u64(*v, fd("diag_records")));
        f.finish();
    }
    if (sections.count("tolerances")) {
        Fetcher f("tolerances", sections["tolerances"]);
        if (auto v = f.optional("c_res")) cfg.tol.c_res = parse_double(*v, field("tolerances", "c_res"));
        if (auto v = f.optional("c_gron"))
            cfg.tol.c_gron = parse_double(*v, field("tolerances", "c_gron"));
        if (auto v = f.optional("c_absorb"))
            cfg.tol.c_absorb = parse_double(*v, field("tolerances", "c_absorb"));
        if (auto v = f.optional("constants_file")) cfg.tol.constants_file = *v;
        if (auto v = f.optional("eps_zero"))
            cfg.tol.eps_zero = parse_double(*v, field("tolerances", "eps_zero"));
        f.finish();
    }
    {
        Fetcher f("output", sections["output"]);
        cfg.output_dir = f.require("dir");
        f.finish();
    }

    if (!cfg.tol.constants_file.empty()) load_constants_file(cfg);

    // Cross-field validation: abort before any computation.
    if (!(cfg.nu > 0.0)) throw ConfigError(field("model", "nu") + ": must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta <= 1.0))
        throw ConfigError(field("noise", "delta") + ": must lie in (0, 1]");
    if (!(cfg.noise_dt > 0.0)) throw ConfigError(field("noise", "dt") + ": must be positive");
    if (!(cfg.noise_t_min < 0.0 && cfg.noise_t_max > 0.0))
        throw ConfigError(field("noise", "t_min") + ": requires t_min < 0 < t_max");
    if (!is_grid_multiple(cfg.noise_t_min, cfg.noise_dt) ||
        !is_grid_multiple(cfg.noise_t_max, cfg.noise_dt))
        throw ConfigError(field("noise", "t_min") + ": bounds must be grid multiples of dt");
    const double idt = cfg.integration_dt();
    if (!(idt > 0.0) || !is_grid_multiple(idt, cfg.noise_dt) || grid_index(idt, cfg.noise_dt) < 1)
        throw ConfigError(field("task", "dt") + ": must be a positive grid multiple of noise dt");
    if (cfg.task.a0_count == 0) throw ConfigError(field("task", "a0_count") + ": must be >= 1");
    if (cfg.task.u0 != "zero" && cfg.task.u0 != "sphere")
        throw ConfigError(field("task", "u0") + ": expected zero|sphere");
    for (std::size_t i = 1; i < cfg.task.horizons.size(); ++i)
        if (!(cfg.task.horizons[i] > cfg.task.horizons[i - 1]))
            throw ConfigError(field("task", "horizons") + ": must be strictly increasing");
    for (double h : cfg.task.horizons)
        if (!(h >= 0.0) || !is_grid_multiple(h, idt))
            throw ConfigError(field("task", "horizons") + ": must be nonnegative dt multiples");
    if (cfg.tol.c_res < 0.0 || cfg.tol.c_gron < 0.0 || cfg.tol.c_absorb < 0.0)
        throw ConfigError("[tolerances]: constants must be positive");
    if (!(cfg.tol.eps_zero > 0.0))
        throw ConfigError(field("tolerances", "eps_zero") + ": must be positive");

    auto require_task = [&](bool ok, const char* key, const char* why) {
        if (!ok) throw ConfigError(field("task", key) + ": " + why);
    };
    const TaskBlock& t = cfg.task;
    switch (t.name) {
        case Task::simulate:
            require_task(t.t_end > t.tau, "t_end", "must exceed tau");
            break;
        case Task::pullback:
            require_task(t.horizon > 0.0 && is_grid_multiple(t.horizon, idt), "horizon",
                         "must be a positive dt multiple");
            require_task(t.a0_radius > 0.0 || cfg.has_constants(), "a0_radius",
                         "needed (or provide calibration constants for the auto radius)");
            break;
        case Task::attractor:
        case Task::invariance:
        case Task::track:
            require_task(t.horizons.size() >= 4, "horizons",
                         "need at least 4 horizons to certify stabilization");
            require_task(t.eps_stab > 0.0, "eps_stab", "must be positive");
            require_task(t.a0_radius > 0.0 || cfg.has_constants(), "a0_radius",
                         "needed (or provide calibration constants for the auto radius)");
            if (t.name == Task::invariance)
                require_task(!t.t_push.empty(), "t_push", "missing required key");
            if (t.name == Task::track) {
                require_task(t.t_star > 0.0, "t_star", "must be positive");
                require_task(t.check_interval > 0.0, "check_interval", "must be positive");
                require_task(t.eps > 0.0, "eps", "must be positive");
                require_task(t.t_back > 0.0, "t_back", "must be positive");
                require_task(t.t_fwd >= t.t_star + std::max(t.window, double(t.t_max)), "t_fwd",
                             "must cover t_star plus the comparison window");
                require_task(t.t_max >= 1, "t_max", "must be >= 1");
            }
            break;
        case Task::verify:
            require_task(t.runs >= 2, "runs", "must be >= 2");
            require_task(t.t_end > 0.0, "t_end", "must be positive");
            require_task(!t.horizons.empty(), "horizons", "missing required key");
            require_task(t.diag_members >= 2, "diag_members", "diagnostics need >= 2 members");
            require_task(t.diag_records >= 2, "diag_records", "diagnostics need >= 2 records");
            if (!cfg.has_constants())
                throw ConfigError("[tolerances]: verify needs c_res, c_gron and c_absorb "
                                  "(inline or via constants_file)");
            break;
        case Task::calibrate:
            require_task(t.runs >= 2, "runs", "must be >= 2");
            require_task(t.t_end > 0.0, "t_end", "must be positive");
            require_task(!t.horizons.empty(), "horizons", "missing required key");
            require_task(t.a0_radius > 0.0, "a0_radius", "calibration needs an explicit radius");
            break;
    }
    if (cfg.output_dir.empty()) throw ConfigError(field("output", "dir") + ": must not be empty");

    // Surface model/diffusion construction errors now rather than mid-run.
    const spectral::GalerkinModel model = build_model(cfg);
    (void)dynamics::DiffusionOperator(model, cfg.diffusion);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

spectral::GalerkinModel build_model(const RunConfig& cfg) {
    return spectral::build_torus_model(cfg.dim, cfg.N, cfg.nu, cfg.forcing, cfg.advection);
}

} // namespace rns::cli
