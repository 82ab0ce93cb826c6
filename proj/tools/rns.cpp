// rns: colored-noise Galerkin Navier-Stokes toolkit CLI.
// Exit status: 0 all checks passed, 1 usage/config error, 2 assertion
// failure, 3 divergence.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "rns/config.hpp"
#include "rns/report.hpp"
#include "rns/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pathwise colored-noise Navier-Stokes toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string report_dir;

    const char* tasks[] = {"simulate", "pullback", "attractor", "invariance",
                           "track",    "verify",   "calibrate"};
    for (const char* t : tasks) {
        auto* sub = app.add_subcommand(t, std::string("run a ") + t + " task from a config file");
        sub->add_option("config", config_path, "run configuration file")->required();
    }
    auto* rep = app.add_subcommand("report", "print a run report and verify its config hash");
    rep->add_option("dir", report_dir, "output directory of a previous run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) {
            std::string text, message;
            const bool ok = rns::cli::verify_report_file(report_dir, &text, &message);
            std::fputs(text.c_str(), stdout);
            if (!ok) {
                std::fprintf(stderr, "report check failed: %s\n", message.c_str());
                return 2;
            }
            std::fprintf(stderr, "report check: %s\n", message.c_str());
            return 0;
        }
        const rns::cli::RunConfig cfg = rns::cli::load_config(config_path);
        const std::string requested = app.get_subcommands().front()->get_name();
        if (requested != rns::cli::task_name(cfg.task.name))
            throw rns::ConfigError("[task] name: config declares '" +
                                   std::string(rns::cli::task_name(cfg.task.name)) +
                                   "' but the '" + requested + "' subcommand was invoked");
        const int rc = rns::cli::run_task(cfg);
        std::fprintf(stderr, "%s: exit status %d (report in %s)\n", requested.c_str(), rc,
                     cfg.output_dir.c_str());
        return rc;
    } catch (const rns::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const rns::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
