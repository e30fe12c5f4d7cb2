// mokit <task> --config FILE [--seed N] [--out DIR] [--format json|csv] [--timing]
//
// Exit status: 0 all scenario assertions passed, 1 an assertion failed or a
// solver could not meet its contract, 2 usage, parse or precondition error.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mokit/errors.hpp"
#include "mokit/report.hpp"
#include "mokit/scenario.hpp"
#include "mokit/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Musielak-Orlicz space toolkit: conjugates, norms, multipliers, factorization"};
    app.set_version_flag("--version", mokit::kVersion);

    std::string task;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
    bool timing = false;

    std::vector<std::string> tasks(std::begin(mokit::kTasks), std::end(mokit::kTasks));
    app.add_option("task", task, "Task to run")->required()->check(CLI::IsMember(tasks));
    app.add_option("--config", config, "Scenario file")->required();
    app.add_option("--seed", seed, "Seed for all random streams (overrides [run] seed)");
    app.add_option("--out", out_dir, "Directory for the report (default: standard output)");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timing", timing, "Print wall-clock time to standard error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto fmt = format == "csv" ? mokit::Format::Csv : mokit::Format::Json;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const mokit::Scenario sc = mokit::load_scenario(config, task, seed);
        const mokit::Report rep = mokit::run(sc);
        if (out_dir.empty()) {
            std::cout << mokit::render(rep, fmt);
        } else {
            const auto path = mokit::emit(rep, fmt, out_dir);
            std::cerr << "report written to " << path.string() << "\n";
        }
        if (timing) {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            std::cerr << "wall-clock " << dt.count() << " s\n";
        }
        for (const auto& a : rep.assertions) {
            if (!a.passed) std::cerr << "assertion failed: " << a.name << (a.detail.empty() ? "" : ": " + a.detail) << "\n";
        }
        return rep.passed() ? 0 : 1;
    } catch (const mokit::ParseError& e) {
        std::cerr << config << ": " << e.what() << "\n";
        return 2;
    } catch (const mokit::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const mokit::PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 2;
    } catch (const mokit::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
