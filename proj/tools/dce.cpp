// dce: batch front end for the built-in and user scenarios.
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "dce/error.hpp"
#include "dce/scenario.hpp"

#ifndef DCE_VERSION
#define DCE_VERSION "unknown"
#endif

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_integrity = 3;

int report(const std::string& who, const std::exception& e) {
    std::cerr << "dce: " << (who.empty() ? "" : who + ": ") << e.what() << '\n';
    if (dynamic_cast<const dce::ConfigError*>(&e)) {
        return exit_config;
    }
    if (dynamic_cast<const dce::IntegrityError*>(&e)) {
        return exit_integrity;
    }
    return exit_failure;
}

dce::Overrides collect_overrides(const std::vector<std::string>& overrides, const std::string& amp) {
    dce::Overrides out = overrides;
    if (!amp.empty()) {
        out.push_back("drive.area=" + amp);
    }
    return out;
}

int run_one(const std::string& target, const dce::Overrides& overrides, const dce::RunOptions& options,
            std::mutex& io) {
    try {
        const dce::ScenarioConfig config = dce::parse_config(dce::load_scenario_text(target), overrides);
        const dce::RunSummary summary = dce::run_scenario(config, options);
        std::lock_guard lock(io);
        std::cout << config.name << ": " << summary.files.size() << " files in " << summary.output_dir.string()
                  << " (" << summary.wall_seconds << " s)\n";
        for (const auto& [k, v] : summary.results) {
            std::cout << "  " << k << " = " << v << '\n';
        }
        return exit_ok;
    } catch (const std::exception& e) {
        std::lock_guard lock(io);
        return report(target, e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical Casimir effect optomechanics scenarios"};
    app.set_version_flag("--version", std::string(DCE_VERSION));
    app.require_subcommand(1);

    std::string config_dir = "configs";
    app.add_option("--config-dir", config_dir, "directory searched for user *.cfg scenarios");

    auto* run = app.add_subcommand("run", "run scenarios and write CSV files and a manifest");
    std::vector<std::string> targets;
    std::string out_dir;
    int jobs = 1;
    std::vector<std::string> overrides;
    std::string amp;
    run->add_option("scenario", targets, "built-in name or config file")->required();
    run->add_option("--out", out_dir, "output root; each scenario writes to <out>/<name>");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--override", overrides, "section.key=value applied on top of the config");
    run->add_option("--amp", amp, "pulse area, shorthand for --override drive.area=<expr>");

    auto* list = app.add_subcommand("list", "list built-in and user scenarios");

    auto* check = app.add_subcommand("check", "parse and validate a config, echo resolved settings");
    std::string check_target;
    std::vector<std::string> check_overrides;
    check->add_option("config", check_target, "built-in name or config file")->required();
    check->add_option("--override", check_overrides, "section.key=value applied on top of the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (*list) {
        for (const auto& s : dce::list_scenarios(config_dir)) {
            std::printf("%-8s %-10s %s\n", s.name.c_str(), s.figure.c_str(), s.description.c_str());
        }
        return exit_ok;
    }

    if (*check) {
        try {
            const dce::ScenarioConfig config =
                dce::parse_config(dce::load_scenario_text(check_target), check_overrides);
            for (const auto& [k, v] : config.echo) {
                std::cout << k << " = " << v << '\n';
            }
            if (config.resonance) {
                std::cout << "resonance.omega_c_first_order = " << config.resonance->first_order << '\n';
                std::cout << "resonance.omega_c_refined = " << config.resonance->refined.omega_c_star << '\n';
            }
            return exit_ok;
        } catch (const std::exception& e) {
            return report(check_target, e);
        }
    }

    dce::RunOptions options;
    options.version = DCE_VERSION;
    if (!out_dir.empty()) {
        options.output_root = out_dir;
    }
    const dce::Overrides all_overrides = collect_overrides(overrides, amp);
    std::mutex io;
    if (targets.size() == 1) {
        options.jobs = jobs;
        return run_one(targets.front(), all_overrides, options, io);
    }

    // Independent scenarios share nothing but the output root.
    std::vector<int> codes(targets.size(), exit_ok);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        const int workers = std::min<int>(jobs, static_cast<int>(targets.size()));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < targets.size(); i = next++) {
                    codes[i] = run_one(targets[i], all_overrides, options, io);
                }
            });
        }
    }
    int worst = exit_ok;
    for (int c : codes) {
        if (c == exit_integrity || (c == exit_config && worst != exit_integrity) || (c != exit_ok && worst == exit_ok)) {
            worst = c;
        }
    }
    return worst;
}
