// kslab: runs one experiment pipeline, writes its outputs and manifest, and
// maps the outcome to an exit code (0 all PASS, 1 any FAIL, 2 numerical
// failure, 64 invalid input).
#include <fmt/core.h>

#include <CLI11.hpp>
#include <exception>
#include <string>

#include "ks/config.hpp"
#include "ks/experiments.hpp"
#include "ks/numerics.hpp"

namespace {

constexpr int kExitUsage = 64;

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const CLI::Option* seed, int seed_v, const CLI::Option* grid_n, int grid_v,
        const CLI::Option* modes, int modes_v) {
    ks::Config cfg = config_path.empty() ? ks::Config{} : ks::Config::load(config_path);
    if (*seed) cfg.set("seed", std::to_string(seed_v));
    if (*grid_n) cfg.set("grid.n", std::to_string(grid_v));
    if (*modes) cfg.set("modes", std::to_string(modes_v));
    const std::string dir = out_dir.empty() ? "out/" + command : out_dir;

    const ks::ExperimentResult r = ks::run_command(command, cfg, dir);
    ks::write_manifest(r, cfg, dir);
    for (const auto& c : r.claims)
        fmt::print("{:<5} {:<36} measured={:.6g} expected={:.6g} tol={:.3g}{}{}\n", c.status, c.id,
                   c.measured, c.expected, c.tolerance, c.detail.empty() ? "" : "  ", c.detail);
    fmt::print("manifest: {}/manifest.json\n", dir);
    return r.any_fail() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kslab: 1D cell motility experiments (stationary and traveling-wave stability)"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int seed = 1, grid_n = 256, modes = 64;
    const CLI::Option* seed_opt = app.add_option("--seed", seed, "perturbation seed")->check(CLI::NonNegativeNumber);
    const CLI::Option* grid_opt = app.add_option("--grid-n", grid_n, "grid intervals")->check(CLI::Range(4, 1 << 20));
    const CLI::Option* modes_opt = app.add_option("--modes", modes, "Galerkin modes N")->check(CLI::Range(2, 4096));
    app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default out/<command>)");

    for (const auto& name : ks::command_names()) app.add_subcommand(name, "run the " + name + " pipeline")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, out_dir, seed_opt, seed, grid_opt, grid_n, modes_opt, modes);
    } catch (const ks::DomainError& e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return kExitUsage;
    } catch (const ks::NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
