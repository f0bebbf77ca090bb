#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace {

using reichlab::cli::RunConfig;

struct Overrides {
    std::string config_path;
    std::optional<double> tol;
    std::optional<long> window;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App& sub, Overrides& o) {
    sub.add_option("config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub.add_option("--tol", o.tol, "quadrature tolerance");
    sub.add_option("--window", o.window, "side length of the centered cell window");
    sub.add_option("--seed", o.seed, "quasilattice seed");
    sub.add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Overrides& o) {
    RunConfig config = o.config_path.empty() ? RunConfig{} : reichlab::cli::load_config(o.config_path);
    if (o.tol) config.tol = *o.tol;
    if (o.window) config.window_size = *o.window;
    if (o.seed) config.model.seed = *o.seed;
    if (o.out) config.out_dir = *o.out;
    reichlab::cli::validate(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reich sequence laboratory: kernels, partitions of unity and audits"};
    app.require_subcommand(1);
    Overrides overrides;
    auto* kernel = app.add_subcommand("kernel-check", "kernel identities and decay on the configured group");
    auto* build = app.add_subcommand("partition-build", "build the partition atoms and audit them");
    auto* audit = app.add_subcommand("reich-audit", "three-condition audit of phi_n from atoms.csv");
    for (auto* sub : {kernel, build, audit}) add_common(*sub, overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : reichlab::cli::kConfigError;
    }

    RunConfig config;
    try {
        config = resolve(overrides);
    } catch (const reichlab::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return reichlab::cli::kConfigError;
    }

    auto* command = kernel->parsed()  ? &reichlab::cli::cmd_kernel_check
                    : build->parsed() ? &reichlab::cli::cmd_partition_build
                                      : &reichlab::cli::cmd_reich_audit;
    return reichlab::cli::run_guarded(command, config, std::cerr);
}
