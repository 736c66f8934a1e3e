#include <string>

#include <CLI11.hpp>

#include "vflow/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"point vortices and harmonic flows on closed surfaces"};
    app.require_subcommand(1);

    vflow::RunOptions opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", opt.config_path, "JSON run configuration")
                ->required()
                ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory (default: current)");
        sub->add_option("--threads", opt.threads, "worker threads for independent computations")
            ->check(CLI::PositiveNumber);
    };

    add_common(app.add_subcommand("simulate", "integrate vortex motion on a torus"), true);
    add_common(app.add_subcommand("section", "return-map scan at fixed energy"), true);
    add_common(app.add_subcommand("equilibria", "critical points of the robin function"), true);
    add_common(app.add_subcommand("greens-table", "tabulate a green or robin field"), true);
    add_common(app.add_subcommand("annulus", "reduced vortex motion in a concentric annulus"),
               true);
    add_common(app.add_subcommand("verify", "run the built-in value checks"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    return vflow::dispatch(cmd, opt);
}
