#include <vector>

#include <CLI11.hpp>

#include "evtrig/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Event-based sampling design for LQG control loops"};
    app.require_subcommand(1);

    evtrig::cli::Options opt;
    std::uint64_t seed = 0;
    std::vector<CLI::Option*> seed_opts;
    auto add_common = [&](CLI::App* sub) {
        seed_opts.push_back(sub->add_option("--seed", seed, "master seed for the simulations"));
        sub->add_option("--config", opt.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_flag("--quiet", opt.quiet, "suppress summaries on stdout");
    };

    CLI::App* design = app.add_subcommand("design", "LQG design, reset system and gamma0");
    CLI::App* bound = app.add_subcommand("bound", "optimal trigger bounds (closed form or grid)");
    CLI::App* tradeoff = app.add_subcommand("tradeoff", "cost versus average sampling period");
    CLI::App* ratio = app.add_subcommand("ratio", "periodic/event slope ratio for A = 0");
    for (CLI::App* sub : {design, bound, tradeoff, ratio}) {
        add_common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : evtrig::cli::Usage;
    }
    for (const CLI::Option* o : seed_opts) {
        if (o->count() > 0) {
            opt.seed = seed;
        }
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return evtrig::cli::run_command(command, opt);
}
