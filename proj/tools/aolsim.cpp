#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "aol/errors.hpp"
#include "aol/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    std::int64_t episodes = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Scenario config file (JSON)");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Override the scenario seed");
    cmd->add_option("--episodes", opts.episodes, "Override the episode count");
    cmd->add_option("--override", opts.overrides,
                    "Dotted-path config override, KEY=VALUE (repeatable)");
}

aol::config::ScenarioConfig load_config(const CommonOpts& opts,
                                        const char* episodes_key) {
    aol::config::ScenarioConfig cfg =
        opts.config_path.empty()
            ? aol::config::ScenarioConfig::defaults()
            : aol::config::ScenarioConfig::load(opts.config_path);
    for (const std::string& ov : opts.overrides) cfg.apply_override(ov);
    if (opts.seed >= 0)
        cfg.apply_override("seed=" + std::to_string(opts.seed));
    if (opts.episodes >= 0)
        cfg.apply_override(std::string(episodes_key) + "=" +
                           std::to_string(opts.episodes));
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    cfg.validate();
    return cfg;
}

int fail(const char* category, const std::string& message) {
    std::fprintf(stderr, "error: {\"category\":\"%s\",\"message\":\"%s\"}\n",
                 category, message.c_str());
    if (std::string(category) == "config") return 2;
    if (std::string(category) == "io") return 3;
    if (std::string(category) == "simulation") return 4;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless networked control co-simulator: age-of-loop "
                 "metrics, TD value learning, and learned bandwidth "
                 "allocation"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string qtable_path = "out/train/qtable.txt";

    CLI::App* sim = app.add_subcommand(
        "simulate", "Run seeded episodes with a fixed policy, write traces");
    add_common(sim, opts);
    CLI::App* learn = app.add_subcommand(
        "learn-value", "Learn the value curve over age bins (all abstractions)");
    add_common(learn, opts);
    CLI::App* train = app.add_subcommand(
        "train", "Train the eps-greedy bandwidth allocation policy");
    add_common(train, opts);
    CLI::App* compare = app.add_subcommand(
        "compare", "Evaluate the trained policy against fixed-deadline baselines");
    add_common(compare, opts);
    compare->add_option("--qtable", qtable_path, "Trained Q-table file");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Evaluate the configured policy across the dt_in sweep");
    add_common(sweep, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            auto cfg = load_config(opts, "simulate.episodes");
            aol::exp::cmd_simulate(cfg, cfg.out_dir);
        } else if (learn->parsed()) {
            auto cfg = load_config(opts, "value_learning.episodes");
            aol::exp::cmd_learn_value(cfg, cfg.out_dir);
        } else if (train->parsed()) {
            auto cfg = load_config(opts, "training.episodes");
            aol::exp::cmd_train(cfg, cfg.out_dir);
        } else if (compare->parsed()) {
            auto cfg = load_config(opts, "evaluation.episodes");
            aol::exp::cmd_compare(cfg, qtable_path, cfg.out_dir);
        } else if (sweep->parsed()) {
            auto cfg = load_config(opts, "evaluation.episodes");
            aol::exp::cmd_sweep(cfg, cfg.out_dir);
        }
    } catch (const aol::ConfigError& e) {
        return fail("config", e.what());
    } catch (const aol::IoError& e) {
        return fail("io", e.what());
    } catch (const aol::SimulationFault& e) {
        return fail("simulation", e.what());
    } catch (const aol::SolverError& e) {
        return fail("simulation", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
