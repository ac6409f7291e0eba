// taes — command-line runner for character-aligned activity selection
// experiments. Subcommands: run, oracle, feasibility.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taes/config.hpp"
#include "taes/envs.hpp"
#include "taes/harness.hpp"
#include "taes/optimizer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void print_distribution(const taes::EmotionSpace& space, const taes::Distribution& d) {
    for (std::size_t i = 0; i < space.size(); ++i)
        std::printf("%s%s=%.6f", i == 0 ? "" : " ", space.trait(i).c_str(), d[i]);
}

std::vector<taes::ExperienceModel> estimate_models(const taes::ExperimentConfig& cfg,
                                                   int episodes) {
    const taes::EmotionSpace space = cfg.space();
    std::vector<taes::ExperienceModel> models;
    models.reserve(cfg.activities.size());
    for (std::size_t a = 0; a < cfg.activities.size(); ++a) {
        taes::RandomStream rng =
            taes::RandomStream::substream(cfg.seed, taes::kLatentStreamBase + a);
        models.push_back(taes::estimate_experience(cfg.activities[a], cfg.evaluator, space,
                                                   episodes, cfg.experience_prior_weight, rng));
    }
    return models;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed) {
    taes::ExperimentConfig cfg = taes::load_experiment_config(config_path);
    cfg.output.directory = taes::resolve_output_directory(out_dir, std::getenv("TAES_OUT"),
                                                          cfg.output.directory);
    if (seed) cfg.seed = *seed;

    const taes::RunSummary summary = taes::run_experiment(cfg);

    std::printf("run complete: %lld episodes, seed %llu\n",
                static_cast<long long>(cfg.horizon),
                static_cast<unsigned long long>(cfg.seed));
    std::printf("  final objective: %.6f nats\n", summary.final_objective);
    std::printf("  TV(trailing p, character): %.4f\n", summary.tv_to_character);
    for (std::size_t a = 0; a < cfg.activities.size(); ++a)
        std::printf("  %-12s q=%.4f plays=%lld\n", cfg.activities[a].id.c_str(),
                    summary.final_q[a], static_cast<long long>(summary.play_counts[a]));
    std::printf("  credits: raw=%.2f weighted=%.2f\n", summary.total_reward_raw,
                summary.total_reward_weighted);
    std::printf("  wrote %s and %s under %s\n", cfg.output.timeline_file.c_str(),
                cfg.output.summary_file.c_str(), cfg.output.directory.c_str());
    return kExitOk;
}

int cmd_oracle(const std::string& config_path, int episodes, double resolution,
               const std::optional<std::uint64_t>& seed) {
    taes::ExperimentConfig cfg = taes::load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    if (cfg.activities.size() > 4)
        throw taes::ConfigError("oracle: grid check supports at most 4 activities");

    const taes::Character character = cfg.character();
    const std::vector<taes::ExperienceModel> models = estimate_models(cfg, episodes);
    for (const auto& m : models) {
        std::printf("latent %-12s ", m.activity().c_str());
        print_distribution(cfg.space(), m.derived());
        std::printf("  (%d episodes)\n", episodes);
    }

    const taes::SolverResult solved = taes::optimize_weights(character, models, cfg.solver);
    const taes::SolverResult lattice = taes::grid_oracle(character, models, resolution);

    std::printf("solver objective: %.9f nats (%d iterations, %s)\n", solved.objective,
                solved.iterations_used, solved.converged ? "converged" : "not converged");
    std::printf("oracle objective: %.9f nats (%d lattice points, spacing %g)\n",
                lattice.objective, lattice.iterations_used, resolution);
    std::printf("gap |solver - oracle|: %.3e\n",
                std::abs(solved.objective - lattice.objective));
    for (std::size_t a = 0; a < models.size(); ++a)
        std::printf("  %-12s q_solver=%.4f q_oracle=%.4f\n", models[a].activity().c_str(),
                    solved.q_star[a], lattice.q_star[a]);
    return kExitOk;
}

int cmd_feasibility(const std::string& config_path, int episodes,
                    const std::optional<std::uint64_t>& seed) {
    taes::ExperimentConfig cfg = taes::load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    const taes::Character character = cfg.character();
    const std::vector<taes::ExperienceModel> models = estimate_models(cfg, episodes);
    for (const auto& m : models) {
        std::printf("latent %-12s ", m.activity().c_str());
        print_distribution(cfg.space(), m.derived());
        std::printf("\n");
    }

    const taes::FeasibilityReport report = taes::feasibility_report(character, models, cfg.solver);
    std::printf("feasible: %s\n", report.feasible ? "yes" : "no");
    std::printf("min objective: %.9f nats\n", report.min_objective);
    for (std::size_t a = 0; a < models.size(); ++a)
        std::printf("  %-12s q=%.4f\n", models[a].activity().c_str(), report.q_star[a]);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taes — align experienced emotions with a target character by "
                 "optimizing activity-selection frequencies"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int episodes = 10000;
    double resolution = 0.01;

    CLI::App* run = app.add_subcommand("run", "run an experiment and write its timeline");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides TAES_OUT and the config)");
    run->add_option("--seed", seed, "seed override");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "compare the solver against the exhaustive lattice oracle");
    oracle->add_option("config", config_path, "experiment config (JSON)")->required();
    oracle->add_option("--episodes", episodes, "episodes per activity for latent estimation");
    oracle->add_option("--resolution", resolution, "lattice spacing in (0, 0.5]");
    oracle->add_option("--seed", seed, "seed override");

    CLI::App* feasibility = app.add_subcommand(
        "feasibility", "report whether the character is reachable by any activity mixture");
    feasibility->add_option("config", config_path, "experiment config (JSON)")->required();
    feasibility->add_option("--episodes", episodes, "episodes per activity for latent estimation");
    feasibility->add_option("--seed", seed, "seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed);
        if (oracle->parsed()) return cmd_oracle(config_path, episodes, resolution, seed);
        if (feasibility->parsed()) return cmd_feasibility(config_path, episodes, seed);
    } catch (const taes::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const taes::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
