#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "taes/config.hpp"
#include "taes/core.hpp"
#include "taes/envs.hpp"
#include "taes/optimizer.hpp"
#include "taes/policy.hpp"
#include "taes/rng.hpp"

namespace taes {

// Alignment below this objective counts as exact (the character lies in the
// convex hull of the experience distributions).
inline constexpr double kFeasibilityThreshold = 1e-6;

struct FeasibilityReport {
    bool feasible = false;
    double min_objective = 0.0;
    MixtureWeights q_star;
};

/// Diagnoses whether the character can be matched exactly by some mixture of
/// the given experience distributions.
inline FeasibilityReport feasibility_report(const Character& character,
                                            const std::vector<ExperienceModel>& models,
                                            const SolverConfig& config = {}) {
    SolverResult result = optimize_weights(character, models, config);
    return FeasibilityReport{result.objective <= kFeasibilityThreshold, result.objective,
                             std::move(result.q_star)};
}

struct RunSummary {
    std::vector<double> final_q;
    std::vector<double> final_trailing;
    double final_objective = 0.0;     // nats
    double tv_to_character = 0.0;     // TV(trailing p, character)
    std::vector<std::int64_t> play_counts;
    double total_reward_raw = 0.0;
    double total_reward_weighted = 0.0;
    double wall_seconds = 0.0;
};

namespace detail {

// Shortest exact decimal form; CSV rows parse back bit-identically.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Multiplicative solver updates cannot revive an exactly-zero weight, so a
// warm start is floored away from the boundary before being reused.
inline MixtureWeights floor_weights(const MixtureWeights& q, double floor = 1e-9) {
    std::vector<double> v = q.values();
    double sum = 0.0;
    for (double& x : v) {
        x = std::max(x, floor);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return MixtureWeights(std::move(v));
}

}  // namespace detail

/// Output directory precedence: command-line flag, then environment
/// variable, then the config file's own setting.
inline std::string resolve_output_directory(const std::optional<std::string>& flag,
                                            const char* env_value,
                                            const std::string& config_directory) {
    if (flag) return *flag;
    if (env_value != nullptr && env_value[0] != '\0') return env_value;
    return config_directory;
}

/// Runs the full loop for `horizon` episodes: select an activity, simulate
/// and evaluate an episode, update the experience model and the drive
/// window, re-optimize the selection weights, and log one timeline row.
/// Fully deterministic for a given config and seed; two runs produce
/// byte-identical timelines.
inline RunSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const EmotionSpace space = config.space();
    const Character character = config.character();
    const std::size_t n = config.activities.size();
    const std::size_t k = space.size();

    std::vector<ExperienceModel> models;
    models.reserve(n);
    for (const auto& spec : config.activities)
        models.emplace_back(space, spec.id, config.experience_prior_weight);

    MixtureWeights q = MixtureWeights::uniform(n);
    DriveState drive(static_cast<std::size_t>(config.window_length), character);
    RandomStream env_rng = RandomStream::substream(config.seed, kEnvStream);
    RandomStream policy_rng = RandomStream::substream(config.seed, kPolicyStream);

    const std::filesystem::path out_dir(config.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    const std::filesystem::path timeline_path = out_dir / config.output.timeline_file;
    std::ofstream timeline(timeline_path, std::ios::binary | std::ios::trunc);
    if (!timeline) throw IoError("cannot open timeline for writing: " + timeline_path.string());

    timeline << "step,activity_id,mechanism";
    for (const auto& t : space.traits()) timeline << ",emotion_" << t;
    for (const auto& t : space.traits()) timeline << ",trailing_p_" << t;
    for (const auto& a : config.activities) timeline << ",q_" << a.id;
    timeline << ",objective_nats";
    for (const auto& t : space.traits()) timeline << ",drive_" << t;
    timeline << ",reward_raw,reward_weighted\n";

    std::vector<std::int64_t> plays(n, 0);
    double reward_raw_total = 0.0;
    double reward_weighted_total = 0.0;
    double objective = AlignmentObjective(character, models).value(q.values());

    for (std::int64_t step = 1; step <= config.horizon; ++step) {
        const SelectionTrace trace = select_activity(q, models, drive, config.policy, policy_rng);
        const ActivitySpec& spec = config.activities[trace.chosen];

        EpisodeRecord ep = simulate_episode(spec, env_rng);
        Distribution emotion =
            config.policy.utility_mode == UtilityMode::as_emotion
                ? record_utility_emotion(episode_flags(ep, spec, config.evaluator, space),
                                         ep.reward > 0.0, space, config.policy,
                                         config.evaluator.boredom_trait)
                : evaluate_episode(ep, spec, config.evaluator, space);
        ep.emotion = emotion;

        models[trace.chosen] = update_experience(models[trace.chosen], emotion);
        drive = push_episode(drive, character, emotion);
        ++plays[trace.chosen];

        reward_raw_total += ep.reward;
        // Weighted credits use the post-update experience of the activity.
        const double weight = config.policy.utility_mode == UtilityMode::weighted
                                  ? utility_weight(character, models[trace.chosen],
                                                   config.policy.utility_lambda)
                                  : 1.0;
        const double reward_weighted = weight * ep.reward;
        reward_weighted_total += reward_weighted;

        if (step % config.reoptimize_every == 0) {
            const SolverResult result = optimize_weights(character, models, config.solver,
                                                         detail::floor_weights(q));
            q = result.q_star;
        }
        objective = AlignmentObjective(character, models).value(q.values());

        timeline << step << ',' << spec.id << ',' << to_string(trace.mechanism);
        for (std::size_t i = 0; i < k; ++i) timeline << ',' << detail::format_double(emotion[i]);
        for (std::size_t i = 0; i < k; ++i)
            timeline << ',' << detail::format_double(drive.trailing()[i]);
        for (std::size_t a = 0; a < n; ++a) timeline << ',' << detail::format_double(q[a]);
        timeline << ',' << detail::format_double(objective);
        for (std::size_t i = 0; i < k; ++i)
            timeline << ',' << detail::format_double(drive.drive()[i]);
        timeline << ',' << detail::format_double(ep.reward) << ','
                 << detail::format_double(reward_weighted) << '\n';
    }

    timeline.flush();
    if (!timeline) throw IoError("failed writing timeline: " + timeline_path.string());

    const auto t_end = std::chrono::steady_clock::now();

    RunSummary summary;
    summary.final_q = q.values();
    summary.final_trailing = drive.trailing().values();
    summary.final_objective = objective;
    summary.tv_to_character = total_variation(drive.trailing(), character.target());
    summary.play_counts = plays;
    summary.total_reward_raw = reward_raw_total;
    summary.total_reward_weighted = reward_weighted_total;
    summary.wall_seconds = std::chrono::duration<double>(t_end - t_start).count();

    nlohmann::json js;
    js["horizon"] = config.horizon;
    js["seed"] = config.seed;
    for (std::size_t a = 0; a < n; ++a) {
        js["final_q"][config.activities[a].id] = summary.final_q[a];
        js["play_counts"][config.activities[a].id] = summary.play_counts[a];
    }
    for (std::size_t i = 0; i < k; ++i)
        js["final_trailing_p"][space.trait(i)] = summary.final_trailing[i];
    js["final_objective_nats"] = summary.final_objective;
    js["tv_trailing_vs_character"] = summary.tv_to_character;
    js["reward_raw"] = summary.total_reward_raw;
    js["reward_weighted"] = summary.total_reward_weighted;
    js["wall_seconds"] = summary.wall_seconds;

    const std::filesystem::path summary_path = out_dir / config.output.summary_file;
    std::ofstream summary_out(summary_path, std::ios::binary | std::ios::trunc);
    if (!summary_out) throw IoError("cannot open summary for writing: " + summary_path.string());
    summary_out << js.dump(2) << '\n';
    summary_out.flush();
    if (!summary_out) throw IoError("failed writing summary: " + summary_path.string());

    return summary;
}

}  // namespace taes
