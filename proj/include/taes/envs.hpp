#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taes/core.hpp"
#include "taes/rng.hpp"

namespace taes {

enum class ActivityKind { game, chat };

inline const char* to_string(ActivityKind kind) {
    return kind == ActivityKind::game ? "game" : "chat";
}

/// Synthetic stand-in for one behavioral option (a game server, a chat
/// room). The latent emotion distribution of a spec is whatever the
/// evaluator reads off its episodes.
struct ActivitySpec {
    std::string id;
    ActivityKind kind = ActivityKind::game;
    double skill_edge = 0.0;        // latent advantage, in (-1, 1)
    double volatility = 0.0;        // win-probability step scale, >= 0
    int mean_length = 8;            // plies or exchanges, >= 2
    double reward_on_success = 1.0; // credits

    void validate() const {
        if (id.empty()) throw std::invalid_argument("activity: id must be non-empty");
        if (!(skill_edge > -1.0) || !(skill_edge < 1.0))
            throw std::invalid_argument("activity " + id + ": skill_edge must lie in (-1, 1)");
        if (!(volatility >= 0.0))
            throw std::invalid_argument("activity " + id + ": volatility must be nonnegative");
        if (mean_length < 2)
            throw std::invalid_argument("activity " + id + ": mean_length must be at least 2");
        if (!(reward_on_success >= 0.0))
            throw std::invalid_argument("activity " + id + ": reward_on_success must be nonnegative");
    }
};

/// One completed episode. Games carry the win-probability trajectory the
/// evaluator reads; chats have none. `success` means won (game) or answered
/// (chat).
struct EpisodeRecord {
    std::string activity_id;
    std::vector<double> win_prob_trajectory;
    int length = 0;
    bool success = false;
    double reward = 0.0;
    std::optional<Distribution> emotion;  // filled by the evaluator
};

struct EvaluatorConfig {
    double challenge_threshold = 0.2;    // min win prob below this raises C
    double boredom_floor = 0.7;          // min win prob at or above this raises B
    double boredom_length_factor = 2.0;  // episodes beyond factor*mean_length raise B
    std::string satisfaction_trait = "S";
    std::string challenge_trait = "C";
    std::string boredom_trait = "B";

    void validate() const {
        if (!(challenge_threshold > 0.0) || !(challenge_threshold < 0.5))
            throw std::invalid_argument("evaluator: challenge_threshold must lie in (0, 0.5)");
        if (!(boredom_floor > 0.5) || !(boredom_floor < 1.0))
            throw std::invalid_argument("evaluator: boredom_floor must lie in (0.5, 1)");
        if (!(boredom_length_factor > 1.0))
            throw std::invalid_argument("evaluator: boredom_length_factor must exceed 1");
        if (satisfaction_trait.empty() || challenge_trait.empty() || boredom_trait.empty())
            throw std::invalid_argument("evaluator: trait names must be non-empty");
    }
};

/// Simulates one episode. Game episodes run a clamped Gaussian random walk
/// of win probabilities started at 0.5 + skill_edge/2; the outcome is a
/// Bernoulli draw on the final value. Episode length is geometric around
/// mean_length, clamped to at least 2.
inline EpisodeRecord simulate_episode(const ActivitySpec& spec, RandomStream& rng) {
    spec.validate();
    EpisodeRecord ep;
    ep.activity_id = spec.id;

    const double p_length = 1.0 / static_cast<double>(spec.mean_length);
    ep.length = std::max<int>(2, static_cast<int>(1 + rng.geometric(p_length)));

    const double base = std::clamp(0.5 + spec.skill_edge / 2.0, 0.0, 1.0);
    if (spec.kind == ActivityKind::game) {
        ep.win_prob_trajectory.reserve(static_cast<std::size_t>(ep.length));
        double value = base;
        ep.win_prob_trajectory.push_back(value);
        for (int step = 1; step < ep.length; ++step) {
            value = std::clamp(value + spec.volatility * rng.normal(), 0.0, 1.0);
            ep.win_prob_trajectory.push_back(value);
        }
        ep.success = rng.bernoulli(ep.win_prob_trajectory.back());
    } else {
        ep.success = rng.bernoulli(base);
    }
    ep.reward = ep.success ? spec.reward_on_success : 0.0;
    return ep;
}

/// Raw evaluation flags as a 0/1 vector over the space, no fallback and no
/// normalization:
///   S — the episode was won (game) or answered (chat);
///   C — the win probability dropped below challenge_threshold (games only);
///   B — the win probability never left [boredom_floor, 1] (games only), or
///       the episode ran past boredom_length_factor * mean_length.
inline std::vector<double> episode_flags(const EpisodeRecord& ep, const ActivitySpec& spec,
                                         const EvaluatorConfig& config,
                                         const EmotionSpace& space) {
    config.validate();
    const bool game = spec.kind == ActivityKind::game;
    if (game && ep.win_prob_trajectory.empty())
        throw std::invalid_argument("evaluate: game episode has an empty trajectory");

    std::vector<double> flags(space.size(), 0.0);
    if (ep.success) flags[space.index_of(config.satisfaction_trait)] = 1.0;
    if (game) {
        const double lowest = *std::min_element(ep.win_prob_trajectory.begin(),
                                                ep.win_prob_trajectory.end());
        if (lowest < config.challenge_threshold)
            flags[space.index_of(config.challenge_trait)] = 1.0;
        if (lowest >= config.boredom_floor)
            flags[space.index_of(config.boredom_trait)] = 1.0;
    }
    if (static_cast<double>(ep.length) >
        config.boredom_length_factor * static_cast<double>(spec.mean_length))
        flags[space.index_of(config.boredom_trait)] = 1.0;
    return flags;
}

/// Deterministic emotional evaluation of an episode: unit mass spread
/// uniformly over the raised flags. A flagless episode counts as boring.
inline Distribution evaluate_episode(const EpisodeRecord& ep, const ActivitySpec& spec,
                                     const EvaluatorConfig& config, const EmotionSpace& space) {
    std::vector<double> flags = episode_flags(ep, spec, config, space);
    return distribution_from_flags(std::move(flags), space.index_of(config.boredom_trait));
}

/// Latent-consistency estimate: simulates and evaluates `episodes` episodes
/// of one activity and folds them into a fresh experience model. The derived
/// distribution approximates the activity's latent emotion distribution.
inline ExperienceModel estimate_experience(const ActivitySpec& spec,
                                           const EvaluatorConfig& config,
                                           const EmotionSpace& space, int episodes,
                                           double prior_weight, RandomStream& rng) {
    if (episodes <= 0) throw std::invalid_argument("estimate_experience: episodes must be positive");
    ExperienceModel model(space, spec.id, prior_weight);
    for (int i = 0; i < episodes; ++i) {
        const EpisodeRecord ep = simulate_episode(spec, rng);
        model = update_experience(model, evaluate_episode(ep, spec, config, space));
    }
    return model;
}

}  // namespace taes
