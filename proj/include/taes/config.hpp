#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "taes/core.hpp"
#include "taes/envs.hpp"
#include "taes/optimizer.hpp"
#include "taes/policy.hpp"

namespace taes {

// Invalid configuration -> CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output -> CLI exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string directory = ".";
    std::string timeline_file = "timeline.csv";
    std::string summary_file = "summary.json";
};

/// Everything one experiment needs, loaded from a single JSON file.
struct ExperimentConfig {
    std::vector<std::string> traits;
    std::vector<double> character_target;  // aligned with traits
    std::vector<ActivitySpec> activities;
    EvaluatorConfig evaluator;
    PolicyConfig policy;
    SolverConfig solver;
    int window_length = 50;               // N_a, the trailing window
    double experience_prior_weight = 1.0;
    std::int64_t horizon = 0;              // T, required
    std::int64_t reoptimize_every = 1;
    std::uint64_t seed = 0;
    OutputConfig output;

    EmotionSpace space() const { return EmotionSpace(traits); }
    Character character() const { return Character(space(), Distribution(character_target)); }

    void validate() const {
        try {
            const EmotionSpace s = space();
            const Character c = character();
            (void)c;
            if (activities.empty()) throw ConfigError("config: at least one activity is required");
            for (const auto& a : activities) a.validate();
            for (std::size_t i = 0; i < activities.size(); ++i)
                for (std::size_t j = i + 1; j < activities.size(); ++j)
                    if (activities[i].id == activities[j].id)
                        throw ConfigError("config: duplicate activity id: " + activities[i].id);
            evaluator.validate();
            for (const std::string* t : {&evaluator.satisfaction_trait, &evaluator.challenge_trait,
                                         &evaluator.boredom_trait})
                if (!s.contains(*t))
                    throw ConfigError("config: evaluator trait '" + *t + "' is not in the space");
            policy.validate(s.size());
            if (policy.utility_mode == UtilityMode::as_emotion &&
                !s.contains(policy.utility_trait))
                throw ConfigError("config: utility trait '" + policy.utility_trait +
                                  "' is not in the space");
            solver.validate();
            if (window_length < 1) throw ConfigError("config: window_length must be positive");
            if (!(experience_prior_weight > 0.0))
                throw ConfigError("config: experience_prior_weight must be positive");
            if (horizon < 1) throw ConfigError("config: horizon must be a positive integer");
            if (reoptimize_every < 1)
                throw ConfigError("config: reoptimize_every must be a positive integer");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
};

namespace detail {

inline UtilityMode parse_utility_mode(const std::string& text) {
    if (text == "off") return UtilityMode::off;
    if (text == "weighted") return UtilityMode::weighted;
    if (text == "as_emotion") return UtilityMode::as_emotion;
    throw ConfigError("config: unknown utility_mode '" + text + "'");
}

inline ActivityKind parse_activity_kind(const std::string& text) {
    if (text == "game") return ActivityKind::game;
    if (text == "chat") return ActivityKind::chat;
    throw ConfigError("config: unknown activity kind '" + text + "'");
}

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Parses an experiment configuration from JSON. Missing optional sections
/// keep their defaults; the required keys are traits, character, activities,
/// horizon and seed.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using detail::read_if_present;
    try {
        ExperimentConfig cfg;
        cfg.traits = j.at("traits").get<std::vector<std::string>>();

        const auto& character = j.at("character");
        cfg.character_target.reserve(cfg.traits.size());
        for (const auto& trait : cfg.traits) {
            if (!character.contains(trait))
                throw ConfigError("config: character is missing trait '" + trait + "'");
            cfg.character_target.push_back(character.at(trait).get<double>());
        }
        if (character.size() != cfg.traits.size())
            throw ConfigError("config: character lists a trait that is not in 'traits'");

        for (const auto& ja : j.at("activities")) {
            ActivitySpec spec;
            spec.id = ja.at("id").get<std::string>();
            spec.kind = detail::parse_activity_kind(ja.value("kind", std::string("game")));
            read_if_present(ja, "skill_edge", spec.skill_edge);
            read_if_present(ja, "volatility", spec.volatility);
            read_if_present(ja, "mean_length", spec.mean_length);
            read_if_present(ja, "reward_on_success", spec.reward_on_success);
            cfg.activities.push_back(std::move(spec));
        }

        if (j.contains("evaluator")) {
            const auto& je = j.at("evaluator");
            read_if_present(je, "challenge_threshold", cfg.evaluator.challenge_threshold);
            read_if_present(je, "boredom_floor", cfg.evaluator.boredom_floor);
            read_if_present(je, "boredom_length_factor", cfg.evaluator.boredom_length_factor);
            read_if_present(je, "satisfaction_trait", cfg.evaluator.satisfaction_trait);
            read_if_present(je, "challenge_trait", cfg.evaluator.challenge_trait);
            read_if_present(je, "boredom_trait", cfg.evaluator.boredom_trait);
        }

        if (j.contains("policy")) {
            const auto& jp = j.at("policy");
            read_if_present(jp, "window_length", cfg.window_length);
            read_if_present(jp, "drive_threshold", cfg.policy.drive_threshold);
            read_if_present(jp, "peakedness_threshold", cfg.policy.peakedness_threshold);
            read_if_present(jp, "exploration_epsilon", cfg.policy.exploration_epsilon);
            read_if_present(jp, "min_plays_per_activity", cfg.policy.min_plays_per_activity);
            if (jp.contains("utility_mode"))
                cfg.policy.utility_mode =
                    detail::parse_utility_mode(jp.at("utility_mode").get<std::string>());
            read_if_present(jp, "utility_lambda", cfg.policy.utility_lambda);
            read_if_present(jp, "utility_trait", cfg.policy.utility_trait);
        }

        if (j.contains("solver")) {
            const auto& js = j.at("solver");
            read_if_present(js, "max_iterations", cfg.solver.max_iterations);
            read_if_present(js, "tolerance", cfg.solver.tolerance);
            read_if_present(js, "step_size", cfg.solver.step_size);
        }

        read_if_present(j, "experience_prior_weight", cfg.experience_prior_weight);
        cfg.horizon = j.at("horizon").get<std::int64_t>();
        read_if_present(j, "reoptimize_every", cfg.reoptimize_every);
        cfg.seed = j.at("seed").get<std::uint64_t>();

        if (j.contains("output")) {
            const auto& jo = j.at("output");
            read_if_present(jo, "directory", cfg.output.directory);
            read_if_present(jo, "timeline_file", cfg.output.timeline_file);
            read_if_present(jo, "summary_file", cfg.output.summary_file);
        }

        cfg.validate();
        return cfg;
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return parse_experiment_config(j);
}

}  // namespace taes
