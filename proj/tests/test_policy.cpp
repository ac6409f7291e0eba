#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "taes/core.hpp"
#include "taes/policy.hpp"
#include "taes/rng.hpp"

#include "support.hpp"

using namespace taes;

namespace {

const EmotionSpace kSpace3({"S", "C", "B"});
const EmotionSpace kSpace4({"S", "C", "B", "U"});

PolicyConfig quiet_policy() {
    // No exploration, no override: selection is purely stochastic.
    PolicyConfig cfg;
    cfg.exploration_epsilon = 0.0;
    cfg.min_plays_per_activity = 0;
    cfg.drive_threshold = 1.0;  // |M_k| <= max(P_k, 1 - P_k) < 1, can never trigger
    return cfg;
}

std::vector<ExperienceModel> seeded_models(const std::vector<std::vector<double>>& probs) {
    std::vector<ExperienceModel> models;
    for (std::size_t a = 0; a < probs.size(); ++a)
        models.push_back(testutil::model_from_probs(kSpace3, "m" + std::to_string(a), probs[a],
                                                    10.0));  // 10 plays each
    return models;
}

}  // namespace

TEST_CASE("drive state starts neutral") {
    const Character character(kSpace3, Distribution({0.4, 0.35, 0.25}));
    const DriveState state(50, character);
    REQUIRE(state.history().empty());
    for (double m : state.drive()) REQUIRE(m == 0.0);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(state.trailing()[i] == character.target()[i]);
    REQUIRE_THROWS_AS(DriveState(0, character), std::invalid_argument);
}

TEST_CASE("a push recomputes trailing mean and drives") {
    const Character character(kSpace3, Distribution::uniform(3));
    DriveState state(50, character);
    state = push_episode(state, character, Distribution({0.5, 0.3, 0.2}));
    // M = (1/3 - 0.5, 1/3 - 0.3, 1/3 - 0.2)
    REQUIRE(std::abs(state.drive()[0] - (-1.0 / 6.0)) <= 1e-12);
    REQUIRE(std::abs(state.drive()[1] - (1.0 / 30.0)) <= 1e-12);
    REQUIRE(std::abs(state.drive()[2] - (2.0 / 15.0)) <= 1e-12);

    REQUIRE_THROWS_AS(push_episode(state, character, Distribution::uniform(4)),
                      std::invalid_argument);
}

TEST_CASE("window is FIFO with bounded length") {
    const Character character(kSpace3, Distribution::uniform(3));
    DriveState state(3, character);
    const std::vector<Distribution> pushes = {
        Distribution({1.0, 0.0, 0.0}), Distribution({1.0, 0.0, 0.0}),
        Distribution({0.0, 1.0, 0.0}), Distribution({0.0, 0.0, 1.0}),
        Distribution({0.0, 1.0, 0.0})};
    for (const auto& v : pushes) state = push_episode(state, character, v);
    REQUIRE(state.history().size() == 3);
    // last three pushes: C, B, C
    REQUIRE(std::abs(state.trailing()[1] - 2.0 / 3.0) <= 1e-12);
    REQUIRE(std::abs(state.trailing()[2] - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("drives always sum to zero") {
    RandomStream rng(6174);
    const Character character(kSpace3, testutil::random_strict_distribution(rng, 3));
    DriveState state(50, character);
    for (int i = 0; i < 1000; ++i) {
        state = push_episode(state, character, Distribution(testutil::dirichlet(rng, 3)));
        double sum = 0.0;
        for (double m : state.drive()) sum += m;
        REQUIRE(std::abs(sum) <= 1e-12);
    }
}

TEST_CASE("degenerate weights select the single supported activity") {
    const Character character(kSpace3, Distribution::uniform(3));
    const DriveState state(50, character);
    RandomStream rng(1);
    const SelectionTrace trace = select_activity(
        MixtureWeights({1.0, 0.0, 0.0}),
        seeded_models({{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}}), state,
        quiet_policy(), rng);
    REQUIRE(trace.chosen == 0);
    REQUIRE(trace.mechanism == SelectionMechanism::stochastic);
}

TEST_CASE("selection requires at least one activity") {
    const Character character(kSpace3, Distribution::uniform(3));
    const DriveState state(50, character);
    RandomStream rng(1);
    REQUIRE_THROWS_AS(
        select_activity(MixtureWeights({1.0}), {}, state, quiet_policy(), rng),
        std::invalid_argument);
}

TEST_CASE("a large drive overrides stochastic selection") {
    // One push of (0.2, 0.3, 0.5) against target (0.5, 0.2, 0.3)
    // gives M = (0.3, -0.1, -0.2): emotion S is under-experienced.
    const Character character(kSpace3, Distribution({0.5, 0.2, 0.3}));
    DriveState state(50, character);
    state = push_episode(state, character, Distribution({0.2, 0.3, 0.5}));

    PolicyConfig cfg = quiet_policy();
    cfg.drive_threshold = 0.25;

    SECTION("peaked activities compete on p_k") {
        const auto models = seeded_models({{0.8, 0.1, 0.1}, {0.2, 0.3, 0.5}});
        RandomStream rng(7);
        const SelectionTrace trace =
            select_activity(MixtureWeights({0.0, 1.0}), models, state, cfg, rng);
        REQUIRE(trace.mechanism == SelectionMechanism::drive_override);
        REQUIRE(trace.chosen == 0);  // p_S = 0.8 beats 0.2, despite q favoring activity 1
        REQUIRE(trace.rng_draws_used == 0);
    }

    SECTION("flat distributions cannot be overridden toward") {
        const auto models =
            seeded_models({{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
        RandomStream rng(7);
        const SelectionTrace trace =
            select_activity(MixtureWeights({0.0, 1.0}), models, state, cfg, rng);
        REQUIRE(trace.mechanism == SelectionMechanism::stochastic);
        REQUIRE(trace.chosen == 1);
    }

    SECTION("negative drive picks the activity least likely to feed emotion k") {
        // flip the push so M_S = -0.3 and S is over-experienced
        const Character flipped(kSpace3, Distribution({0.2, 0.3, 0.5}));
        DriveState over(50, flipped);
        over = push_episode(over, flipped, Distribution({0.5, 0.2, 0.3}));
        const auto models = seeded_models({{0.8, 0.1, 0.1}, {0.5, 0.2, 0.3}});
        RandomStream rng(7);
        const SelectionTrace trace =
            select_activity(MixtureWeights({1.0, 0.0}), models, over, cfg, rng);
        REQUIRE(trace.mechanism == SelectionMechanism::drive_override);
        REQUIRE(trace.chosen == 1);  // p_S = 0.5 is the smaller
    }
}

TEST_CASE("override choice is stable when the winner grows more peaked") {
    const Character character(kSpace3, Distribution({0.5, 0.2, 0.3}));
    DriveState state(50, character);
    state = push_episode(state, character, Distribution({0.2, 0.3, 0.5}));
    PolicyConfig cfg = quiet_policy();
    cfg.drive_threshold = 0.25;

    for (double boost : {0.8, 0.85, 0.9, 0.95}) {
        const auto models =
            seeded_models({{boost, (1.0 - boost) / 2, (1.0 - boost) / 2}, {0.6, 0.2, 0.2}});
        RandomStream rng(7);
        const SelectionTrace trace =
            select_activity(MixtureWeights({0.5, 0.5}), models, state, cfg, rng);
        REQUIRE(trace.chosen == 0);
    }
}

TEST_CASE("under-played activities are explored first") {
    const Character character(kSpace3, Distribution::uniform(3));
    const DriveState state(50, character);
    PolicyConfig cfg = quiet_policy();
    cfg.min_plays_per_activity = 3;

    std::vector<ExperienceModel> models = {
        testutil::model_from_probs(kSpace3, "played", {0.5, 0.3, 0.2}, 10.0),
        ExperienceModel(kSpace3, "fresh", 1.0)};
    RandomStream rng(11);
    const SelectionTrace trace =
        select_activity(MixtureWeights({1.0, 0.0}), models, state, cfg, rng);
    REQUIRE(trace.mechanism == SelectionMechanism::exploration);
    REQUIRE(trace.chosen == 1);
    REQUIRE(trace.rng_draws_used == 1);
}

TEST_CASE("epsilon exploration fires at the configured rate") {
    const Character character(kSpace3, Distribution::uniform(3));
    const DriveState state(50, character);
    PolicyConfig cfg = quiet_policy();
    cfg.exploration_epsilon = 0.5;
    const auto models = seeded_models({{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}});

    RandomStream rng(13);
    int explored = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const SelectionTrace trace =
            select_activity(MixtureWeights({1.0, 0.0}), models, state, cfg, rng);
        if (trace.mechanism == SelectionMechanism::exploration) ++explored;
    }
    REQUIRE(std::abs(explored / static_cast<double>(draws) - 0.5) <= 0.02);
}

TEST_CASE("identical seeds reproduce identical traces") {
    const Character character(kSpace3, Distribution({0.5, 0.2, 0.3}));
    DriveState state(50, character);
    state = push_episode(state, character, Distribution({0.2, 0.3, 0.5}));
    PolicyConfig cfg;
    cfg.min_plays_per_activity = 0;
    const auto models = seeded_models({{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}});
    const MixtureWeights q({0.3, 0.4, 0.3});

    for (int round = 0; round < 3; ++round) {
        RandomStream rng_a(999);
        RandomStream rng_b(999);
        for (int i = 0; i < 200; ++i) {
            const SelectionTrace a = select_activity(q, models, state, cfg, rng_a);
            const SelectionTrace b = select_activity(q, models, state, cfg, rng_b);
            REQUIRE(a.chosen == b.chosen);
            REQUIRE(a.mechanism == b.mechanism);
            REQUIRE(a.rng_draws_used == b.rng_draws_used);
            REQUIRE(a.q == b.q);
            REQUIRE(a.drive == b.drive);
        }
    }
}

TEST_CASE("stochastic selection follows the weights empirically") {
    const Character character(kSpace3, Distribution::uniform(3));
    const DriveState state(50, character);
    const auto models = seeded_models({{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}});
    const std::vector<double> q = {0.2, 0.5, 0.3};

    RandomStream rng(123456);
    std::vector<double> freq(3, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const SelectionTrace trace =
            select_activity(MixtureWeights(q), models, state, quiet_policy(), rng);
        REQUIRE(trace.mechanism == SelectionMechanism::stochastic);
        freq[trace.chosen] += 1.0;
    }
    for (double& f : freq) f /= draws;
    REQUIRE(testutil::tv(freq, q) <= 0.01);
}

TEST_CASE("utility weight discounts misaligned activities") {
    const Character character(kSpace3, Distribution({0.5, 0.25, 0.25}));
    const auto aligned = testutil::model_from_probs(kSpace3, "a", {0.5, 0.25, 0.25});
    const auto skewed = testutil::model_from_probs(kSpace3, "b", {0.25, 0.5, 0.25});

    REQUIRE(std::abs(utility_weight(character, aligned, 1.0) - 1.0) <= 1e-12);
    REQUIRE(std::abs(utility_weight(character, skewed, 0.0) - 1.0) <= 1e-12);
    // D = 0.25 ln 2, so w = 2^(-0.25)
    REQUIRE(std::abs(utility_weight(character, skewed, 1.0) -
                     std::exp(-0.25 * std::log(2.0))) <= 1e-12);
    REQUIRE_THROWS_AS(utility_weight(character, skewed, -1.0), std::invalid_argument);
}

TEST_CASE("utility weight is strictly decreasing in the divergence") {
    RandomStream rng(314159);
    const Character character(kSpace3, Distribution({0.5, 0.25, 0.25}));
    for (int trial = 0; trial < 100; ++trial) {
        const auto m1 = testutil::model_from_probs(
            kSpace3, "a", testutil::random_strict_distribution(rng, 3).values());
        const auto m2 = testutil::model_from_probs(
            kSpace3, "b", testutil::random_strict_distribution(rng, 3).values());
        const double d1 = kl_divergence(character.target(), m1.derived());
        const double d2 = kl_divergence(character.target(), m2.derived());
        const double w1 = utility_weight(character, m1, 2.0);
        const double w2 = utility_weight(character, m2, 2.0);
        if (d1 < d2) REQUIRE(w1 > w2);
        if (d2 < d1) REQUIRE(w2 > w1);
    }
}

TEST_CASE("reward receipt is recorded as one more raised flag") {
    PolicyConfig cfg;
    cfg.utility_mode = UtilityMode::as_emotion;

    const Distribution satisfied =
        record_utility_emotion({1.0, 0.0, 0.0, 0.0}, true, kSpace4, cfg);
    REQUIRE(satisfied[0] == 0.5);
    REQUIRE(satisfied[3] == 0.5);

    const Distribution reward_only =
        record_utility_emotion({0.0, 0.0, 0.0, 0.0}, true, kSpace4, cfg);
    REQUIRE(reward_only[3] == 1.0);

    const Distribution no_reward =
        record_utility_emotion({0.0, 1.0, 1.0, 0.0}, false, kSpace4, cfg);
    REQUIRE(no_reward[1] == 0.5);
    REQUIRE(no_reward[2] == 0.5);
    REQUIRE(no_reward[3] == 0.0);

    // flagless and rewardless falls back to boredom
    const Distribution flat = record_utility_emotion({0.0, 0.0, 0.0, 0.0}, false, kSpace4, cfg);
    REQUIRE(flat[2] == 1.0);
}

TEST_CASE("utility-as-emotion guards its preconditions") {
    PolicyConfig off;
    REQUIRE_THROWS_AS(record_utility_emotion({0.0, 0.0, 0.0, 0.0}, true, kSpace4, off),
                      std::logic_error);

    PolicyConfig cfg;
    cfg.utility_mode = UtilityMode::as_emotion;
    REQUIRE_THROWS_AS(record_utility_emotion({0.0, 0.0, 0.0}, true, kSpace3, cfg),
                      std::invalid_argument);  // no trait U in the space
    REQUIRE_THROWS_AS(record_utility_emotion({0.0, 0.0}, true, kSpace4, cfg),
                      std::invalid_argument);  // dimension mismatch
}

TEST_CASE("policy config validates its ranges") {
    PolicyConfig cfg;
    cfg.peakedness_threshold = 0.2;  // below 1/3
    REQUIRE_THROWS_AS(cfg.validate(3), std::invalid_argument);
    cfg = PolicyConfig{};
    cfg.exploration_epsilon = 1.0;
    REQUIRE_THROWS_AS(cfg.validate(3), std::invalid_argument);
    cfg = PolicyConfig{};
    cfg.drive_threshold = -0.1;
    REQUIRE_THROWS_AS(cfg.validate(3), std::invalid_argument);
    cfg = PolicyConfig{};
    cfg.min_plays_per_activity = -1;
    REQUIRE_THROWS_AS(cfg.validate(3), std::invalid_argument);
}
