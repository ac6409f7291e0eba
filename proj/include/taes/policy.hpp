#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "taes/core.hpp"
#include "taes/rng.hpp"

namespace taes {

/// Trailing emotion statistics over a window of the last N_a episodes, plus
/// the drive vector M = target - trailing. While the history is empty the
/// trailing distribution is defined as the character target itself, so all
/// drives start at zero.
class DriveState {
public:
    DriveState(std::size_t window_length, const Character& character)
        : window_(window_length),
          trailing_(character.target()),
          drive_(character.space().size(), 0.0) {
        if (window_ == 0) throw std::invalid_argument("drive state: window length must be positive");
    }

    std::size_t window_length() const { return window_; }
    const std::deque<Distribution>& history() const { return history_; }
    const Distribution& trailing() const { return trailing_; }
    const std::vector<double>& drive() const { return drive_; }

    friend DriveState push_episode(const DriveState& state, const Character& character,
                                   const Distribution& emotion);

private:
    std::size_t window_;
    std::deque<Distribution> history_;
    Distribution trailing_;
    std::vector<double> drive_;
};

/// FIFO-updates the window and recomputes trailing p and the drives
/// M_i = P_i - p_i(N_a). Pure: returns a new state.
inline DriveState push_episode(const DriveState& state, const Character& character,
                               const Distribution& emotion) {
    const std::size_t k = character.space().size();
    if (emotion.size() != k || state.drive_.size() != k)
        throw std::invalid_argument("push_episode: dimension mismatch");

    DriveState next = state;
    next.history_.push_back(emotion);
    while (next.history_.size() > next.window_) next.history_.pop_front();

    std::vector<double> mean(k, 0.0);
    for (const auto& v : next.history_)
        for (std::size_t i = 0; i < k; ++i) mean[i] += v[i];
    for (double& m : mean) m /= static_cast<double>(next.history_.size());
    next.trailing_ = Distribution(std::move(mean));  // renormalized exactly

    for (std::size_t i = 0; i < k; ++i)
        next.drive_[i] = character.target()[i] - next.trailing_[i];
    return next;
}

enum class UtilityMode { off, weighted, as_emotion };

inline const char* to_string(UtilityMode mode) {
    switch (mode) {
        case UtilityMode::off: return "off";
        case UtilityMode::weighted: return "weighted";
        case UtilityMode::as_emotion: return "as_emotion";
    }
    return "?";
}

struct PolicyConfig {
    double drive_threshold = 0.25;      // theta_M; |M_k| must exceed this to override
    double peakedness_threshold = 0.5;  // max component required of an override target
    double exploration_epsilon = 0.05;
    int min_plays_per_activity = 3;
    UtilityMode utility_mode = UtilityMode::off;
    double utility_lambda = 1.0;
    std::string utility_trait = "U";

    void validate(std::size_t trait_count) const {
        if (!(drive_threshold >= 0.0))
            throw std::invalid_argument("policy: drive_threshold must be nonnegative");
        const double flat = 1.0 / static_cast<double>(trait_count);
        if (!(peakedness_threshold > flat) || peakedness_threshold > 1.0)
            throw std::invalid_argument("policy: peakedness_threshold must lie in (1/K, 1]");
        if (!(exploration_epsilon >= 0.0) || exploration_epsilon >= 1.0)
            throw std::invalid_argument("policy: exploration_epsilon must lie in [0, 1)");
        if (min_plays_per_activity < 0)
            throw std::invalid_argument("policy: min_plays_per_activity must be nonnegative");
        if (!(utility_lambda >= 0.0))
            throw std::invalid_argument("policy: utility_lambda must be nonnegative");
    }
};

enum class SelectionMechanism { stochastic, drive_override, exploration };

inline const char* to_string(SelectionMechanism mechanism) {
    switch (mechanism) {
        case SelectionMechanism::stochastic: return "stochastic";
        case SelectionMechanism::drive_override: return "drive_override";
        case SelectionMechanism::exploration: return "exploration";
    }
    return "?";
}

/// Audit record of one selection: what was chosen, by which mechanism, and
/// the snapshots that led to it. With the stream seed this reproduces the
/// decision exactly.
struct SelectionTrace {
    std::size_t chosen = 0;
    SelectionMechanism mechanism = SelectionMechanism::stochastic;
    MixtureWeights q;
    std::vector<double> drive;
    std::uint64_t rng_draws_used = 0;
};

/// Picks the next activity. Precedence:
///   1. exploration: any activity below min_plays_per_activity is chosen
///      uniformly among the under-played; otherwise an epsilon draw selects
///      uniformly among all activities;
///   2. drive override: with k = argmax_i |M_i| (lowest index on ties) and
///      |M_k| above the threshold, the peaked activities (max component of
///      the derived distribution >= peakedness_threshold) compete and the
///      one with the largest p_k wins when M_k > 0, the smallest when
///      M_k < 0 (lowest index on ties); no peaked activity means fall-through;
///   3. stochastic: sample from q.
inline SelectionTrace select_activity(const MixtureWeights& q,
                                      const std::vector<ExperienceModel>& models,
                                      const DriveState& state, const PolicyConfig& config,
                                      RandomStream& rng) {
    if (models.empty()) throw std::invalid_argument("select_activity: no activities");
    const std::size_t n = models.size();
    if (q.size() != n) throw std::invalid_argument("select_activity: weight/model count mismatch");
    if (state.drive().size() != models.front().space().size())
        throw std::invalid_argument("select_activity: drive state dimension mismatch");
    config.validate(models.front().space().size());

    const std::uint64_t draws_before = rng.draws();
    const auto finish = [&](std::size_t chosen, SelectionMechanism mechanism) {
        return SelectionTrace{chosen, mechanism, q, state.drive(), rng.draws() - draws_before};
    };

    // 1. exploration
    std::vector<std::size_t> underplayed;
    for (std::size_t a = 0; a < n; ++a)
        if (std::llround(models[a].total_count()) < config.min_plays_per_activity)
            underplayed.push_back(a);
    if (!underplayed.empty())
        return finish(underplayed[rng.uniform_index(underplayed.size())],
                      SelectionMechanism::exploration);
    if (config.exploration_epsilon > 0.0 && rng.uniform01() < config.exploration_epsilon)
        return finish(rng.uniform_index(n), SelectionMechanism::exploration);

    // 2. drive override
    const std::vector<double>& m = state.drive();
    std::size_t k = 0;
    for (std::size_t i = 1; i < m.size(); ++i)
        if (std::abs(m[i]) > std::abs(m[k])) k = i;
    if (std::abs(m[k]) > config.drive_threshold) {
        bool found = false;
        std::size_t best = 0;
        double best_p = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const Distribution p = models[a].derived();
            double peak = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) peak = std::max(peak, p[i]);
            if (peak < config.peakedness_threshold) continue;
            const bool better = !found || (m[k] > 0.0 ? p[k] > best_p : p[k] < best_p);
            if (better) {
                found = true;
                best = a;
                best_p = p[k];
            }
        }
        if (found) return finish(best, SelectionMechanism::drive_override);
    }

    // 3. stochastic
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t chosen = 0;
    bool decided = false;
    for (std::size_t a = 0; a < n; ++a) {
        if (q[a] <= 0.0) continue;
        chosen = a;  // last positive-weight activity absorbs rounding residue
        cumulative += q[a];
        if (u < cumulative) {
            decided = true;
            break;
        }
    }
    (void)decided;
    return finish(chosen, SelectionMechanism::stochastic);
}

/// Emotional credit weight w = exp(-lambda * D) with D the divergence
/// between the character and the activity's experience. Activities that
/// conform with the character keep their credits; misaligned ones are
/// discounted.
inline double utility_weight(const Character& character, const ExperienceModel& model,
                             double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("utility_weight: lambda must be nonnegative");
    const double divergence = kl_divergence(character.target(), model.derived());
    return std::exp(-lambda * divergence);
}

/// Folds reward receipt into the evaluator's raw flag vector as one more
/// raised flag on the utility trait, then distributes unit mass over the
/// raised flags. The input is the pre-normalization flag vector (possibly
/// all zero); the fallback trait absorbs flagless, rewardless episodes.
inline Distribution record_utility_emotion(const std::vector<double>& raw_flags,
                                           bool reward_received, const EmotionSpace& space,
                                           const PolicyConfig& config,
                                           const std::string& fallback_trait = "B") {
    if (config.utility_mode != UtilityMode::as_emotion)
        throw std::logic_error("record_utility_emotion requires utility_mode = as_emotion");
    if (raw_flags.size() != space.size())
        throw std::invalid_argument("record_utility_emotion: flag vector dimension mismatch");
    std::vector<double> mass = raw_flags;
    mass[space.index_of(config.utility_trait)] = reward_received ? 1.0 : 0.0;
    return distribution_from_flags(std::move(mass), space.index_of(fallback_trait));
}

}  // namespace taes
