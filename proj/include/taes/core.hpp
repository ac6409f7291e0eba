#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taes {

// Accepted deviation of a probability vector's sum from 1 on input.
inline constexpr double kSumTolerance = 1e-9;
// Components at or above this floor count as strictly positive.
inline constexpr double kStrictFloor = 1e-9;

/// Ordered set of emotion-trait identifiers. Every probability vector in a
/// space is indexed by this ordering, which is fixed at construction.
class EmotionSpace {
public:
    explicit EmotionSpace(std::vector<std::string> traits) : traits_(std::move(traits)) {
        if (traits_.size() < 2)
            throw std::invalid_argument("emotion space needs at least two traits");
        for (std::size_t i = 0; i < traits_.size(); ++i) {
            if (traits_[i].empty())
                throw std::invalid_argument("emotion trait identifiers must be non-empty");
            for (std::size_t j = i + 1; j < traits_.size(); ++j)
                if (traits_[i] == traits_[j])
                    throw std::invalid_argument("duplicate emotion trait: " + traits_[i]);
        }
    }

    std::size_t size() const { return traits_.size(); }
    const std::vector<std::string>& traits() const { return traits_; }
    const std::string& trait(std::size_t i) const { return traits_.at(i); }

    std::size_t index_of(const std::string& trait) const {
        for (std::size_t i = 0; i < traits_.size(); ++i)
            if (traits_[i] == trait) return i;
        throw std::invalid_argument("unknown emotion trait: " + trait);
    }

    bool contains(const std::string& trait) const {
        return std::find(traits_.begin(), traits_.end(), trait) != traits_.end();
    }

    bool operator==(const EmotionSpace&) const = default;

private:
    std::vector<std::string> traits_;
};

/// Categorical probability distribution. Construction validates that all
/// components are nonnegative and that they sum to 1 within kSumTolerance,
/// then rescales to a unit sum at machine precision so that identities such
/// as sum-of-drives == 0 hold to 1e-12 downstream.
class Distribution {
public:
    explicit Distribution(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("distribution: no components");
        double sum = 0.0;
        for (double v : values_) {
            if (!(v >= 0.0))  // catches NaN as well
                throw std::invalid_argument("distribution: negative or non-finite component");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw std::invalid_argument("distribution: components sum to " + std::to_string(sum) +
                                        ", expected 1");
        for (double& v : values_) v /= sum;
    }

    static Distribution uniform(std::size_t k) {
        return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    bool is_strict(double floor = kStrictFloor) const {
        return std::all_of(values_.begin(), values_.end(),
                           [floor](double v) { return v >= floor; });
    }

    bool operator==(const Distribution&) const = default;

private:
    std::vector<double> values_;
};

/// D(p || r) in nats. Terms with p_i = 0 contribute nothing; r must be
/// strictly positive so the objective stays finite.
inline double kl_divergence(const Distribution& p, const Distribution& r) {
    if (p.size() != r.size())
        throw std::invalid_argument("kl_divergence: dimension mismatch");
    if (!r.is_strict())
        throw std::invalid_argument("kl_divergence: reference distribution has a zero component");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) sum += p[i] * std::log(p[i] / r[i]);
    // Gibbs' inequality guarantees sum >= 0; rounding can leave a tiny
    // negative residue when p ~ r.
    return std::max(sum, 0.0);
}

/// Half the L1 distance between two distributions of equal dimension.
inline double total_variation(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("total_variation: dimension mismatch");
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return 0.5 * l1;
}

// Unit mass spread over the positive entries of `mass`, proportionally.
// An all-zero vector collapses to the fallback component instead.
inline Distribution distribution_from_flags(std::vector<double> mass, std::size_t fallback_index) {
    if (fallback_index >= mass.size())
        throw std::invalid_argument("distribution_from_flags: fallback index out of range");
    double sum = 0.0;
    for (double v : mass) {
        if (!(v >= 0.0))
            throw std::invalid_argument("distribution_from_flags: negative component");
        sum += v;
    }
    if (sum <= 0.0) {
        std::fill(mass.begin(), mass.end(), 0.0);
        mass[fallback_index] = 1.0;
        return Distribution(std::move(mass));
    }
    for (double& v : mass) v /= sum;
    return Distribution(std::move(mass));
}

/// Target distribution over emotion traits; the agent's guiding functional.
/// All components must be strictly positive.
class Character {
public:
    Character(EmotionSpace space, Distribution target)
        : space_(std::move(space)), target_(std::move(target)) {
        if (target_.size() != space_.size())
            throw std::invalid_argument("character: target dimension does not match space");
        if (!target_.is_strict())
            throw std::invalid_argument("character: target components must be strictly positive");
    }

    const EmotionSpace& space() const { return space_; }
    const Distribution& target() const { return target_; }

private:
    EmotionSpace space_;
    Distribution target_;
};

/// Smoothed empirical distribution of emotions observed for one activity.
/// Counts accumulate fractional observations; the derived distribution is
/// Laplace-smoothed by prior_weight, so it is strictly positive whenever
/// prior_weight > 0.
class ExperienceModel {
public:
    ExperienceModel(EmotionSpace space, std::string activity, double prior_weight = 1.0)
        : ExperienceModel(std::move(space), std::move(activity), prior_weight,
                          std::vector<double>()) {}

    ExperienceModel(EmotionSpace space, std::string activity, double prior_weight,
                    std::vector<double> counts)
        : space_(std::move(space)),
          activity_(std::move(activity)),
          prior_weight_(prior_weight),
          counts_(std::move(counts)) {
        if (counts_.empty()) counts_.assign(space_.size(), 0.0);
        if (counts_.size() != space_.size())
            throw std::invalid_argument("experience model: counts dimension mismatch");
        if (!(prior_weight_ >= 0.0))
            throw std::invalid_argument("experience model: prior_weight must be nonnegative");
        for (double c : counts_)
            if (!(c >= 0.0))
                throw std::invalid_argument("experience model: counts must be nonnegative");
    }

    const EmotionSpace& space() const { return space_; }
    const std::string& activity() const { return activity_; }
    double prior_weight() const { return prior_weight_; }
    const std::vector<double>& counts() const { return counts_; }

    // Total observation mass; one per recorded episode, since every emotion
    // vector carries unit mass.
    double total_count() const { return std::accumulate(counts_.begin(), counts_.end(), 0.0); }

    Distribution derived() const {
        const double denom =
            total_count() + static_cast<double>(space_.size()) * prior_weight_;
        if (denom <= 0.0)
            throw std::domain_error("experience model: no observations and no prior");
        std::vector<double> p(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i)
            p[i] = (counts_[i] + prior_weight_) / denom;
        return Distribution(std::move(p));
    }

private:
    EmotionSpace space_;
    std::string activity_;
    double prior_weight_;
    std::vector<double> counts_;
};

/// Returns a copy of the model with the emotion vector folded into the
/// counts (fractional multi-label update).
inline ExperienceModel update_experience(const ExperienceModel& model,
                                         const Distribution& emotion) {
    if (emotion.size() != model.space().size())
        throw std::invalid_argument("update_experience: dimension mismatch");
    std::vector<double> counts = model.counts();
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += emotion[i];
    return ExperienceModel(model.space(), model.activity(), model.prior_weight(),
                           std::move(counts));
}

/// Point on the activity simplex: the probability of engaging in each
/// activity. Same validation and exact rescaling as Distribution.
class MixtureWeights {
public:
    explicit MixtureWeights(std::vector<double> q) : q_(std::move(q)) {
        if (q_.empty()) throw std::invalid_argument("mixture weights: no components");
        double sum = 0.0;
        for (double v : q_) {
            if (!(v >= 0.0))
                throw std::invalid_argument("mixture weights: negative or non-finite component");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw std::invalid_argument("mixture weights: components sum to " +
                                        std::to_string(sum) + ", expected 1");
        for (double& v : q_) v /= sum;
    }

    static MixtureWeights uniform(std::size_t n) {
        return MixtureWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    std::size_t size() const { return q_.size(); }
    double operator[](std::size_t i) const { return q_[i]; }
    const std::vector<double>& values() const { return q_; }

    bool operator==(const MixtureWeights&) const = default;

private:
    std::vector<double> q_;
};

/// Convex combination of the models' derived distributions with weights q.
inline Distribution mixture_experience(const MixtureWeights& q,
                                       const std::vector<ExperienceModel>& models) {
    if (models.empty())
        throw std::invalid_argument("mixture_experience: no experience models");
    if (q.size() != models.size())
        throw std::invalid_argument("mixture_experience: weight/model count mismatch");
    for (const auto& m : models)
        if (!(m.space() == models.front().space()))
            throw std::invalid_argument("mixture_experience: models span different spaces");
    std::vector<double> mix(models.front().space().size(), 0.0);
    for (std::size_t a = 0; a < models.size(); ++a) {
        const Distribution p = models[a].derived();
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += q[a] * p[i];
    }
    return Distribution(std::move(mix));
}

}  // namespace taes
