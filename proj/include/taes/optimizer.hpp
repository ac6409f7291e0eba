#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "taes/core.hpp"

namespace taes {

struct SolverConfig {
    int max_iterations = 10000;
    double tolerance = 1e-10;  // stop when the per-iteration objective decrease falls below
    double step_size = 1.0;    // initial exponentiated-gradient learning rate

    void validate() const {
        if (max_iterations <= 0) throw std::invalid_argument("solver: max_iterations must be positive");
        if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
        if (!(step_size > 0.0)) throw std::invalid_argument("solver: step_size must be positive");
    }
};

struct SolverResult {
    MixtureWeights q_star;
    double objective = 0.0;  // nats; equals kl(character, mixture(q_star, models))
    int iterations_used = 0;
    bool converged = false;
};

// f(q) = sum_i P_i ln(P_i / m_i(q)) with m_i(q) = sum_a q_a p_i^a, defined on
// the positive orthant (q need not be normalized, which is what the
// finite-difference checks rely on). On the simplex this is the KL divergence
// between the character and the mixture experience.
class AlignmentObjective {
public:
    AlignmentObjective(const Character& character, const std::vector<ExperienceModel>& models) {
        if (models.empty())
            throw std::invalid_argument("alignment objective: no experience models");
        target_ = character.target().values();
        probs_.reserve(models.size());
        for (const auto& m : models) {
            if (!(m.space() == character.space()))
                throw std::invalid_argument("alignment objective: model space differs from character space");
            Distribution p = m.derived();
            if (!p.is_strict())
                throw std::invalid_argument("alignment objective: model distribution is not strictly positive");
            probs_.push_back(p.values());
        }
    }

    std::size_t activity_count() const { return probs_.size(); }
    std::size_t trait_count() const { return target_.size(); }

    double value(const std::vector<double>& q) const {
        check(q);
        double f = 0.0;
        for (std::size_t i = 0; i < target_.size(); ++i) {
            const double m = mixture_component(q, i);
            if (!(m > 0.0))
                throw std::domain_error("alignment objective: mixture component not positive");
            if (target_[i] > 0.0) f += target_[i] * std::log(target_[i] / m);
        }
        return f;
    }

    // df/dq_a = -sum_i P_i p_i^a / m_i(q)
    std::vector<double> gradient(const std::vector<double>& q) const {
        check(q);
        std::vector<double> ratio(target_.size());
        for (std::size_t i = 0; i < target_.size(); ++i) {
            const double m = mixture_component(q, i);
            if (!(m > 0.0))
                throw std::domain_error("alignment objective: mixture component not positive");
            ratio[i] = target_[i] / m;
        }
        std::vector<double> grad(probs_.size(), 0.0);
        for (std::size_t a = 0; a < probs_.size(); ++a) {
            double g = 0.0;
            for (std::size_t i = 0; i < target_.size(); ++i) g += ratio[i] * probs_[a][i];
            grad[a] = -g;
        }
        return grad;
    }

private:
    void check(const std::vector<double>& q) const {
        if (q.size() != probs_.size())
            throw std::invalid_argument("alignment objective: weight vector has wrong length");
    }

    double mixture_component(const std::vector<double>& q, std::size_t i) const {
        double m = 0.0;
        for (std::size_t a = 0; a < probs_.size(); ++a) m += q[a] * probs_[a][i];
        return m;
    }

    std::vector<double> target_;
    std::vector<std::vector<double>> probs_;  // [activity][trait]
};

using IterationObserver = std::function<void(int iteration, double objective)>;

/// Minimizes the alignment objective over the activity simplex with
/// exponentiated-gradient (mirror descent) updates:
///     q_a <- q_a * exp(-eta * df/dq_a), then renormalize.
/// The step is halved until the objective does not increase, so the
/// objective sequence is nonincreasing at every iteration. The update is
/// multiplicative, hence q stays on the simplex natively and components that
/// start positive stay positive until they underflow at a boundary optimum.
inline SolverResult optimize_weights(const Character& character,
                                     const std::vector<ExperienceModel>& models,
                                     const SolverConfig& config = {},
                                     const std::optional<MixtureWeights>& initial = std::nullopt,
                                     const IterationObserver& observer = {}) {
    config.validate();
    const AlignmentObjective objective(character, models);
    const std::size_t n = models.size();

    std::vector<double> q = initial ? initial->values()
                                    : std::vector<double>(n, 1.0 / static_cast<double>(n));
    if (q.size() != n)
        throw std::invalid_argument("optimize_weights: initial point has wrong length");

    double f = objective.value(q);
    if (observer) observer(0, f);

    int iterations = 0;
    bool converged = false;
    std::vector<double> candidate(n);
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        iterations = iter;
        const std::vector<double> grad = objective.gradient(q);

        // Shift the exponent so the largest multiplier is exp(0); the shift
        // cancels in the renormalization and prevents overflow.
        double shift = -std::numeric_limits<double>::infinity();
        for (double g : grad) shift = std::max(shift, -g);

        double eta = config.step_size;
        double f_next = f;
        bool accepted = false;
        for (int halving = 0; halving < 64 && !accepted; ++halving, eta *= 0.5) {
            double z = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                candidate[a] = q[a] * std::exp(eta * (-grad[a] - shift));
                z += candidate[a];
            }
            if (!(z > 0.0)) continue;
            for (std::size_t a = 0; a < n; ++a) candidate[a] /= z;
            const double fc = objective.value(candidate);
            if (fc <= f + 1e-15) {
                f_next = fc;
                accepted = true;
            }
        }
        if (accepted) q.swap(candidate);

        const double decrease = f - f_next;
        f = f_next;
        if (observer) observer(iter, f);
        if (decrease < config.tolerance) {
            converged = true;
            break;
        }
    }

    MixtureWeights q_star(std::move(q));
    const double final_objective = objective.value(q_star.values());
    return SolverResult{std::move(q_star), final_objective, iterations, converged};
}

/// Exhaustive evaluation of the alignment objective on the simplex lattice
/// with the given spacing; returns the best lattice point. Intended for
/// verification only, hence the small-N guard.
inline SolverResult grid_oracle(const Character& character,
                                const std::vector<ExperienceModel>& models,
                                double resolution) {
    if (models.empty()) throw std::invalid_argument("grid_oracle: no experience models");
    if (models.size() > 4)
        throw std::invalid_argument("grid_oracle: more than 4 activities is intractable");
    if (!(resolution > 0.0) || resolution > 0.5)
        throw std::invalid_argument("grid_oracle: resolution must lie in (0, 0.5]");

    const AlignmentObjective objective(character, models);
    const std::size_t n = models.size();
    const auto ticks = static_cast<long long>(std::llround(1.0 / resolution));

    std::vector<double> q(n, 0.0);
    std::vector<double> best_q(n, 0.0);
    double best_f = std::numeric_limits<double>::infinity();
    long long evaluated = 0;

    // Enumerate all integer compositions of `ticks` into n parts.
    std::vector<long long> part(n, 0);
    std::function<void(std::size_t, long long)> enumerate = [&](std::size_t index,
                                                                long long remaining) {
        if (index + 1 == n) {
            part[index] = remaining;
            for (std::size_t a = 0; a < n; ++a)
                q[a] = static_cast<double>(part[a]) / static_cast<double>(ticks);
            const double f = objective.value(q);
            ++evaluated;
            if (f < best_f) {
                best_f = f;
                best_q = q;
            }
            return;
        }
        for (long long c = 0; c <= remaining; ++c) {
            part[index] = c;
            enumerate(index + 1, remaining - c);
        }
    };
    enumerate(0, ticks);

    return SolverResult{MixtureWeights(std::move(best_q)), best_f,
                        static_cast<int>(evaluated), true};
}

}  // namespace taes
