#pragma once

#include <vector>

#include "graphband/rng.hpp"

namespace graphband {

// One played arm together with its [0,1] loss.
struct ArmOutcome {
    int arm = 0;  // 0-based
    double loss = 0.0;
};

// Sampling weights for cumulative loss estimates L and learning rate eta:
// solves   w_i = 4 / (eta * (L_i - x))^2,   sum_i w_i = 1,   x < min_i L_i.
// Safeguarded Newton with a bisection fallback; |sum w - 1| <= 1e-9 on
// return, throws "normalizer not found" otherwise (unreachable in exact
// arithmetic: the weight sum is strictly monotone in x).
std::vector<double> tsallis_weights(const std::vector<double>& cum_loss_est, double eta);

// Stochastic bandit learner: online mirror descent with 1/2-Tsallis entropy
// regularization and importance-weighted loss estimates. Learning rate
// eta = 2/sqrt(t+1) where t is the number of rounds this instance played.
//
// Usage is strictly sample_arm / update alternation from one logical thread;
// distinct instances are independent.
class TsallisInf {
public:
    explicit TsallisInf(int arm_count);

    int arm_count() const { return arm_count_; }
    long long rounds_played() const { return rounds_played_; }
    const std::vector<double>& cumulative_loss_estimates() const { return cum_loss_est_; }
    // Probability vector cached by the most recent sample_arm; empty before
    // the first draw.
    const std::vector<double>& last_weights() const { return last_weights_; }

    double learning_rate() const;
    std::vector<double> arm_distribution() const;

    // Draws an arm from arm_distribution() and caches the weights.
    int sample_arm(Rng& rng);

    // Importance-weighted update for the arm returned by the matching
    // sample_arm:  L[arm] += loss / w[arm].  Other entries are untouched.
    void update(const ArmOutcome& outcome);

    // Checkpoint record; the cached weights are deliberately not part of it,
    // so a restored instance must sample before it can update.
    struct Record {
        int arm_count = 0;
        std::vector<double> cum_loss_est;
        long long rounds_played = 0;
    };
    Record to_record() const;
    static TsallisInf from_record(const Record& rec);

private:
    int arm_count_;
    std::vector<double> cum_loss_est_;
    long long rounds_played_ = 0;
    std::vector<double> last_weights_;
    bool pending_sample_ = false;
};

}  // namespace graphband
