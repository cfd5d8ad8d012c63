#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "graphband/rng.hpp"

namespace graphband {

// Grouped Bernoulli world: every slot belongs to a group and every group has
// one mean-reward vector over the K arms. Read-only after construction, so
// concurrent pulls with per-replication RNG streams are safe.
class GroupedEnvironment {
public:
    // slot_groups[i] is the group of slot i+1; every referenced group must
    // have a K-vector of means in [0,1].
    GroupedEnvironment(int K, std::vector<int> slot_groups,
                       std::map<int, std::vector<double>> group_means);

    int arm_count() const { return K_; }
    int slot_count() const { return static_cast<int>(slot_groups_.size()); }
    int group_of(int slot) const;
    const std::map<int, std::vector<double>>& group_means() const { return group_means_; }
    const std::vector<double>& means_of(int group) const;

    // Bernoulli reward in {0,1} for playing arm (0-based) at slot; the
    // learner-side loss is 1 - reward.
    int pull(int slot, int arm, Rng& rng) const;

    // Gap between the group's best mean and the played arm's mean. Uses the
    // true means, so cumulative sums are free of reward noise.
    double instant_pseudo_regret(int slot, int arm) const;

    // 0-based argmax of the group's means, smallest index on ties.
    int best_arm(int group) const;

    // Smallest positive suboptimality gap over all groups. +inf when no arm
    // is suboptimal anywhere (K = 1); a tie for best within any group makes
    // the quantity undefined and raises config_error.
    double delta_min() const;

private:
    int K_;
    std::vector<int> slot_groups_;
    std::map<int, std::vector<double>> group_means_;
};

// Deterministic or random slot sequences. Only the iid kind consumes
// randomness; the rest replay identically regardless of the stream.
struct GeneratorSpec {
    enum class Kind { IidUniform, RoundRobin, Block, CutAdversary };
    Kind kind = Kind::IidUniform;
    int dwell = 1;     // block: rounds spent on a slot before advancing
    int cut_low = 1;   // cut-adversary: alternates cut_low and cut_low + 1
    int period = 1;    // cut-adversary: rounds between alternations
};

// "iid", "rr", "block:<d>", "cutadv:<u>,<q>".
GeneratorSpec parse_generator_spec(const std::string& text);

class ContextGenerator {
public:
    ContextGenerator(GeneratorSpec spec, int n);

    const GeneratorSpec& spec() const { return spec_; }
    int slot_count() const { return n_; }

    int next(Rng& rng);

private:
    GeneratorSpec spec_;
    int n_;
    long long t_ = 0;
};

// Text format: "K <int>", "groups <G>", G rows of K means, then one
// "<slot> <group>" pair per slot (slots must cover 1..n exactly once).
// '#' starts a comment. Writing renumbers groups to 1..G in sorted id
// order, which renames groups but preserves every slot's mean vector.
GroupedEnvironment read_environment(std::istream& in);
GroupedEnvironment read_environment_file(const std::string& path);
void write_environment(std::ostream& out, const GroupedEnvironment& env);
void write_environment_file(const std::string& path, const GroupedEnvironment& env);

}  // namespace graphband
