#pragma once

#include <vector>

#include <json.hpp>

#include "graphband/tsallis_inf.hpp"

namespace graphband {

enum class NodeStatus { Inactive, Active, Retired };

// One bandit subroutine in the recursive slot partition. The node at level p
// with index j covers the contiguous slot range ((j-1)*2^(L-p), j*2^(L-p)].
struct SubroutineNode {
    int level = 0;  // 1..L, leaves at L
    int index = 0;  // 1..2^level
    int first = 0;  // first covered slot, 1-based
    int last = 0;   // last covered slot, inclusive
    NodeStatus status = NodeStatus::Inactive;
    long long handled = 0;
    TsallisInf learner;
};

// Handed out by serve; must be passed to exactly one matching feedback.
struct Ticket {
    int node_id = -1;
    int arm = -1;  // 0-based
};

enum class Mode { General, Easy };

// Split threshold for a horizon-T run over n slots with K arms and an
// estimated f label cuts. f = 0 yields T: with one group, splitting only
// wastes exploration. Result is clamped to [1, T].
long long choose_split_threshold(long long T, int K, long long f, int n, Mode mode);

// Divide-and-conquer scheduler over n context slots. Slots are covered by a
// full binary hierarchy of bandit learners; each request is routed to the
// unique active node covering its slot, and a non-leaf node that has handled
// D requests retires in favour of its two children (fresh learners). Strictly
// sequential: serve and feedback must alternate.
class Scheduler {
public:
    // n is padded up to the next power of two; padding slots simply never
    // receive requests.
    Scheduler(int n, int K, long long D);

    int context_count() const { return n_; }
    int padded_count() const { return n_padded_; }
    int level_count() const { return L_; }
    int arm_count() const { return K_; }
    long long split_threshold() const { return D_; }

    const std::vector<SubroutineNode>& nodes() const { return nodes_; }
    // Nodes are stored level by level: (level, index) sits at 2^level - 2 + index - 1.
    static int node_id(int level, int index);

    // Id of the unique active node covering slot c (1 <= c <= padded_count).
    int route(int c) const;

    // Routes the request, draws an arm from that node's learner.
    Ticket serve(int c, Rng& rng);
    // Completes the pending ticket: importance-weighted update, then a split
    // if this was the node's D-th request and it is not a leaf.
    void feedback(const Ticket& ticket, double loss);

    // Nodes ever activated, including the two level-1 nodes.
    long long activated_count() const { return activated_; }
    long long total_handled() const;

    // Number of nodes whose slot range straddles at least one label change.
    // Accepts labels for the original n slots (padding repeats the last
    // label, adding no cuts) or for all padded slots.
    long long count_bad(const std::vector<int>& slot_labels) const;

    // Plain data snapshot; refuses to run between serve and feedback.
    nlohmann::json checkpoint() const;
    static Scheduler restore(const nlohmann::json& snapshot);

private:
    int n_ = 0;
    int n_padded_ = 0;
    int L_ = 0;
    int K_ = 0;
    long long D_ = 0;
    std::vector<SubroutineNode> nodes_;
    long long activated_ = 0;
    bool pending_ = false;
    int pending_node_ = -1;
};

}  // namespace graphband
