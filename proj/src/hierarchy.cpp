#include "graphband/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graphband/errors.hpp"

namespace graphband {

namespace {

const char* status_name(NodeStatus s) {
    switch (s) {
        case NodeStatus::Inactive: return "inactive";
        case NodeStatus::Active: return "active";
        case NodeStatus::Retired: return "retired";
    }
    return "?";
}

NodeStatus status_from_name(const std::string& s) {
    if (s == "inactive") return NodeStatus::Inactive;
    if (s == "active") return NodeStatus::Active;
    if (s == "retired") return NodeStatus::Retired;
    throw config_error("unknown node status: " + s);
}

}  // namespace

long long choose_split_threshold(long long T, int K, long long f, int n, Mode mode) {
    if (T < 1) throw config_error("horizon must be at least 1");
    if (K < 1) throw config_error("arm count must be at least 1");
    if (f < 0) throw config_error("cut count must be nonnegative");
    if (n < 2) throw config_error("need at least two context slots");
    if (f == 0) return T;

    int levels = 0;
    for (int padded = 1; padded < n; padded <<= 1) ++levels;

    double v;
    if (mode == Mode::General) {
        double denom = 2.0 * static_cast<double>(f) * static_cast<double>(levels);
        v = std::pow(static_cast<double>(T) * std::sqrt(static_cast<double>(K)) / denom,
                     2.0 / 3.0);
    } else {
        v = std::sqrt(static_cast<double>(T) * static_cast<double>(K) /
                      static_cast<double>(f));
    }
    auto d = static_cast<long long>(std::ceil(v));
    return std::clamp(d, 1LL, T);
}

Scheduler::Scheduler(int n, int K, long long D) : n_(n), K_(K), D_(D) {
    if (n < 2) throw config_error("need at least two context slots");
    if (K < 1) throw config_error("arm count must be at least 1");
    if (D < 1) throw config_error("split threshold must be at least 1");

    n_padded_ = 1;
    while (n_padded_ < n) {
        n_padded_ <<= 1;
        ++L_;
    }

    nodes_.reserve(static_cast<size_t>(2) * n_padded_ - 2);
    for (int p = 1; p <= L_; ++p) {
        int width = n_padded_ >> p;
        for (int j = 1; j <= (1 << p); ++j) {
            nodes_.push_back(SubroutineNode{p, j, (j - 1) * width + 1, j * width,
                                            NodeStatus::Inactive, 0, TsallisInf(K)});
        }
    }
    nodes_[node_id(1, 1)].status = NodeStatus::Active;
    nodes_[node_id(1, 2)].status = NodeStatus::Active;
    activated_ = 2;
}

int Scheduler::node_id(int level, int index) {
    return (1 << level) - 2 + (index - 1);
}

int Scheduler::route(int c) const {
    if (c < 1 || c > n_padded_)
        throw config_error("context slot out of range: " + std::to_string(c));
    // The covering node at level p has index ((c-1) >> (L-p)) + 1; walk the
    // root-to-leaf chain and demand exactly one active entry.
    int found = -1;
    for (int p = 1; p <= L_; ++p) {
        int id = node_id(p, ((c - 1) >> (L_ - p)) + 1);
        if (nodes_[id].status == NodeStatus::Active) {
            if (found >= 0) throw invariant_error("two active nodes cover one slot");
            found = id;
        }
    }
    if (found < 0) throw invariant_error("no active node covers slot");
    return found;
}

Ticket Scheduler::serve(int c, Rng& rng) {
    if (pending_) throw invariant_error("serve called twice without feedback");
    int id = route(c);
    int arm = nodes_[id].learner.sample_arm(rng);
    pending_ = true;
    pending_node_ = id;
    return Ticket{id, arm};
}

void Scheduler::feedback(const Ticket& ticket, double loss) {
    if (!pending_ || ticket.node_id != pending_node_)
        throw invariant_error("feedback does not match the pending serve");

    SubroutineNode& v = nodes_[ticket.node_id];
    v.learner.update(ArmOutcome{ticket.arm, loss});  // validates arm and loss
    pending_ = false;
    v.handled += 1;

    if (v.level < L_ && v.handled == D_) {
        v.status = NodeStatus::Retired;
        int left = node_id(v.level + 1, 2 * v.index - 1);
        for (int id : {left, left + 1}) {
            SubroutineNode& child = nodes_[id];
            if (child.status != NodeStatus::Inactive)
                throw invariant_error("child activated twice");
            child.status = NodeStatus::Active;
            child.learner = TsallisInf(K_);
            ++activated_;
        }
    }
}

long long Scheduler::total_handled() const {
    return std::accumulate(nodes_.begin(), nodes_.end(), 0LL,
                           [](long long acc, const SubroutineNode& v) { return acc + v.handled; });
}

long long Scheduler::count_bad(const std::vector<int>& slot_labels) const {
    std::vector<int> lab = slot_labels;
    if (static_cast<int>(lab.size()) == n_)
        lab.resize(n_padded_, lab.back());
    else if (static_cast<int>(lab.size()) != n_padded_)
        throw config_error("label count must match slot count");

    // cuts[i] = number of label changes among adjacent pairs (1,2)..(i,i+1);
    // the range [a,b] contains a cut iff cuts[b-1] - cuts[a-1] > 0.
    std::vector<int> cuts(n_padded_, 0);
    for (int i = 1; i < n_padded_; ++i)
        cuts[i] = cuts[i - 1] + (lab[i] != lab[i - 1] ? 1 : 0);

    long long bad = 0;
    for (const auto& v : nodes_)
        if (v.last > v.first && cuts[v.last - 1] - cuts[v.first - 1] > 0) ++bad;
    return bad;
}

nlohmann::json Scheduler::checkpoint() const {
    if (pending_) throw invariant_error("cannot checkpoint between serve and feedback");
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& v : nodes_) {
        auto rec = v.learner.to_record();
        nodes.push_back({{"status", status_name(v.status)},
                         {"handled", v.handled},
                         {"loss_estimates", rec.cum_loss_est},
                         {"rounds", rec.rounds_played}});
    }
    return {{"n", n_},
            {"arms", K_},
            {"split_threshold", D_},
            {"activated", activated_},
            {"nodes", std::move(nodes)}};
}

Scheduler Scheduler::restore(const nlohmann::json& snapshot) {
    try {
        Scheduler s(snapshot.at("n").get<int>(), snapshot.at("arms").get<int>(),
                    snapshot.at("split_threshold").get<long long>());
        const auto& arr = snapshot.at("nodes");
        if (arr.size() != s.nodes_.size())
            throw config_error("node count mismatch in checkpoint");
        for (size_t i = 0; i < s.nodes_.size(); ++i) {
            const auto& nj = arr[i];
            SubroutineNode& v = s.nodes_[i];
            v.status = status_from_name(nj.at("status").get<std::string>());
            v.handled = nj.at("handled").get<long long>();
            TsallisInf::Record rec;
            rec.arm_count = s.K_;
            rec.cum_loss_est = nj.at("loss_estimates").get<std::vector<double>>();
            rec.rounds_played = nj.at("rounds").get<long long>();
            v.learner = TsallisInf::from_record(rec);
        }
        s.activated_ = snapshot.at("activated").get<long long>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed checkpoint: ") + e.what());
    }
}

}  // namespace graphband
