#include "graphband/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "graphband/errors.hpp"
#include "tokenize.hpp"

namespace graphband {

void validate(const LabeledGraph& g) {
    if (g.n < 1) throw config_error("graph must have at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g.edges) {
        if (e.u < 1 || e.u > g.n || e.v < 1 || e.v > g.n)
            throw config_error("edge endpoint outside 1..n");
        if (e.u == e.v) throw config_error("self-loop");
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) throw config_error("duplicate edge");
    }
    if (!g.labels.empty() && static_cast<int>(g.labels.size()) != g.n)
        throw config_error("label vector must cover every vertex");
    for (int lab : g.labels)
        if (lab < 0) throw config_error("negative label id");
}

std::vector<std::vector<int>> adjacency(const LabeledGraph& g) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(g.n));
    for (const Edge& e : g.edges) {
        adj[static_cast<size_t>(e.u) - 1].push_back(e.v);
        adj[static_cast<size_t>(e.v) - 1].push_back(e.u);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

bool is_connected(const LabeledGraph& g) {
    if (g.n == 0) return false;
    auto adj = adjacency(g);
    std::vector<char> seen(static_cast<size_t>(g.n), 0);
    std::vector<int> stack{1};
    seen[0] = 1;
    int count = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++count;
        for (int w : adj[static_cast<size_t>(v) - 1]) {
            if (!seen[static_cast<size_t>(w) - 1]) {
                seen[static_cast<size_t>(w) - 1] = 1;
                stack.push_back(w);
            }
        }
    }
    return count == g.n;
}

bool is_tree(const LabeledGraph& g) {
    return static_cast<int>(g.edges.size()) == g.n - 1 && is_connected(g);
}

bool is_id_ordered_line(const LabeledGraph& g) {
    if (static_cast<int>(g.edges.size()) != g.n - 1) return false;
    std::set<std::pair<int, int>> want;
    for (int i = 1; i < g.n; ++i) want.insert({i, i + 1});
    for (const Edge& e : g.edges) {
        auto key = std::minmax(e.u, e.v);
        if (!want.erase(key)) return false;
    }
    return want.empty();
}

int cutsize(const LabeledGraph& g) {
    if (!g.labeled()) throw config_error("unlabeled graph");
    int f = 0;
    for (const Edge& e : g.edges)
        if (g.label(e.u) != g.label(e.v)) ++f;
    return f;
}

int cutsize(const PathInstance& path) {
    int f = 0;
    for (int p = 1; p < path.length; ++p)
        if (path.label(p) != path.label(p + 1)) ++f;
    return f;
}

namespace {

// parent[] and a children-last iteration order for the tree rooted at 1.
struct RootedTree {
    std::vector<int> parent;  // [v-1], parent of root = 0
    std::vector<int> order;   // vertices in BFS order from the root
};

RootedTree root_at_one(const LabeledGraph& g, const std::vector<std::vector<int>>& adj) {
    RootedTree rt;
    rt.parent.assign(static_cast<size_t>(g.n), -1);
    rt.order.reserve(static_cast<size_t>(g.n));
    rt.parent[0] = 0;
    std::vector<int> queue{1};
    for (size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        rt.order.push_back(v);
        for (int w : adj[static_cast<size_t>(v) - 1]) {
            if (rt.parent[static_cast<size_t>(w) - 1] == -1) {
                rt.parent[static_cast<size_t>(w) - 1] = v;
                queue.push_back(w);
            }
        }
    }
    return rt;
}

}  // namespace

int observable_cutsize(const LabeledGraph& g, const std::vector<int>& observed) {
    if (!is_tree(g)) throw config_error("requires tree or line");
    std::vector<char> obs(static_cast<size_t>(g.n), 0);
    for (int v : observed) {
        if (v < 1 || v > g.n) throw config_error("observed vertex outside 1..n");
        obs[static_cast<size_t>(v) - 1] = 1;
    }
    if (observed.empty()) return 0;
    if (!g.labeled()) throw config_error("unlabeled graph");

    // Candidate labels: the ones seen at observed vertices. A fresh label on
    // an unobserved region can always be replaced by a neighbor's label
    // without increasing the cut count, so this set is sufficient.
    std::vector<int> cand;
    for (int v = 1; v <= g.n; ++v)
        if (obs[static_cast<size_t>(v) - 1]) cand.push_back(g.label(v));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    const int nc = static_cast<int>(cand.size());

    auto adj = adjacency(g);
    RootedTree rt = root_at_one(g, adj);

    // cost[v][c]: min cut edges within the subtree of v when v takes cand[c].
    const int big = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> cost(static_cast<size_t>(g.n), std::vector<int>(static_cast<size_t>(nc), 0));
    for (auto it = rt.order.rbegin(); it != rt.order.rend(); ++it) {
        int v = *it;
        auto& cv = cost[static_cast<size_t>(v) - 1];
        if (obs[static_cast<size_t>(v) - 1]) {
            for (int c = 0; c < nc; ++c)
                if (cand[static_cast<size_t>(c)] != g.label(v)) cv[static_cast<size_t>(c)] = big;
        }
        for (int w : adj[static_cast<size_t>(v) - 1]) {
            if (w == rt.parent[static_cast<size_t>(v) - 1] || rt.parent[static_cast<size_t>(w) - 1] != v) continue;
            const auto& cw = cost[static_cast<size_t>(w) - 1];
            int best_w = *std::min_element(cw.begin(), cw.end());
            for (int c = 0; c < nc; ++c) {
                int keep = cw[static_cast<size_t>(c)];  // same label, no cut
                cv[static_cast<size_t>(c)] += std::min(keep, best_w + 1);
            }
        }
    }
    const auto& croot = cost[0];
    return *std::min_element(croot.begin(), croot.end());
}

std::vector<int> dfs_child_order(const LabeledGraph& tree, int vertex) {
    if (!is_tree(tree)) throw config_error("not a tree");
    if (vertex < 1 || vertex > tree.n) throw config_error("vertex outside 1..n");
    auto adj = adjacency(tree);
    RootedTree rt = root_at_one(tree, adj);
    std::vector<int> children;
    for (int w : adj[static_cast<size_t>(vertex) - 1])
        if (w != rt.parent[static_cast<size_t>(vertex) - 1]) children.push_back(w);
    return children;  // adjacency is sorted, so children come out ascending
}

PathInstance euler_spine(const LabeledGraph& g) {
    if (!is_tree(g)) throw config_error("not a tree");
    if (!g.labeled()) throw config_error("unlabeled graph");
    auto adj = adjacency(g);
    RootedTree rt = root_at_one(g, adj);

    std::vector<std::vector<int>> children(static_cast<size_t>(g.n));
    for (int v = 1; v <= g.n; ++v)
        for (int w : adj[static_cast<size_t>(v) - 1])
            if (w != rt.parent[static_cast<size_t>(v) - 1] && rt.parent[static_cast<size_t>(w) - 1] == v)
                children[static_cast<size_t>(v) - 1].push_back(w);

    PathInstance path;
    path.length = 2 * g.n - 1;
    path.position_label.reserve(static_cast<size_t>(path.length));
    path.origin_map.assign(static_cast<size_t>(g.n), 0);

    auto emit = [&](int v) {
        path.position_label.push_back(g.label(v));
        int pos = static_cast<int>(path.position_label.size());
        if (path.origin_map[static_cast<size_t>(v) - 1] == 0) path.origin_map[static_cast<size_t>(v) - 1] = pos;
    };

    std::vector<std::pair<int, size_t>> stack;  // (vertex, next child slot)
    stack.emplace_back(1, 0);
    emit(1);
    while (!stack.empty()) {
        auto& [v, i] = stack.back();
        const auto& kids = children[static_cast<size_t>(v) - 1];
        if (i < kids.size()) {
            int c = kids[i++];
            stack.emplace_back(c, 0);
            emit(c);
        } else {
            stack.pop_back();
            if (!stack.empty()) emit(stack.back().first);
        }
    }
    return path;
}

LabeledGraph wilson_ust(const LabeledGraph& g, Rng& rng) {
    if (!is_connected(g)) throw config_error("graph not connected");
    auto adj = adjacency(g);

    std::vector<char> in_tree(static_cast<size_t>(g.n), 0);
    std::vector<int> next(static_cast<size_t>(g.n), 0);
    in_tree[0] = 1;  // root the tree at vertex 1

    LabeledGraph tree;
    tree.n = g.n;
    tree.labels = g.labels;
    tree.edges.reserve(static_cast<size_t>(g.n) - 1);

    for (int start = 2; start <= g.n; ++start) {
        if (in_tree[static_cast<size_t>(start) - 1]) continue;
        // Random walk until the current tree is hit; the `next` pointers
        // overwrite themselves, which is exactly loop erasure.
        int v = start;
        while (!in_tree[static_cast<size_t>(v) - 1]) {
            const auto& nb = adj[static_cast<size_t>(v) - 1];
            int w = nb[rng.next_below(nb.size())];
            next[static_cast<size_t>(v) - 1] = w;
            v = w;
        }
        v = start;
        while (!in_tree[static_cast<size_t>(v) - 1]) {
            int w = next[static_cast<size_t>(v) - 1];
            tree.edges.push_back({std::min(v, w), std::max(v, w)});
            in_tree[static_cast<size_t>(v) - 1] = 1;
            v = w;
        }
    }
    return tree;
}

LabeledGraph read_graph(std::istream& in) {
    auto toks = detail::tokenize(in);
    size_t i = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (i >= toks.size()) throw config_error(std::string("graph file truncated, expected ") + what);
        return toks[i++];
    };
    LabeledGraph g;
    g.n = static_cast<int>(detail::to_ll(need("n"), "n"));
    long long m = detail::to_ll(need("m"), "m");
    long long nlabels = detail::to_ll(need("L"), "L");
    if (g.n < 1 || m < 0 || nlabels < 0) throw config_error("bad graph header");
    for (long long e = 0; e < m; ++e) {
        int u = static_cast<int>(detail::to_ll(need("edge endpoint"), "edge endpoint"));
        int v = static_cast<int>(detail::to_ll(need("edge endpoint"), "edge endpoint"));
        g.edges.push_back({u, v});
    }
    if (nlabels > 0) {
        g.labels.assign(static_cast<size_t>(g.n), -1);
        for (int k = 0; k < g.n; ++k) {
            int v = static_cast<int>(detail::to_ll(need("label vertex"), "label vertex"));
            int lab = static_cast<int>(detail::to_ll(need("label id"), "label id"));
            if (v < 1 || v > g.n) throw config_error("label line names vertex outside 1..n");
            if (lab < 0 || lab >= nlabels) throw config_error("label id outside 0..L-1");
            g.labels[static_cast<size_t>(v) - 1] = lab;
        }
        for (int lab : g.labels)
            if (lab < 0) throw config_error("label vector must cover every vertex");
    }
    if (i != toks.size()) throw config_error("trailing tokens in graph file");
    validate(g);
    return g;
}

LabeledGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(const LabeledGraph& g, std::ostream& out) {
    int nlabels = 0;
    for (int lab : g.labels) nlabels = std::max(nlabels, lab + 1);
    out << g.n << ' ' << g.edges.size() << ' ' << nlabels << '\n';
    for (const Edge& e : g.edges) out << e.u << ' ' << e.v << '\n';
    for (int v = 1; v <= g.n && g.labeled(); ++v) out << v << ' ' << g.label(v) << '\n';
}

void write_graph_file(const LabeledGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    write_graph(g, out);
}

}  // namespace graphband
