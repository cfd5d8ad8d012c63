#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graphband/rng.hpp"

namespace graphband {

// Unordered edge between 1-based vertex ids.
struct Edge {
    int u = 0;
    int v = 0;
};

// Vertex-labeled undirected graph. Vertices are 1..n. `labels` is either
// empty (unlabeled) or holds one label id per vertex, labels[v-1].
// Labels are dense small nonnegative ints; equal label = same group.
struct LabeledGraph {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<int> labels;

    bool labeled() const { return !labels.empty(); }
    int label(int v) const { return labels[static_cast<size_t>(v) - 1]; }
};

// Line-graph instance produced from a tree: positions 1..length with
// position i adjacent to i+1. origin_map[v-1] is the first position at
// which original vertex v appears; every vertex appears at least once.
struct PathInstance {
    int length = 0;
    std::vector<int> position_label;  // [p-1]
    std::vector<int> origin_map;      // [v-1] -> position

    int label(int pos) const { return position_label[static_cast<size_t>(pos) - 1]; }
    int position_of(int v) const { return origin_map[static_cast<size_t>(v) - 1]; }
};

// Throws config_error on self-loops, duplicate edges, endpoints outside
// 1..n, or a label vector of the wrong length.
void validate(const LabeledGraph& g);

// Sorted neighbor lists, adj[v-1] ascending.
std::vector<std::vector<int>> adjacency(const LabeledGraph& g);

bool is_connected(const LabeledGraph& g);
bool is_tree(const LabeledGraph& g);
// A path whose vertices appear in id order: i adjacent to i+1 and nothing else.
bool is_id_ordered_line(const LabeledGraph& g);

// Number of edges whose endpoints carry different labels.
int cutsize(const LabeledGraph& g);
int cutsize(const PathInstance& path);

// Minimum cutsize over all labelings that agree with the labels of the
// `observed` vertices (everything else free). Tree or line input only.
int observable_cutsize(const LabeledGraph& g, const std::vector<int>& observed);

// Children of `vertex` when the tree is rooted at 1, ascending id order.
std::vector<int> dfs_child_order(const LabeledGraph& tree, int vertex);

// Depth-first walk from vertex 1 traversing every tree edge exactly twice,
// emitting the current vertex at each step. The emitted sequence (length
// 2n-1) is the path; its cutsize is at most twice the tree's because every
// path edge corresponds to one traversal of one tree edge.
PathInstance euler_spine(const LabeledGraph& g);

// Uniformly random spanning tree via loop-erased random walks (Wilson's
// algorithm); labels are copied from the input.
LabeledGraph wilson_ust(const LabeledGraph& g, Rng& rng);

// Text format: line `n m L`, then m edge lines `u v`, then n label lines
// `vertex label_id`. `#` starts a comment.
LabeledGraph read_graph(std::istream& in);
LabeledGraph read_graph_file(const std::string& path);
void write_graph(const LabeledGraph& g, std::ostream& out);
void write_graph_file(const LabeledGraph& g, const std::string& path);

}  // namespace graphband
