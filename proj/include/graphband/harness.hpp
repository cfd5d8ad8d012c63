#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphband/environment.hpp"
#include "graphband/graph.hpp"
#include "graphband/hierarchy.hpp"

namespace graphband {

enum class Algorithm { Hierarchy, Global, PerVertex };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& text);

struct GraphSource {
    enum class Kind { File, Line, Tree, Gnp };
    Kind kind = Kind::Line;
    std::string path;  // File
    int n = 2;         // Line / Tree / Gnp
    double p = 0.5;    // Gnp edge probability
};

// "line:N", "tree:N", "gnp:N,P", anything else is a file path.
GraphSource parse_graph_source(const std::string& text);

struct LabelSource {
    enum class Kind { FromGraph, File, Blocks };
    Kind kind = Kind::FromGraph;
    std::string path;  // File: '<vertex> <label>' pairs covering 1..n
    int cuts = 0;      // Blocks: f cuts -> f+1 near-equal contiguous runs
};

// "blocks:f" or a file path.
LabelSource parse_label_source(const std::string& text);

struct ExperimentConfig {
    GraphSource graph;
    LabelSource labels;
    int K = 2;
    long long T = 1000;
    long long f_estimate = 0;
    Mode mode = Mode::General;
    std::optional<long long> D_override;
    GeneratorSpec generator;
    Algorithm algo = Algorithm::Hierarchy;
    std::vector<std::uint64_t> seeds;

    // Group means are synthesized from the labels unless env_path is set:
    // the g-th group's best arm is g mod K with mean 0.5 + gap/2, every
    // other arm has mean 0.5 - gap/2.
    std::string env_path;
    double gap = 0.3;

    // Non-tree graphs draw a fresh spanning tree per seed; set to reuse the
    // tree drawn for the first seed everywhere.
    bool fixed_tree = false;

    int workers = 1;
    bool record_trace = true;
};

// The per-seed-invariant part of a config: graph, labels, reward model, and
// how contexts reach the scheduler. For trees (and lines with scrambled ids)
// contexts route through the doubled-edge walk; vertex v enters the
// hierarchy at walk position origin_map[v].
struct ResolvedInstance {
    enum class Pipeline { Line, TreeSpine, UstSpine };

    LabeledGraph graph;          // labels always present
    GroupedEnvironment env;      // one slot per vertex
    Pipeline pipeline = Pipeline::Line;
    PathInstance spine;          // TreeSpine (and UstSpine with fixed_tree)
    long long D = 1;             // split threshold the hierarchy will use
    long long f_graph = 0;       // true cutsize of the labeled graph
};

ResolvedInstance resolve_instance(const ExperimentConfig& cfg);

struct TraceRow {
    long long t = 0;
    int slot = 0;  // context as emitted, i.e. a vertex id
    int arm = 0;   // 0-based; CSV adds 1
    int reward = 0;
    double inst_regret = 0.0;
    double cum_regret = 0.0;
};

struct RunResult {
    std::uint64_t seed = 0;
    long long T = 0;
    int K = 0;
    long long f_true = 0;  // cutsize along the line the scheduler ran on
    long long f_est = 0;
    long long D = 0;
    Algorithm algo = Algorithm::Hierarchy;
    double final_regret = 0.0;
    long long nodes_activated = 0;
    long long bad_nodes = 0;
    std::vector<TraceRow> rows;
};

RunResult run_single(const ResolvedInstance& inst, const ExperimentConfig& cfg,
                     std::uint64_t seed);

// All seeds, optionally on a worker pool, results sorted by seed. When
// on_result is given it is called once per finished run (any order, one at
// a time) and the returned results carry no rows.
std::vector<RunResult> run(const ExperimentConfig& cfg,
                           const std::function<void(const RunResult&)>& on_result = {});

// t,slot,arm,reward,inst_regret,cum_regret
void emit_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
// seed,T,K,f_true,f_est,D,algo,final_regret,nodes_activated,bad_nodes
// plus one aggregate row with seed "mean" averaging the numeric columns.
void emit_summary_csv(std::ostream& out, const std::vector<RunResult>& results);

struct SummaryRow {
    std::string seed;
    long long T = 0;
    int K = 0;
    long long f_true = 0;
    long long f_est = 0;
    long long D = 0;
    std::string algo;
    double final_regret = 0.0;
    double nodes_activated = 0.0;
    double bad_nodes = 0.0;
};

std::vector<SummaryRow> read_summary_csv(std::istream& in);

struct ScalingLine {
    long long T = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double median = 0.0;
};

struct ScalingReport {
    std::vector<ScalingLine> lines;  // ascending T
    double slope = 0.0;
};

// Least-squares slope of log(mean final regret) against log T over the
// distinct T values (rows with nonpositive mean are left out of the fit;
// fewer than two usable points gives slope 0). Needs >= 2 distinct T.
ScalingReport scaling_report(const std::vector<std::pair<long long, double>>& final_regrets);

// T,mean,stderr,median,slope (slope repeated on every row)
void emit_scaling_csv(std::ostream& out, const ScalingReport& report);

// Small gnuplot script plotting the scaling table on log-log axes.
std::string gnuplot_script(const std::string& scaling_csv_path);

}  // namespace graphband
