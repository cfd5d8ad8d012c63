#include "graphband/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "graphband/errors.hpp"
#include "tokenize.hpp"

namespace graphband {

namespace {

constexpr const char* kTraceHeader = "t,slot,arm,reward,inst_regret,cum_regret";
constexpr const char* kSummaryHeader =
    "seed,T,K,f_true,f_est,D,algo,final_regret,nodes_activated,bad_nodes";
constexpr const char* kScalingHeader = "T,mean,stderr,median,slope";

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

LabeledGraph make_line(int n) {
    LabeledGraph g;
    g.n = n;
    for (int v = 1; v < n; ++v) g.edges.push_back({v, v + 1});
    return g;
}

// Random recursive tree: vertex v attaches to a uniform earlier vertex.
LabeledGraph make_random_tree(int n, Rng& rng) {
    LabeledGraph g;
    g.n = n;
    for (int v = 2; v <= n; ++v) g.edges.push_back({rng.next_index(v - 1), v});
    return g;
}

LabeledGraph make_connected_gnp(int n, double p, Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        LabeledGraph g;
        g.n = n;
        for (int u = 1; u <= n; ++u)
            for (int v = u + 1; v <= n; ++v)
                if (rng.bernoulli(p)) g.edges.push_back({u, v});
        if (is_connected(g)) return g;
    }
    throw config_error("gnp graph came out disconnected 1000 times; raise P");
}

std::vector<int> block_labels(int n, int cuts) {
    if (cuts < 0 || cuts > n - 1)
        throw config_error("blocks:<f> needs 0 <= f <= n-1");
    int runs = cuts + 1;
    int base = n / runs;
    int rem = n % runs;
    std::vector<int> lab;
    lab.reserve(static_cast<size_t>(n));
    for (int r = 0; r < runs; ++r)
        for (int i = 0; i < base + (r < rem ? 1 : 0); ++i) lab.push_back(r);
    return lab;
}

std::vector<int> read_labels_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open labels file: " + path);
    auto toks = detail::tokenize(in);
    if (toks.size() != static_cast<size_t>(2) * n)
        throw config_error("labels file must hold one '<vertex> <label>' pair per vertex");
    std::vector<int> lab(static_cast<size_t>(n), -1);
    for (int k = 0; k < n; ++k) {
        int v = static_cast<int>(detail::to_ll(toks[2 * k], "label vertex"));
        int l = static_cast<int>(detail::to_ll(toks[2 * k + 1], "label id"));
        if (v < 1 || v > n) throw config_error("labels file names vertex outside 1..n");
        if (l < 0) throw config_error("label ids must be nonnegative");
        if (lab[static_cast<size_t>(v) - 1] != -1)
            throw config_error("vertex " + std::to_string(v) + " labeled twice");
        lab[static_cast<size_t>(v) - 1] = l;
    }
    return lab;
}

GroupedEnvironment synthesize_environment(const std::vector<int>& labels, int K, double gap) {
    if (!(gap > 0.0 && gap <= 1.0)) throw config_error("gap must be in (0,1]");
    std::set<int> distinct(labels.begin(), labels.end());
    std::map<int, std::vector<double>> means;
    int g = 0;
    for (int lab : distinct) {
        std::vector<double> mu(static_cast<size_t>(K), 0.5 - gap / 2.0);
        mu[static_cast<size_t>(g % K)] = 0.5 + gap / 2.0;
        means.emplace(lab, std::move(mu));
        ++g;
    }
    return GroupedEnvironment(K, labels, std::move(means));
}

int path_cutsize(const std::vector<int>& labels) {
    int c = 0;
    for (size_t i = 1; i < labels.size(); ++i)
        if (labels[i] != labels[i - 1]) ++c;
    return c;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Hierarchy: return "hier";
        case Algorithm::Global: return "global";
        case Algorithm::PerVertex: return "pervertex";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& text) {
    if (text == "hier") return Algorithm::Hierarchy;
    if (text == "global") return Algorithm::Global;
    if (text == "pervertex") return Algorithm::PerVertex;
    throw config_error("unknown algorithm '" + text + "' (want hier, global, pervertex)");
}

GraphSource parse_graph_source(const std::string& text) {
    GraphSource src;
    if (text.rfind("line:", 0) == 0) {
        src.kind = GraphSource::Kind::Line;
        src.n = static_cast<int>(detail::to_ll(text.substr(5), "line size"));
        return src;
    }
    if (text.rfind("tree:", 0) == 0) {
        src.kind = GraphSource::Kind::Tree;
        src.n = static_cast<int>(detail::to_ll(text.substr(5), "tree size"));
        return src;
    }
    if (text.rfind("gnp:", 0) == 0) {
        std::string rest = text.substr(4);
        auto comma = rest.find(',');
        if (comma == std::string::npos) throw config_error("gnp takes <N>,<P>");
        src.kind = GraphSource::Kind::Gnp;
        src.n = static_cast<int>(detail::to_ll(rest.substr(0, comma), "gnp size"));
        src.p = detail::to_double(rest.substr(comma + 1), "gnp edge probability");
        return src;
    }
    src.kind = GraphSource::Kind::File;
    src.path = text;
    return src;
}

LabelSource parse_label_source(const std::string& text) {
    LabelSource src;
    if (text.rfind("blocks:", 0) == 0) {
        src.kind = LabelSource::Kind::Blocks;
        src.cuts = static_cast<int>(detail::to_ll(text.substr(7), "block cut count"));
        return src;
    }
    src.kind = LabelSource::Kind::File;
    src.path = text;
    return src;
}

ResolvedInstance resolve_instance(const ExperimentConfig& cfg) {
    if (cfg.T < 1) throw config_error("horizon must be at least 1");
    if (cfg.K < 1) throw config_error("arm count must be at least 1");
    if (cfg.f_estimate < 0) throw config_error("cut estimate must be nonnegative");
    if (cfg.seeds.empty()) throw config_error("need at least one seed");
    if (cfg.D_override && *cfg.D_override < 1)
        throw config_error("split threshold override must be at least 1");

    Rng topo = Rng::stream(cfg.seeds.front(), "topology");
    LabeledGraph g;
    switch (cfg.graph.kind) {
        case GraphSource::Kind::File:
            g = read_graph_file(cfg.graph.path);
            break;
        case GraphSource::Kind::Line:
            if (cfg.graph.n < 2) throw config_error("line needs at least 2 vertices");
            g = make_line(cfg.graph.n);
            break;
        case GraphSource::Kind::Tree:
            if (cfg.graph.n < 2) throw config_error("tree needs at least 2 vertices");
            g = make_random_tree(cfg.graph.n, topo);
            break;
        case GraphSource::Kind::Gnp:
            if (cfg.graph.n < 2) throw config_error("gnp needs at least 2 vertices");
            if (!(cfg.graph.p >= 0.0 && cfg.graph.p <= 1.0))
                throw config_error("gnp edge probability must be in [0,1]");
            g = make_connected_gnp(cfg.graph.n, cfg.graph.p, topo);
            break;
    }

    if (!cfg.env_path.empty() && cfg.labels.kind != LabelSource::Kind::FromGraph)
        throw config_error("pass either a label source or an environment file, not both");

    switch (cfg.labels.kind) {
        case LabelSource::Kind::FromGraph:
            break;
        case LabelSource::Kind::Blocks:
            g.labels = block_labels(g.n, cfg.labels.cuts);
            break;
        case LabelSource::Kind::File:
            g.labels = read_labels_file(cfg.labels.path, g.n);
            break;
    }

    std::optional<GroupedEnvironment> env;
    if (!cfg.env_path.empty()) {
        env = read_environment_file(cfg.env_path);
        if (env->slot_count() != g.n)
            throw config_error("environment has " + std::to_string(env->slot_count()) +
                               " slots but the graph has " + std::to_string(g.n) +
                               " vertices");
        if (env->arm_count() != cfg.K)
            throw config_error("environment has K=" + std::to_string(env->arm_count()) +
                               " but the flags say K=" + std::to_string(cfg.K));
        // The environment's grouping is the ground truth; labels follow it.
        g.labels.clear();
        for (int v = 1; v <= g.n; ++v) g.labels.push_back(env->group_of(v));
    } else {
        if (!g.labeled())
            throw config_error("graph has no labels; pass a label source or environment");
        env = synthesize_environment(g.labels, cfg.K, cfg.gap);
    }
    validate(g);

    ResolvedInstance::Pipeline pipeline;
    PathInstance spine;
    if (is_id_ordered_line(g)) {
        pipeline = ResolvedInstance::Pipeline::Line;
    } else if (is_tree(g)) {
        pipeline = ResolvedInstance::Pipeline::TreeSpine;
        spine = euler_spine(g);
    } else {
        if (!is_connected(g)) throw config_error("graph must be connected");
        pipeline = ResolvedInstance::Pipeline::UstSpine;
        if (cfg.fixed_tree) {
            Rng wilson = Rng::stream(cfg.seeds.front(), "wilson");
            spine = euler_spine(wilson_ust(g, wilson));
        }
    }

    // The scheduler runs over the line the contexts land on; the walk both
    // doubles the cut count (at worst) and stretches the line to 2n-1.
    bool on_spine = pipeline != ResolvedInstance::Pipeline::Line;
    int line_len = on_spine ? 2 * g.n - 1 : g.n;
    long long f_fed = on_spine ? 2 * cfg.f_estimate : cfg.f_estimate;
    long long D = cfg.D_override
                      ? *cfg.D_override
                      : choose_split_threshold(cfg.T, cfg.K, f_fed, line_len, cfg.mode);

    long long f_graph = cutsize(g);
    return ResolvedInstance{std::move(g),   std::move(*env), pipeline,
                            std::move(spine), D,              f_graph};
}

RunResult run_single(const ResolvedInstance& inst, const ExperimentConfig& cfg,
                     std::uint64_t seed) {
    Rng env_rng = Rng::stream(seed, "env");
    Rng gen_rng = Rng::stream(seed, "gen");
    Rng learner_rng = Rng::stream(seed, "learner");

    const int n = inst.graph.n;
    const PathInstance* spine = nullptr;
    PathInstance own_spine;
    if (inst.pipeline == ResolvedInstance::Pipeline::TreeSpine ||
        (inst.pipeline == ResolvedInstance::Pipeline::UstSpine && cfg.fixed_tree)) {
        spine = &inst.spine;
    } else if (inst.pipeline == ResolvedInstance::Pipeline::UstSpine) {
        Rng wilson_rng = Rng::stream(seed, "wilson");
        own_spine = euler_spine(wilson_ust(inst.graph, wilson_rng));
        spine = &own_spine;
    }

    const std::vector<int>& line_labels = spine ? spine->position_label : inst.graph.labels;
    const int line_len = spine ? spine->length : n;
    const long long f_line = path_cutsize(line_labels);

    std::optional<Scheduler> sched;
    std::optional<TsallisInf> global;
    std::vector<std::optional<TsallisInf>> per_vertex;
    switch (cfg.algo) {
        case Algorithm::Hierarchy:
            sched.emplace(line_len, cfg.K, inst.D);
            break;
        case Algorithm::Global:
            global.emplace(cfg.K);
            break;
        case Algorithm::PerVertex:
            per_vertex.resize(static_cast<size_t>(n));
            break;
    }

    ContextGenerator gen(cfg.generator, n);
    RunResult res;
    res.seed = seed;
    res.T = cfg.T;
    res.K = cfg.K;
    res.f_true = f_line;
    res.f_est = cfg.f_estimate;
    res.D = inst.D;
    res.algo = cfg.algo;
    if (cfg.record_trace) res.rows.reserve(static_cast<size_t>(cfg.T));

    double cum = 0.0;
    for (long long t = 1; t <= cfg.T; ++t) {
        int v = gen.next(gen_rng);
        int arm = -1;
        Ticket ticket;
        switch (cfg.algo) {
            case Algorithm::Hierarchy: {
                int slot = spine ? spine->position_of(v) : v;
                ticket = sched->serve(slot, learner_rng);
                arm = ticket.arm;
                break;
            }
            case Algorithm::Global:
                arm = global->sample_arm(learner_rng);
                break;
            case Algorithm::PerVertex: {
                auto& cell = per_vertex[static_cast<size_t>(v) - 1];
                if (!cell) cell.emplace(cfg.K);
                arm = cell->sample_arm(learner_rng);
                break;
            }
        }

        int reward = inst.env.pull(v, arm, env_rng);
        double loss = 1.0 - reward;
        switch (cfg.algo) {
            case Algorithm::Hierarchy:
                sched->feedback(ticket, loss);
                break;
            case Algorithm::Global:
                global->update(ArmOutcome{arm, loss});
                break;
            case Algorithm::PerVertex:
                per_vertex[static_cast<size_t>(v) - 1]->update(ArmOutcome{arm, loss});
                break;
        }

        double inst_regret = inst.env.instant_pseudo_regret(v, arm);
        cum += inst_regret;
        if (cfg.record_trace)
            res.rows.push_back(TraceRow{t, v, arm, reward, inst_regret, cum});
    }

    res.final_regret = cum;
    if (cfg.algo == Algorithm::Hierarchy) {
        if (sched->total_handled() != cfg.T)
            throw invariant_error("scheduler lost rounds: handled " +
                                  std::to_string(sched->total_handled()) + " of " +
                                  std::to_string(cfg.T));
        long long cap = 2 + 2 * ((cfg.T + inst.D - 1) / inst.D);
        if (sched->activated_count() > cap)
            throw invariant_error("activation bound violated: " +
                                  std::to_string(sched->activated_count()) + " > " +
                                  std::to_string(cap));
        res.nodes_activated = sched->activated_count();
        res.bad_nodes = sched->count_bad(line_labels);
        if (res.bad_nodes > f_line * sched->level_count())
            throw invariant_error("bad-node bound violated");
    } else if (cfg.algo == Algorithm::Global) {
        res.nodes_activated = 1;
    } else {
        res.nodes_activated = static_cast<long long>(
            std::count_if(per_vertex.begin(), per_vertex.end(),
                          [](const auto& c) { return c.has_value(); }));
    }
    return res;
}

std::vector<RunResult> run(const ExperimentConfig& cfg,
                           const std::function<void(const RunResult&)>& on_result) {
    ResolvedInstance inst = resolve_instance(cfg);
    std::vector<std::optional<RunResult>> slots(cfg.seeds.size());

    int workers = std::clamp(cfg.workers, 1, static_cast<int>(cfg.seeds.size()));
    std::atomic<size_t> next{0};
    std::mutex emit_mu;
    auto drain = [&] {
        for (size_t i = next.fetch_add(1); i < cfg.seeds.size(); i = next.fetch_add(1)) {
            RunResult r = run_single(inst, cfg, cfg.seeds[i]);
            std::lock_guard<std::mutex> lock(emit_mu);
            if (on_result) {
                on_result(r);
                r.rows.clear();
                r.rows.shrink_to_fit();
            }
            slots[i] = std::move(r);
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }

    std::vector<RunResult> results;
    results.reserve(slots.size());
    for (auto& s : slots) results.push_back(std::move(*s));
    std::sort(results.begin(), results.end(),
              [](const RunResult& a, const RunResult& b) { return a.seed < b.seed; });
    return results;
}

void emit_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << kTraceHeader << '\n';
    for (const TraceRow& r : rows) {
        out << r.t << ',' << r.slot << ',' << (r.arm + 1) << ',' << r.reward << ','
            << fmt(r.inst_regret) << ',' << fmt(r.cum_regret) << '\n';
    }
}

void emit_summary_csv(std::ostream& out, const std::vector<RunResult>& results) {
    out << kSummaryHeader << '\n';
    for (const RunResult& r : results) {
        out << r.seed << ',' << r.T << ',' << r.K << ',' << r.f_true << ',' << r.f_est
            << ',' << r.D << ',' << algorithm_name(r.algo) << ',' << fmt(r.final_regret)
            << ',' << r.nodes_activated << ',' << r.bad_nodes << '\n';
    }
    if (results.empty()) return;
    auto mean_of = [&](auto&& get) {
        double s = 0.0;
        for (const RunResult& r : results) s += static_cast<double>(get(r));
        return s / static_cast<double>(results.size());
    };
    out << "mean," << fmt(mean_of([](const RunResult& r) { return r.T; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.K; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.f_true; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.f_est; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.D; })) << ','
        << algorithm_name(results.front().algo) << ','
        << fmt(mean_of([](const RunResult& r) { return r.final_regret; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.nodes_activated; })) << ','
        << fmt(mean_of([](const RunResult& r) { return r.bad_nodes; })) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader)
        throw config_error("summary file must start with '" + std::string(kSummaryHeader) +
                           "'");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 10) throw config_error("summary row with wrong field count: " + line);
        SummaryRow r;
        r.seed = f[0];
        r.T = detail::to_ll(f[1], "T");
        r.K = static_cast<int>(detail::to_ll(f[2], "K"));
        r.f_true = detail::to_ll(f[3], "f_true");
        r.f_est = detail::to_ll(f[4], "f_est");
        r.D = detail::to_ll(f[5], "D");
        r.algo = f[6];
        r.final_regret = detail::to_double(f[7], "final_regret");
        r.nodes_activated = detail::to_double(f[8], "nodes_activated");
        r.bad_nodes = detail::to_double(f[9], "bad_nodes");
        rows.push_back(std::move(r));
    }
    return rows;
}

ScalingReport scaling_report(const std::vector<std::pair<long long, double>>& final_regrets) {
    std::map<long long, std::vector<double>> by_T;
    for (const auto& [T, reg] : final_regrets) by_T[T].push_back(reg);
    if (by_T.size() < 2) throw config_error("scaling fit needs at least two distinct horizons");

    ScalingReport rep;
    for (auto& [T, vals] : by_T) {
        ScalingLine line;
        line.T = T;
        double s = 0.0;
        for (double v : vals) s += v;
        line.mean = s / static_cast<double>(vals.size());
        if (vals.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - line.mean) * (v - line.mean);
            double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            line.stderr_ = sd / std::sqrt(static_cast<double>(vals.size()));
        }
        std::sort(vals.begin(), vals.end());
        size_t m = vals.size() / 2;
        line.median = vals.size() % 2 ? vals[m] : 0.5 * (vals[m - 1] + vals[m]);
        rep.lines.push_back(line);
    }

    // Log-log fit over horizons with positive mean regret; a run that never
    // regrets anything (K = 1) contributes no points and the slope is 0.
    std::vector<double> xs, ys;
    for (const ScalingLine& l : rep.lines) {
        if (l.mean > 0.0) {
            xs.push_back(std::log(static_cast<double>(l.T)));
            ys.push_back(std::log(l.mean));
        }
    }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        if (den > 0.0) rep.slope = num / den;
    }
    return rep;
}

void emit_scaling_csv(std::ostream& out, const ScalingReport& report) {
    out << kScalingHeader << '\n';
    for (const ScalingLine& l : report.lines) {
        out << l.T << ',' << fmt(l.mean) << ',' << fmt(l.stderr_) << ',' << fmt(l.median)
            << ',' << fmt(report.slope) << '\n';
    }
}

std::string gnuplot_script(const std::string& scaling_csv_path) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set xlabel 'T'\n"
      << "set ylabel 'mean final regret'\n"
      << "plot '" << scaling_csv_path
      << "' skip 1 using 1:2:3 with yerrorlines title 'measured'\n";
    return s.str();
}

}  // namespace graphband
