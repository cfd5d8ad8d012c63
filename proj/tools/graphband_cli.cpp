#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphband/errors.hpp"
#include "graphband/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::uint64_t parse_u64(const std::string& s) {
    try {
        size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw graphband::config_error("bad seed: '" + s + "'");
    }
}

// "7" or "0..49", inclusive on both ends.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) return {parse_u64(text)};
    std::uint64_t s0 = parse_u64(text.substr(0, dots));
    std::uint64_t s1 = parse_u64(text.substr(dots + 2));
    if (s1 < s0) throw graphband::config_error("seed range must be ascending");
    if (s1 - s0 > 1000000) throw graphband::config_error("seed range too large");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = s0; s <= s1; ++s) seeds.push_back(s);
    return seeds;
}

struct SimulateFlags {
    std::string graph;
    std::string labels;
    std::string env;
    int K = 2;
    long long T = 1000;
    long long f = 0;
    std::string mode = "general";
    long long D = 0;
    bool has_D = false;
    std::string gen = "iid";
    std::string algo = "hier";
    std::string seeds;
    std::string out;
    double gap = 0.3;
    bool fixed_tree = false;
    int workers = 1;
};

void do_simulate(const SimulateFlags& fl) {
    graphband::ExperimentConfig cfg;
    cfg.graph = graphband::parse_graph_source(fl.graph);
    if (!fl.labels.empty()) cfg.labels = graphband::parse_label_source(fl.labels);
    cfg.env_path = fl.env;
    cfg.K = fl.K;
    cfg.T = fl.T;
    cfg.f_estimate = fl.f;
    if (fl.mode == "general")
        cfg.mode = graphband::Mode::General;
    else if (fl.mode == "easy")
        cfg.mode = graphband::Mode::Easy;
    else
        throw graphband::config_error("mode must be general or easy, got '" + fl.mode + "'");
    if (fl.has_D) cfg.D_override = fl.D;
    cfg.generator = graphband::parse_generator_spec(fl.gen);
    cfg.algo = graphband::parse_algorithm(fl.algo);
    cfg.seeds = parse_seed_range(fl.seeds);
    cfg.gap = fl.gap;
    cfg.fixed_tree = fl.fixed_tree;
    cfg.workers = fl.workers;

    std::error_code ec;
    fs::create_directories(fl.out, ec);
    if (ec) throw graphband::config_error("cannot create output directory: " + fl.out);

    auto write_trace = [&](const graphband::RunResult& r) {
        fs::path p = fs::path(fl.out) / ("trace_" + std::to_string(r.seed) + ".csv");
        std::ofstream out(p);
        if (!out) throw graphband::config_error("cannot write " + p.string());
        graphband::emit_trace_csv(out, r.rows);
    };
    auto results = graphband::run(cfg, write_trace);

    fs::path sp = fs::path(fl.out) / "summary.csv";
    std::ofstream sout(sp);
    if (!sout) throw graphband::config_error("cannot write " + sp.string());
    graphband::emit_summary_csv(sout, results);
    std::cout << "wrote " << results.size() << " traces and " << sp.string() << '\n';
}

struct ReportFlags {
    std::string in;
    std::string out;
    std::string algo;
    std::string plot;
};

void do_report(const ReportFlags& fl) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::recursive_directory_iterator(fl.in, ec)) {
        if (!entry.is_regular_file()) continue;
        auto name = entry.path().filename().string();
        if (name.rfind("summary", 0) == 0 && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    if (ec) throw graphband::config_error("cannot read directory: " + fl.in);
    if (files.empty())
        throw graphband::config_error("no summary*.csv files under " + fl.in);
    std::sort(files.begin(), files.end());

    std::vector<graphband::SummaryRow> rows;
    for (const auto& p : files) {
        std::ifstream in(p);
        if (!in) throw graphband::config_error("cannot open " + p.string());
        auto part = graphband::read_summary_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }

    std::vector<std::pair<long long, double>> points;
    std::string seen_algo;
    for (const auto& r : rows) {
        if (r.seed == "mean") continue;
        if (!fl.algo.empty() && r.algo != fl.algo) continue;
        if (seen_algo.empty()) seen_algo = r.algo;
        if (r.algo != seen_algo)
            throw graphband::config_error(
                "summaries mix algorithms ('" + seen_algo + "' and '" + r.algo +
                "'); pass --algo to pick one");
        points.emplace_back(r.T, r.final_regret);
    }
    if (points.empty()) throw graphband::config_error("no matching summary rows");

    auto rep = graphband::scaling_report(points);
    std::ofstream out(fl.out);
    if (!out) throw graphband::config_error("cannot write " + fl.out);
    graphband::emit_scaling_csv(out, rep);
    if (!fl.plot.empty()) {
        std::ofstream plot(fl.plot);
        if (!plot) throw graphband::config_error("cannot write " + fl.plot);
        plot << graphband::gnuplot_script(fl.out);
    }
    std::cout << "slope " << rep.slope << " over " << rep.lines.size()
              << " horizons -> " << fl.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-graph bandit simulator: hierarchical Tsallis-INF over "
                 "lines, trees, and general graphs, plus baselines and scaling "
                 "reports"};
    app.require_subcommand(1);

    SimulateFlags sf;
    auto* sim = app.add_subcommand("simulate", "Run seeded replications, write CSV");
    sim->add_option("--graph", sf.graph,
                    "Graph: a file, line:N, tree:N, or gnp:N,P")->required();
    sim->add_option("--labels", sf.labels, "Labels: a file or blocks:f");
    sim->add_option("--env", sf.env, "Environment file (means + slot groups)");
    sim->add_option("--K", sf.K, "Arm count")->required();
    sim->add_option("--T", sf.T, "Horizon")->required();
    sim->add_option("--f", sf.f, "Cut-count estimate handed to the algorithm");
    sim->add_option("--mode", sf.mode, "general or easy");
    auto* dopt = sim->add_option("--D", sf.D, "Split threshold override");
    sim->add_option("--gen", sf.gen, "Context generator: iid, rr, block:d, cutadv:u,q");
    sim->add_option("--algo", sf.algo, "hier, global, or pervertex");
    sim->add_option("--seeds", sf.seeds, "Seed or inclusive range s0..s1")->required();
    sim->add_option("--out", sf.out, "Output directory")->required();
    sim->add_option("--gap", sf.gap, "Synthesized best-arm margin (default 0.3)");
    sim->add_flag("--fixed-tree", sf.fixed_tree,
                  "Reuse one spanning tree across seeds (gnp graphs)");
    sim->add_option("--workers", sf.workers, "Replications run in parallel");

    ReportFlags rf;
    auto* rep = app.add_subcommand("report", "Fit regret-vs-horizon scaling from summaries");
    rep->add_option("--in", rf.in, "Directory searched recursively for summary*.csv files")->required();
    rep->add_option("--out", rf.out, "Scaling table destination")->required();
    rep->add_option("--algo", rf.algo, "Only use rows for this algorithm");
    rep->add_option("--plot", rf.plot, "Also write a gnuplot script here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        sf.has_D = dopt->count() > 0;
        if (sim->parsed()) do_simulate(sf);
        if (rep->parsed()) do_report(rf);
        return 0;
    } catch (const graphband::invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const graphband::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
