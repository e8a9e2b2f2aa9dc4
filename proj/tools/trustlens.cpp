#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "trustlens/trustlens.hpp"

namespace fs = std::filesystem;
using namespace trustlens;

namespace {

struct Options {
    std::string config;
    std::string mode = "both";
    unsigned threads = 1;
    std::string out;
    std::size_t window = 0;
};

RunConfig load(const Options& opt) {
    RunConfig cfg = load_config(opt.config);
    if (!opt.out.empty())
        cfg.output_dir = opt.out;
    cfg.experiment.eval.threads = opt.threads;
    cfg.experiment.run_standard = opt.mode != "hybrid-only";
    cfg.experiment.run_hybrid = opt.mode != "standard-only";
    return cfg;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error("cannot write " + path.string());
    return out;
}

std::string cell(const std::optional<double>& v, int precision) {
    if (!v)
        return "NA";
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << *v;
    return s.str();
}

void print_summary(std::ostream& out, const std::vector<WindowReport>& reports) {
    out << std::left << std::setw(4) << "ts" << std::setw(7) << "users" << std::setw(9) << "ratings"
        << std::setw(10) << "sparsity" << std::setw(10) << "mode" << std::setw(8) << "preds" << std::setw(10)
        << "coverage" << std::setw(8) << "mae%" << std::setw(8) << "F" << std::setw(8) << "F(new)"
        << std::setw(8) << "tgc" << "ucg\n";
    for (const auto& w : reports) {
        for (const auto& m : w.modes) {
            const auto& all = m[Population::all];
            out << std::setw(4) << w.ts_index << std::setw(7) << w.users << std::setw(9) << w.ratings
                << std::setw(10) << cell(w.sparsity, 4) << std::setw(10) << mode_name(m.mode) << std::setw(8)
                << all.predicted << std::setw(10) << cell(all.coverage, 4) << std::setw(8)
                << cell(all.mae_percent, 2) << std::setw(8) << cell(all.fscore, 4) << std::setw(8)
                << cell(m[Population::new_users].fscore, 4) << std::setw(8) << cell(all.tgc, 4)
                << (m.mode == NeighborMode::hybrid ? cell(w.ucg, 4) : "") << '\n';
        }
    }
}

int cmd_run(const Options& opt) {
    const RunConfig cfg = load(opt);
    const auto ratings = ingest(cfg.dataset_path.string(), cfg.dataset_format);
    const auto reports = run_experiment(ratings, cfg.experiment);

    const fs::path csv = cfg.output_dir / cfg.output_csv;
    const fs::path json = cfg.output_dir / cfg.output_json;
    {
        auto out = open_output(csv);
        write_csv(out, reports);
    }
    {
        auto out = open_output(json);
        out << to_json(reports).dump(2) << '\n';
    }
    print_summary(std::cout, reports);
    std::cout << "wrote " << csv.string() << " and " << json.string() << '\n';
    return 0;
}

int cmd_dump_graph(const Options& opt) {
    const RunConfig cfg = load(opt);
    const auto& ex = cfg.experiment;
    if (opt.window >= ex.windows)
        throw config_error("window " + std::to_string(opt.window) + " out of range (0.." +
                           std::to_string(ex.windows - 1) + ")");
    const auto ratings = ingest(cfg.dataset_path.string(), cfg.dataset_format);
    const auto views = slice_windows(ratings, ex.windows, ex.cumulative);
    const RatingsView view = subsample_users(views[opt.window], ex.user_cap, ex.seed + opt.window);
    const TrustGraph g = TrustGraph::build(view, ex.eval.min_overlap, ex.eval.evidence);

    const fs::path path = cfg.output_dir / cfg.output_graph;
    auto out = open_output(path);
    write_edge_list(out, g);
    std::cout << "wrote " << g.edge_count() << " edges to " << path.string() << '\n';
    return 0;
}

int cmd_validate(const Options& opt) {
    std::cout << format_config(load(opt));
    return 0;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trust-augmented collaborative filtering experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config, "config file")->required()->check(CLI::ExistingFile);
    app.add_option("--mode", opt.mode, "which neighbor modes to evaluate")
        ->check(CLI::IsMember({"both", "standard-only", "hybrid-only"}));
    app.add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--out", opt.out, "output directory (overrides output.dir)");

    auto* run = app.add_subcommand("run", "evaluate every window and write reports");
    auto* dump = app.add_subcommand("dump-graph", "write the similarity graph of one window");
    dump->add_option("--window", opt.window, "window index, from 0")->required();
    auto* validate = app.add_subcommand("validate", "check the config and print the resolved settings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed())
            return cmd_run(opt);
        if (dump->parsed())
            return cmd_dump_graph(opt);
        if (validate->parsed())
            return cmd_validate(opt);
    } catch (const std::exception& e) {
        std::cerr << "trustlens: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 2;
}
