#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tigt/cli.hpp"
#include "tigt/config.hpp"
#include "tigt/errors.hpp"
#include "tigt/expressiveness.hpp"
#include "tigt/graph_io.hpp"
#include "tigt/theorems.hpp"
#include "tigt/topology.hpp"
#include "tigt/train.hpp"

namespace tigt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Reported with exit code 2 regardless of where it is raised.
class UsageError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "usage"; }
};

int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kExitIo;
    if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
        dynamic_cast<const ParameterError*>(&e)) {
        return kExitUsage;
    }
    return kExitFailure;
}

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
    json out = json::object();
    for (const auto& [len, count] : h) out[std::to_string(len)] = count;
    return out;
}

json edges_json(const std::vector<Edge>& edges) {
    json out = json::array();
    for (const auto& e : edges) out.push_back({e.u, e.v});
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------

struct GenCslArgs {
    std::size_t nodes = kCslNodes;
    std::vector<std::size_t> skips{kCslSkips.begin(), kCslSkips.end()};
    std::size_t copies = 15;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int gen_csl(const GenCslArgs& a, std::ostream& out) {
    for (std::size_t skip : a.skips) {
        if (skip < 2 || 2 * skip >= a.nodes) {
            throw UsageError("skip " + std::to_string(skip) + " outside [2, " + std::to_string((a.nodes - 1) / 2) +
                             "] for " + std::to_string(a.nodes) + " nodes");
        }
    }
    const auto data = generate_csl_dataset(a.nodes, a.skips, a.copies, a.seed);
    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<ManifestEntry> manifest;
    std::vector<std::size_t> per_class(a.skips.size(), 0);
    for (const auto& lg : data) {
        const std::string name = "csl_" + std::to_string(lg.skip) + "_" +
                                 std::to_string(per_class[static_cast<std::size_t>(lg.label)]++) + ".txt";
        write_graph(lg.graph, dir / name);
        manifest.push_back({name, lg.label, lg.skip});
    }
    write_manifest(manifest, dir / "manifest.json");
    out << json{{"schema_version", 1},
                {"graphs", manifest.size()},
                {"classes", a.skips.size()},
                {"manifest", (dir / "manifest.json").string()}}
               .dump()
        << '\n';
    return kExitOk;
}

int analyze(const std::string& path, std::ostream& out) {
    const Graph g = read_graph(path);
    const CycleBasis basis = cycle_basis(g);
    json j;
    j["schema_version"] = 1;
    j["nodes"] = g.num_nodes();
    j["edges"] = g.num_edges();
    j["components"] = connected_components(g).count;
    j["cycle_basis_size"] = basis.size();
    j["cycle_length_histogram"] = histogram_json(cycle_length_histogram(basis));
    j["articulation_vertices"] = articulation_vertices(g);
    j["bridges"] = edges_json(bridges(g));
    j["euler_invariant"] = euler_invariant(g);
    out << j.dump() << '\n';
    return kExitOk;
}

int distinguish(const std::string& a, const std::string& b, const std::string& method, std::ostream& out) {
    const Graph g = read_graph(a);
    const Graph h = read_graph(b);
    json j;
    j["schema_version"] = 1;
    j["graphs"] = {a, b};
    const bool all = method == "all";
    if (all || method == "wl1") j["wl1"] = wl1_distinguishes(g, h);
    if (all || method == "wl1-augmented") j["wl1_augmented"] = wl1_augmented_distinguishes(g, h);
    if (method == "wl3" || (all && g.num_nodes() <= kWl3MaxNodes && h.num_nodes() <= kWl3MaxNodes)) {
        j["wl3"] = wl3_distinguishes(g, h);
    }
    const bool counts_match = g.num_nodes() == h.num_nodes() && g.num_edges() == h.num_edges();
    if (method == "cycles" || (all && counts_match)) {
        const CycleVerdict v = distinguish_by_cycles(g, h);
        j["cycles"] = {{"distinguished", v.distinguished}, {"witness", v.witness}};
    }
    if (method == "biconnectivity" ||
        (all && counts_match && connected_components(g).count == connected_components(h).count)) {
        const BiconnectivityVerdict v = distinguish_by_biconnectivity(g, h);
        j["biconnectivity"] = {{"distinguished", v.distinguished}, {"witness", v.witness}};
    }
    out << j.dump() << '\n';
    return kExitOk;
}

int verify(std::optional<int> only, const std::vector<std::string>& overrides, std::ostream& out,
           std::ostream& err) {
    TheoremFixtures fixtures = TheoremFixtures::builtin();
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw UsageError("--fixture expects NAME=PATH, got '" + o + "'");
        const std::string name = o.substr(0, eq);
        if (!fixtures.graphs.contains(name)) throw UsageError("unknown fixture '" + name + "'");
        fixtures.graphs.insert_or_assign(name, read_graph(o.substr(eq + 1)));
    }
    if (only && (*only < 1 || *only > 4)) throw UsageError("--only expects a theorem number from 1 to 4");
    const auto records = verify_theorems(fixtures, only);
    std::size_t passed = 0;
    for (const auto& r : records) {
        out << r.to_json().dump() << '\n';
        if (r.pass) ++passed;
    }
    err << passed << "/" << records.size() << " theorems verified\n";
    return passed == records.size() ? kExitOk : kExitFailure;
}

int markov(const std::string& path, std::size_t steps, std::ostream& out) {
    const Graph g = read_graph(path);
    const ConvergenceReport report = rrwp_convergence_report(g, steps);
    const StationaryDistribution pi = stationary(g);
    json j;
    j["schema_version"] = 1;
    j["nodes"] = g.num_nodes();
    j["steps"] = steps;
    j["stationary"] = std::vector<double>(pi.pi.data(), pi.pi.data() + pi.pi.size());
    j["deviations"] = report.deviations;
    j["fitted_rate"] = report.fitted_rate;
    j["envelope_constant"] = report.envelope_constant;
    j["geometric_decay"] = report.geometric_decay;
    out << j.dump() << '\n';
    return kExitOk;
}

struct TrainArgs {
    std::string config;
    std::string seeds;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> layers;
    std::string out_path;
    std::string csv_path;
    bool quiet = false;
};

std::pair<TigtConfig, TrainConfig> load_experiment(const TrainArgs& a) {
    auto [model, train] = experiment_config_from(read_key_values(a.config));
    if (!a.seeds.empty()) train = train_config_from({{"seeds", a.seeds}}, train);
    if (a.workers) train.workers = *a.workers;
    if (a.epochs) train.epochs = *a.epochs;
    if (a.layers) model.num_layers = *a.layers;
    model.validate();
    train.validate();
    return {model, train};
}

ProgressFn progress_for(const TrainArgs& a, std::ostream& err) {
    if (a.quiet) return {};
    return [&err](const std::string& line) { err << line << '\n'; };
}

int train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    const auto [model, tc] = load_experiment(a);
    const RunReport report = train_csl(model, tc, progress_for(a, err));
    const std::string text = report_json(report) + "\n";
    if (a.out_path.empty()) out << text;
    else write_text(a.out_path, text);
    return kExitOk;
}

int ablate(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    const auto [model, tc] = load_experiment(a);
    const AblationTable table = run_ablation_suite(model, tc, progress_for(a, err));
    const std::string csv = ablation_csv(table);
    if (a.csv_path.empty()) out << csv;
    else write_text(a.csv_path, csv);
    if (!a.out_path.empty()) {
        json rows = json::array();
        for (const auto& row : table.rows) {
            rows.push_back({{"variant", row.name},
                            {"flagged", row.flagged},
                            {"report", json::parse(report_json(row.report))}});
        }
        write_text(a.out_path, json{{"schema_version", 1}, {"rows", rows}}.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topology-informed graph transformer laboratory", "tigt"};
    app.require_subcommand(1);

    GenCslArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-csl", "Write a CSL dataset as edge-list files plus manifest.json");
    gen_cmd->add_option("--nodes", gen.nodes, "Nodes per graph")->capture_default_str();
    gen_cmd->add_option("--skips", gen.skips, "Skip lengths, one class each")->delimiter(',')->capture_default_str();
    gen_cmd->add_option("--copies", gen.copies, "Permuted copies per class")->capture_default_str()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "Permutation seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();

    std::string analyze_path;
    auto* analyze_cmd = app.add_subcommand("analyze", "Cycle basis, articulation vertices and bridges of a graph");
    analyze_cmd->add_option("graph", analyze_path, "Edge-list file")->required();

    std::string dist_a, dist_b, method = "all";
    auto* dist_cmd = app.add_subcommand("distinguish", "Compare two graphs with the isomorphism tests");
    dist_cmd->add_option("first", dist_a, "Edge-list file")->required();
    dist_cmd->add_option("second", dist_b, "Edge-list file")->required();
    dist_cmd->add_option("--method", method, "Test to run")
        ->check(CLI::IsMember({"all", "wl1", "wl1-augmented", "wl3", "cycles", "biconnectivity"}))
        ->capture_default_str();

    std::optional<int> only;
    std::vector<std::string> fixtures;
    auto* verify_cmd = app.add_subcommand("verify-theorems", "Run the built-in theorem checks");
    verify_cmd->add_option("--only", only, "Run a single theorem (1-4)");
    verify_cmd->add_option("--fixture", fixtures, "Replace a built-in graph: NAME=PATH (repeatable)");

    std::string markov_path;
    std::size_t steps = kMarkovSteps;
    auto* markov_cmd = app.add_subcommand("markov", "Random-walk powers against the stationary distribution");
    markov_cmd->add_option("graph", markov_path, "Edge-list file")->required();
    markov_cmd->add_option("--steps", steps, "Number of slices K (powers 0..K-1)")->capture_default_str();

    TrainArgs train_args;
    auto add_train_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", train_args.config, "Flat key = value config file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--seeds", train_args.seeds, "Comma-separated seeds, overrides the file");
        cmd->add_option("--workers", train_args.workers, "Seeds trained in parallel")->check(CLI::PositiveNumber);
        cmd->add_option("--epochs", train_args.epochs, "Override the epoch count");
        cmd->add_option("--layers", train_args.layers, "Override num_layers")->check(CLI::PositiveNumber);
        cmd->add_flag("--quiet", train_args.quiet, "No progress lines on stderr");
    };
    auto* train_cmd = app.add_subcommand("train", "Train on CSL and print the run report as JSON");
    add_train_flags(train_cmd);
    train_cmd->add_option("--out", train_args.out_path, "Write the report here instead of stdout");
    auto* ablate_cmd = app.add_subcommand("ablate", "Run the ablation suite and print a CSV table");
    add_train_flags(ablate_cmd);
    ablate_cmd->add_option("--csv", train_args.csv_path, "Write the CSV here instead of stdout");
    ablate_cmd->add_option("--out", train_args.out_path, "Also write every run report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "tigt: error[usage]: " << msg << '\n';
        return kExitUsage;
    }

    try {
        if (*gen_cmd) return gen_csl(gen, out);
        if (*analyze_cmd) return analyze(analyze_path, out);
        if (*dist_cmd) return distinguish(dist_a, dist_b, method, out);
        if (*verify_cmd) return verify(only, fixtures, out, err);
        if (*markov_cmd) return markov(markov_path, steps, out);
        if (*train_cmd) return train(train_args, out, err);
        if (*ablate_cmd) return ablate(train_args, out, err);
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "tigt: error[" << e.kind() << "]: " << msg << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "tigt: error[internal]: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace tigt
