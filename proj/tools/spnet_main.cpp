// Command-line front end: decompose, realize, reff, voltages, h2, optimize,
// check, bench. Exit codes: 0 ok, 1 usage, 2 domain error, 3 verification
// failure.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "spnet/decompose.hpp"
#include "spnet/electrical.hpp"
#include "spnet/graph.hpp"
#include "spnet/h2.hpp"
#include "spnet/oracle.hpp"
#include "spnet/random_gen.hpp"
#include "spnet/reweight.hpp"
#include "spnet/tree.hpp"

using namespace spnet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerification = 3;

uint64_t default_seed() {
    if (const char* env = std::getenv("SPC_SEED")) {
        char* end = nullptr;
        uint64_t s = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return s;
        std::cerr << "warning: ignoring unparsable SPC_SEED\n";
    }
    return 0;
}

DecompTree tree_from_input(const std::string& tree_path, const std::string& graph_path,
                           int source, int sink) {
    if (!tree_path.empty()) {
        if (tree_path == "-") {
            std::stringstream ss;
            ss << std::cin.rdbuf();
            return parse_tree(ss.str());
        }
        return read_tree_file(tree_path);
    }
    GraphFile gf = read_graph_file(graph_path);
    return decompose(gf.graph, source, sink);
}

LeaderFollowerSystem system_from_file(const std::string& path) {
    GraphFile gf = read_graph_file(path);
    if (gf.inputs.empty())
        throw EmptyInputSet("graph file declares no `input` lines; the leader-follower "
                            "commands need at least one");
    return LeaderFollowerSystem(gf.graph, gf.inputs);
}

// Per-source contributions, optionally across threads. Sources are
// independent; results land in per-source slots so the sum is
// order-deterministic.
std::vector<double> per_source_h2(const std::vector<SourceTree>& trees, int jobs) {
    std::vector<double> out(trees.size(), 0.0);
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < trees.size(); i++)
            out[i] = h2_single_source(trees[i].tree);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; j++)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < trees.size(); i = next.fetch_add(1))
                out[i] = h2_single_source(trees[i].tree);
        });
    for (auto& th : pool) th.join();
    return out;
}

int cmd_decompose(const std::string& graph_path, int source, int sink) {
    GraphFile gf = read_graph_file(graph_path);
    DecompTree t = decompose(gf.graph, source, sink);
    std::cout << format_tree(t) << "\n";
    return 0;
}

int cmd_realize(const std::string& tree_path) {
    DecompTree t = tree_from_input(tree_path, "", -1, -1);
    Realization r = realize(t);
    std::cout << "# source " << r.source << "\n# sink " << r.sink << "\n";
    write_graph(std::cout, r.graph);
    return 0;
}

int cmd_solve(const std::string& tree_path, const std::string& graph_path, int source,
              int sink, double current, bool check) {
    DecompTree t = tree_from_input(tree_path, graph_path, source, sink);
    t = label_terminals(std::move(t));
    ElectricalSolution sol = solve_network(t, current);
    for (size_t node = 0; node < sol.potential.size(); node++)
        std::cout << "node " << node << " " << format_double(sol.potential[node]) << "\n";
    const double reff = sol.r_eff[static_cast<size_t>(t.root())];
    std::cout << "reff " << format_double(reff) << "\n";
    if (!check) return 0;

    Realization r = realize(t);
    double dev = std::abs(oracle::effective_resistance_dense(r.graph, r.source, r.sink) -
                          reff) /
                 reff;
    oracle::DenseSystem ds =
        oracle::grounded_dense_system(r.graph, r.sink, std::vector<int>{r.source});
    Eigen::VectorXd y = current * oracle::voltages_dense(ds, r.source);
    for (int node = 0; node < r.graph.node_count(); node++) {
        const double want = node == r.sink ? 0.0 : y(ds.row_of(node));
        const double diff = std::abs(sol.potential[static_cast<size_t>(node)] - want);
        if (diff > 1e-12) dev = std::max(dev, diff / std::max(std::abs(want), 1e-12));
    }
    std::cout << "oracle_dev " << format_double(dev) << "\n";
    if (dev > 1e-9) {
        std::cerr << "verification failed: oracle deviation " << dev << "\n";
        return kExitVerification;
    }
    return 0;
}

int cmd_h2(const std::string& graph_path, bool check, int jobs) {
    LeaderFollowerSystem sys = system_from_file(graph_path);
    std::vector<SourceTree> trees = decompose_all_inputs(sys);
    std::vector<double> contrib = per_source_h2(trees, jobs);
    double squared = 0.0;
    for (double c : contrib) squared += c;
    std::cout << "h2_squared " << format_double(squared) << "\n";
    for (size_t i = 0; i < trees.size(); i++)
        std::cout << "source " << trees[i].source << " " << format_double(contrib[i]) << "\n";
    if (!check) return 0;

    oracle::DenseSystem ds = oracle::dense_system(sys);
    GroundedGraph gg = grounded_graph(sys);
    double rho_sum = 0.0;
    for (int s : sys.inputs())
        rho_sum += oracle::effective_resistance_dense(gg.graph, s, gg.ground);
    const double routes[3] = {oracle::h2_dense(ds), oracle::h2_gramian(ds), 0.5 * rho_sum};
    double dev = 0.0;
    for (double r : routes)
        dev = std::max(dev, std::abs(r - squared) / std::max(std::abs(squared), 1e-300));
    std::cout << "oracle_dev " << format_double(dev) << "\n";
    if (dev > 1e-9) {
        std::cerr << "verification failed: oracle deviation " << dev << "\n";
        return kExitVerification;
    }
    return 0;
}

int cmd_optimize(const std::string& graph_path, const std::string& mode_name, double h_reg,
                 double tol, long long max_iters, double w_min,
                 const std::string& trace_path, bool check) {
    LeaderFollowerSystem sys = system_from_file(graph_path);
    ReweightOptions opts;
    opts.mode =
        mode_name == "paper" ? OptimizeMode::Paper : OptimizeMode::ProjectedGradient;
    opts.h_reg = h_reg;
    opts.tol = tol;
    opts.max_iters = max_iters;
    opts.w_min = w_min;
    opts.keep_trace = !trace_path.empty();
    ReweightReport rep = optimize(sys, opts);

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw Error("cannot open trace file: " + trace_path);
        out << "iter,f,grad_inf_norm";
        for (const Edge& e : sys.followers().edges()) out << ",w" << e.id;
        out << "\n";
        for (const TraceRow& row : rep.trace) {
            out << row.iter << "," << format_double(row.f) << ","
                << format_double(row.grad_inf);
            for (int e = 0; e < row.weights.size(); e++)
                out << "," << format_double(row.weights(e));
            out << "\n";
        }
    }

    std::cout << "converged " << (rep.converged ? 1 : 0) << "\n";
    std::cout << "iters " << rep.iters << "\n";
    std::cout << "f " << format_double(rep.f) << "\n";
    std::cout << "grad_inf " << format_double(rep.grad_inf) << "\n";
    for (const Edge& e : sys.followers().edges())
        std::cout << "weight " << e.id << " " << e.u << " " << e.v << " "
                  << format_double(rep.weights(e.id)) << "\n";
    if (!rep.converged) std::cerr << "note: " << rep.diagnostic << "\n";

    if (check) {
        // the analytic gradient at the returned point against central
        // finite differences of the objective
        Eigen::VectorXd ga = gradient(sys, rep.weights, h_reg);
        Eigen::VectorXd gf = oracle::gradient_fd(sys, rep.weights, h_reg);
        const double dev =
            (ga - gf).cwiseAbs().maxCoeff() / std::max(1.0, ga.cwiseAbs().maxCoeff());
        std::cout << "oracle_dev " << format_double(dev) << "\n";
        if (dev > 1e-6) {
            std::cerr << "verification failed: gradient deviation " << dev << "\n";
            return kExitVerification;
        }
    }
    return 0;
}

struct CheckStats {
    double dev = 0.0;
    int runs = 0;
    void feed(double d) {
        dev = std::max(dev, d);
        runs++;
    }
    bool pass(double tol) const { return dev <= tol; }
};

int cmd_check(int trials, uint64_t seed) {
    CheckStats resistance, potentials, energy, h2_routes, gradients;
    for (int trial = 0; trial < trials; trial++) {
        std::mt19937_64 rng(seed + static_cast<uint64_t>(trial));

        std::uniform_int_distribution<int> ls(10, 200);
        DecompTree t = random_tree(rng, ls(rng));
        Realization r = realize(t);
        ElectricalSolution sol = solve_network(t);

        const double reff = sol.r_eff[static_cast<size_t>(t.root())];
        const double reff_dense =
            oracle::effective_resistance_dense(r.graph, r.source, r.sink);
        resistance.feed(std::abs(reff - reff_dense) / reff_dense);

        oracle::DenseSystem ds =
            oracle::grounded_dense_system(r.graph, r.sink, std::vector<int>{r.source});
        Eigen::VectorXd y = oracle::voltages_dense(ds, r.source);
        double pot_dev = 0.0;
        for (int node = 0; node < r.graph.node_count(); node++) {
            const double want = node == r.sink ? 0.0 : y(ds.row_of(node));
            const double diff = std::abs(sol.potential[static_cast<size_t>(node)] - want);
            if (diff > 1e-12) pot_dev = std::max(pot_dev, diff / std::max(std::abs(want), 1e-12));
        }
        potentials.feed(pot_dev);

        double dissipated = 0.0;
        for (int i = 0; i < t.size(); i++)
            if (t.node(i).is_leaf())
                dissipated += sol.current[static_cast<size_t>(i)] *
                              sol.current[static_cast<size_t>(i)] / t.node(i).w;
        energy.feed(std::abs(dissipated - reff) / reff);

        std::uniform_int_distribution<int> ms(1, 8);
        LeaderFollowerSystem sys = random_all_input_system(rng, ms(rng));
        std::vector<SourceTree> trees = decompose_all_inputs(sys);
        H2Value v = h2_all_input(sys, trees);
        oracle::DenseSystem lds = oracle::dense_system(sys);
        const double via_trace = oracle::h2_dense(lds);
        const double via_gram = oracle::h2_gramian(lds);
        h2_routes.feed(std::abs(v.squared - via_trace) / via_trace);
        h2_routes.feed(std::abs(v.squared - via_gram) / via_gram);

        const int m = sys.followers().edge_count();
        if (m > 0) {
            Eigen::VectorXd w(m);
            for (int e = 0; e < m; e++) w(e) = log_uniform(rng, 0.1, 10.0);
            Eigen::VectorXd ga = gradient(sys, w, 1.0);
            Eigen::VectorXd gf = oracle::gradient_fd(sys, w, 1.0);
            gradients.feed((ga - gf).cwiseAbs().maxCoeff() /
                           std::max(1.0, ga.cwiseAbs().maxCoeff()));
        }
    }

    struct Row {
        const char* name;
        const CheckStats* st;
        double tol;
    } rows[] = {
        {"resistance_vs_pseudoinverse", &resistance, 1e-9},
        {"potentials_vs_dense_solve", &potentials, 1e-9},
        {"energy_identity", &energy, 1e-10},
        {"h2_route_agreement", &h2_routes, 1e-9},
        {"gradient_vs_finite_difference", &gradients, 1e-6},
    };
    bool ok = true;
    for (const Row& row : rows) {
        const bool pass = row.st->pass(row.tol);
        ok = ok && pass;
        std::cout << (pass ? "PASS" : "FAIL") << " " << row.name << " max_dev "
                  << format_double(row.st->dev) << " tol " << format_double(row.tol)
                  << " runs " << row.st->runs << "\n";
    }
    return ok ? 0 : kExitVerification;
}

// One bench row: synchronous round counts for the three electrical passes
// plus the H2 pass, repeated once per source, and the wall time of actually
// running them.
struct BenchRecord {
    long long leaves = 0;
    long long height = 0;
    long long pass_rounds = 0;  // h + 1
    int sources = 1;
    double wall_s = 0.0;

    long long pass_rounds_total() const { return pass_rounds * sources; }
    long long electrical_rounds() const { return 3 * pass_rounds * sources; }
    long long h2_rounds() const { return pass_rounds * sources; }
    long long total_rounds() const { return 4 * pass_rounds * sources; }
};

int cmd_bench(const std::string& family, const std::vector<long long>& sizes, int sources,
              uint64_t seed) {
    std::cout << "family,leaves,height,pass_rounds,sources,pass_rounds_total,"
                 "electrical_rounds,h2_rounds,total_rounds,wall_s\n";
    for (long long size : sizes) {
        std::mt19937_64 rng(seed);
        DecompTree t = family == "balanced" ? balanced_tree(rng, static_cast<int>(size))
                                            : chain_tree(rng, static_cast<int>(size));
        BenchRecord rec;
        rec.leaves = size;
        rec.height = tree_height(t);
        rec.pass_rounds = round_count(t);
        rec.sources = sources;

        const auto t0 = std::chrono::steady_clock::now();
        for (int s = 0; s < sources; s++) {
            auto rp = resistance_pass(t);
            auto cp = current_pass(t, rp, 1.0);
            auto vp = voltage_pass(t, cp);
            h2_single_source(t);
        }
        rec.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::cout << family << "," << rec.leaves << "," << rec.height << ","
                  << rec.pass_rounds << "," << rec.sources << "," << rec.pass_rounds_total()
                  << "," << rec.electrical_rounds() << "," << rec.h2_rounds() << ","
                  << rec.total_rounds() << "," << format_double(rec.wall_s) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"H2 performance and electrical analysis of leader-follower consensus "
                 "on series-parallel networks"};
    app.require_subcommand(1);
    uint64_t seed = default_seed();

    auto* dec = app.add_subcommand("decompose", "decompose a graph between two terminals");
    std::string dec_graph;
    int dec_source = 0, dec_sink = 0;
    dec->add_option("graph", dec_graph, "graph file")->required();
    dec->add_option("--source", dec_source, "source terminal")->required();
    dec->add_option("--sink", dec_sink, "sink terminal")->required();

    auto* rea = app.add_subcommand("realize", "materialize the graph a tree describes");
    std::string rea_tree;
    rea->add_option("tree", rea_tree, "tree s-expression file, or - for stdin")->required();

    std::string reff_tree, reff_graph, volt_tree, volt_graph;
    int reff_source = -1, reff_sink = -1, volt_source = -1, volt_sink = -1;
    double volt_current = 1.0;
    bool reff_check = false, volt_check = false;
    auto* ref = app.add_subcommand("reff", "effective resistance and node potentials");
    ref->add_option("--tree", reff_tree, "tree s-expression file, or - for stdin");
    ref->add_option("--graph", reff_graph, "graph file (needs --source/--sink)");
    ref->add_option("--source", reff_source, "source terminal");
    ref->add_option("--sink", reff_sink, "sink terminal");
    ref->add_flag("--check", reff_check, "cross-run the dense oracle");
    auto* vol = app.add_subcommand("voltages", "node potentials under current injection");
    vol->add_option("--tree", volt_tree, "tree s-expression file, or - for stdin");
    vol->add_option("--graph", volt_graph, "graph file (needs --source/--sink)");
    vol->add_option("--source", volt_source, "source terminal");
    vol->add_option("--sink", volt_sink, "sink terminal");
    vol->add_option("--current", volt_current, "injected current (default 1 A)");
    vol->add_flag("--check", volt_check, "cross-run the dense oracle");

    auto* h2c = app.add_subcommand("h2", "squared H2 norm of a leader-follower system");
    std::string h2_graph;
    bool h2_check = false;
    int h2_jobs = 1;
    h2c->add_option("graph", h2_graph, "graph file with input lines")->required();
    h2c->add_flag("--check", h2_check, "cross-run the dense oracle routes");
    h2c->add_option("--jobs", h2_jobs, "threads for per-source computations");

    auto* opt = app.add_subcommand("optimize", "re-weight edges to minimize the H2 norm");
    std::string opt_graph, opt_mode = "projected_gradient", opt_trace;
    double opt_h = 1.0, opt_tol = 1e-6, opt_wmin = 1e-8;
    long long opt_iters = 100000;
    opt->add_option("graph", opt_graph, "graph file with input lines")->required();
    opt->add_option("--mode", opt_mode, "paper | projected_gradient")
        ->check(CLI::IsMember({"paper", "projected_gradient"}));
    opt->add_option("--h-reg", opt_h, "regularization weight (default 1)");
    opt->add_option("--tol", opt_tol, "gradient tolerance (default 1e-6)");
    opt->add_option("--max-iters", opt_iters, "iteration cap (default 1e5)");
    opt->add_option("--w-min", opt_wmin, "positivity floor (default 1e-8)");
    opt->add_option("--trace", opt_trace, "write per-iteration CSV here");
    bool opt_check = false;
    opt->add_flag("--check", opt_check, "finite-difference check of the final gradient");

    auto* chk = app.add_subcommand("check", "randomized oracle cross-validation");
    int chk_trials = 100;
    chk->add_option("--trials", chk_trials, "number of seeded trials (default 100)");
    chk->add_option("--seed", seed, "base RNG seed (default 0; env SPC_SEED)");

    auto* ben = app.add_subcommand("bench", "round counts and wall time per family");
    std::string ben_family = "balanced";
    std::vector<long long> ben_sizes;
    int ben_sources = 1;
    ben->add_option("--family", ben_family, "balanced | chain")
        ->check(CLI::IsMember({"balanced", "chain"}));
    ben->add_option("--sizes", ben_sizes, "comma-separated leaf counts")
        ->required()
        ->delimiter(',');
    ben->add_option("--sources", ben_sources, "number of sources |R| (default 1)");
    ben->add_option("--seed", seed, "RNG seed for leaf weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (dec->parsed()) return cmd_decompose(dec_graph, dec_source, dec_sink);
        if (rea->parsed()) return cmd_realize(rea_tree);
        if (ref->parsed()) {
            if (reff_tree.empty() && (reff_graph.empty() || reff_source < 0 || reff_sink < 0)) {
                std::cerr << "reff needs --tree, or --graph with --source and --sink\n";
                return kExitUsage;
            }
            return cmd_solve(reff_tree, reff_graph, reff_source, reff_sink, 1.0, reff_check);
        }
        if (vol->parsed()) {
            if (volt_tree.empty() && (volt_graph.empty() || volt_source < 0 || volt_sink < 0)) {
                std::cerr << "voltages needs --tree, or --graph with --source and --sink\n";
                return kExitUsage;
            }
            return cmd_solve(volt_tree, volt_graph, volt_source, volt_sink, volt_current,
                             volt_check);
        }
        if (h2c->parsed()) return cmd_h2(h2_graph, h2_check, h2_jobs);
        if (opt->parsed())
            return cmd_optimize(opt_graph, opt_mode, opt_h, opt_tol, opt_iters, opt_wmin,
                                opt_trace, opt_check);
        if (chk->parsed()) return cmd_check(chk_trials, seed);
        if (ben->parsed()) return cmd_bench(ben_family, ben_sizes, ben_sources, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
