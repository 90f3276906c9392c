// factorarg: command-line front end.
//
//   factorarg inspect   --model asia.bif
//   factorarg arguments --model asia.bif --evidence bronc=yes,dysp=no --target lung=yes
//   factorarg explain   ... --mode contrastive --descriptions asia_descriptions.json
//   factorarg eval      --model asia.bif --n 200 --seed 42 --out-csv out.csv

#include "factorarg/bif.hpp"
#include "factorarg/descriptions.hpp"
#include "factorarg/evaluation.hpp"
#include "factorarg/explanation.hpp"
#include "factorarg/mining.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace factorarg;

namespace {

constexpr int kUsage = 2;
constexpr int kRuntime = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<std::string, std::string> split_pair(const std::string& item, const std::string& flag) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
        throw UsageError(flag + ": expected VAR=STATE, got '" + item + "'");
    return {item.substr(0, eq), item.substr(eq + 1)};
}

struct Query {
    EvidenceSet evidence;
    std::vector<std::string> order;
    std::size_t target = 0;
    std::size_t outcome = 0;
};

Query parse_query(const DiscreteNetwork& net, const std::string& evidence, const std::string& target) {
    Query q;
    std::stringstream ss(evidence);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        auto [k, v] = split_pair(item, "--evidence");
        if (!q.evidence.emplace(k, v).second) throw UsageError("--evidence: '" + k + "' given twice");
        q.order.push_back(k);
    }
    validate_evidence(net, q.evidence);
    auto [tv, ts] = split_pair(target, "--target");
    q.target = net.index_of(tv);
    q.outcome = net.variable(q.target).state_index(ts);
    if (q.evidence.count(tv)) throw UsageError("target '" + tv + "' is observed");
    return q;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write '" + path + "'");
}

DiscreteNetwork load_model(const std::string& path) { return parse_bif(read_file(path)); }

struct MiningFlags {
    double threshold = 0.5;
    std::size_t max_path_length = 0;
    std::size_t complexity_limit = 0;
    bool no_caps = false;

    void add(CLI::App* app) {
        app->add_option("--threshold", threshold, "approximate-independence distance")->check(CLI::NonNegativeNumber);
        app->add_option("--max-path-length", max_path_length, "cap on simple path length, in factor-graph edges")
            ->check(CLI::PositiveNumber);
        app->add_option("--complexity-limit", complexity_limit, "simple arguments per combination")
            ->check(CLI::PositiveNumber);
        app->add_flag("--no-caps", no_caps, "disable the default caps on large networks");
    }

    MiningConfig config(const DiscreteNetwork& net) const {
        MiningConfig c = no_caps ? MiningConfig{} : MiningConfig::defaults_for(net);
        c.threshold = threshold;
        if (max_path_length) c.max_path_length = max_path_length;
        if (complexity_limit) c.complexity_limit = complexity_limit;
        return c;
    }
};

std::string fmt(double x, int prec = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << x;
    return os.str();
}

int cmd_inspect(const std::string& model, const std::string& format) {
    const auto net = load_model(model);
    if (format == "json") {
        nlohmann::json vars = nlohmann::json::array();
        for (std::size_t i = 0; i < net.size(); ++i) {
            nlohmann::json parents = nlohmann::json::array();
            for (auto p : net.parents(i)) parents.push_back(net.variable(p).name());
            vars.push_back({{"name", net.variable(i).name()},
                            {"states", net.variable(i).states()},
                            {"parents", parents},
                            {"cpt_rows", net.cpt(i).size() / net.variable(i).cardinality()}});
        }
        nlohmann::json j{{"name", net.name()},
                         {"variables", vars},
                         {"polytree", net.is_polytree()},
                         {"parameters", net.parameter_count()}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "network " << net.name() << ": " << net.size() << " variables, "
              << (net.is_polytree() ? "polytree" : "not a polytree") << ", " << net.parameter_count()
              << " free parameters\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto& v = net.variable(i);
        std::cout << "  " << v.name() << " [" << v.cardinality() << "] {";
        for (std::size_t s = 0; s < v.cardinality(); ++s) std::cout << (s ? ", " : "") << v.states()[s];
        std::cout << "} parents: ";
        if (net.parents(i).empty()) std::cout << "-";
        for (std::size_t k = 0; k < net.parents(i).size(); ++k)
            std::cout << (k ? ", " : "") << net.variable(net.parents(i)[k]).name();
        std::cout << "; rows: " << net.cpt(i).size() / v.cardinality() << "\n";
    }
    return 0;
}

void print_argument(std::size_t rank, const ScoredArgument& s, const FactorGraph& graph, std::size_t outcome) {
    const auto& net = graph.network();
    const auto& t = net.variable(s.argument.target());
    std::cout << "#" << rank << " strength " << fmt(s.strength) << " (" << t.name() << "=" << t.states()[outcome]
              << ")\n  premises:";
    for (const auto& [v, st] : s.argument.premises())
        std::cout << " " << net.variable(v).name() << "=" << net.variable(v).states()[st];
    std::cout << "\n  edges:";
    for (const auto& e : s.argument.edges())
        std::cout << " " << graph.node_label(e.from) << "->" << graph.node_label(e.to);
    const Factor e = normalize(s.effect);
    std::cout << "\n  effect:";
    for (std::size_t i = 0; i < e.size(); ++i) std::cout << " " << t.states()[i] << "=" << fmt(e[i]);
    std::cout << "\n";
}

int cmd_arguments(const std::string& model, const std::string& evidence, const std::string& target,
                  const MiningFlags& flags, const std::string& format) {
    const auto graph = build_factor_graph(load_model(model));
    const auto q = parse_query(graph.network(), evidence, target);
    const auto args = all_local_arguments(graph, q.target, q.outcome, q.evidence, flags.config(graph.network()));
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& a : args) arr.push_back(argument_json(a, graph));
        std::cout << arr.dump(2) << "\n";
        return 0;
    }
    std::cout << args.size() << (args.size() == 1 ? " argument\n" : " arguments\n");
    for (std::size_t i = 0; i < args.size(); ++i) print_argument(i + 1, args[i], graph, q.outcome);
    return 0;
}

int cmd_explain(const std::string& model, const std::string& evidence, const std::string& target,
                const MiningFlags& flags, const std::string& mode, const std::string& descriptions,
                const std::string& format) {
    ExplanationOptions opts;
    try {
        opts.mode = parse_mode(mode);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto graph = build_factor_graph(load_model(model));
    DescriptionDictionary dict;
    if (!descriptions.empty()) {
        dict = load_descriptions(read_file(descriptions));
        for (const auto& w : dict.unknown_entries(graph.network())) std::cerr << "warning: " << w << "\n";
    }
    const auto q = parse_query(graph.network(), evidence, target);
    opts.evidence_order = q.order;
    const auto args = all_local_arguments(graph, q.target, q.outcome, q.evidence, flags.config(graph.network()));
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& a : args)
            arr.push_back({{"argument", argument_json(a, graph)},
                           {"lines", explanation_json(explain_lines(a.argument, graph, dict, opts))}});
        std::cout << arr.dump(2) << "\n";
        return 0;
    }
    for (std::size_t i = 0; i < args.size(); ++i)
        std::cout << (i ? "\n" : "") << explain_argument(args[i].argument, graph, dict, opts) << "\n";
    return 0;
}

void print_summary(const EvalReport& r) {
    auto row = [](const char* name, const MethodSummary& m) {
        std::cout << std::left << std::setw(10) << name << std::right;
        for (double x : {m.logodds.q05, m.logodds.median, m.logodds.q95, m.logodds.mean})
            std::cout << std::setw(9) << fmt(x, 2);
        for (double x : {m.probability.q05, m.probability.median, m.probability.q95, m.probability.mean})
            std::cout << std::setw(9) << fmt(100 * x, 2) + "%";
        std::cout << std::setw(9) << fmt(100 * m.exact_match, 2) + "%" << "\n";
    };
    std::cout << "          |        absolute logodd error         |      absolute probability error      |\n"
              << "method        Q.05   median    Q.95     mean     Q.05   median    Q.95     mean    exact\n";
    row("argument", r.argument);
    row("baseline", r.baseline);
    std::cout << "queries " << r.records.size() << ", failed " << r.failed << ", infinite logodds (argument) "
              << r.argument.logodds.infinite << ", (baseline) " << r.baseline.logodds.infinite << "\n";
}

int cmd_eval(const std::string& model, std::size_t n, std::uint64_t seed, const MiningFlags& flags,
             unsigned threads, const std::string& out_csv, const std::string& out_summary) {
    const auto graph = build_factor_graph(load_model(model));
    StudyOptions opts;
    opts.n = n;
    opts.seed = seed;
    opts.mining = flags.config(graph.network());
    opts.threads = threads;
    const auto report = run_study(graph, opts);
    if (!out_csv.empty()) write_file(out_csv, report_csv(report, graph));
    if (!out_summary.empty()) write_file(out_summary, report_summary(report, opts, graph).dump(2) + "\n");
    print_summary(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extract and explain arguments from discrete Bayesian networks"};
    app.require_subcommand(1);

    std::string model, evidence, target, format = "text", mode = "direct", descriptions, out_csv, out_summary;
    std::size_t n = 200;
    std::uint64_t seed = 42;
    unsigned threads = 0;
    MiningFlags flags;
    auto add_model = [&](CLI::App* c) { c->add_option("--model", model, "BIF file")->required(); };
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    };
    auto add_query = [&](CLI::App* c) {
        c->add_option("--evidence", evidence, "observations, VAR=STATE[,VAR=STATE...]")->required();
        c->add_option("--target", target, "query, VAR=STATE")->required();
        flags.add(c);
    };

    auto* inspect = app.add_subcommand("inspect", "summarize a network");
    add_model(inspect);
    add_format(inspect);

    auto* arguments = app.add_subcommand("arguments", "mine ranked arguments for a query");
    add_model(arguments);
    add_query(arguments);
    add_format(arguments);

    auto* explain = app.add_subcommand("explain", "render mined arguments as text");
    add_model(explain);
    add_query(explain);
    add_format(explain);
    explain->add_option("--mode", mode, "direct, contrastive or overview");
    explain->add_option("--descriptions", descriptions, "JSON file with variable and state phrases");

    auto* eval = app.add_subcommand("eval", "compare argument-based odds with message passing");
    add_model(eval);
    flags.add(eval);
    eval->add_option("--n", n, "number of random queries")->check(CLI::PositiveNumber);
    eval->add_option("--seed", seed, "master seed");
    eval->add_option("--threads", threads, "worker threads, 0 for all cores");
    eval->add_option("--out-csv", out_csv, "per-query CSV");
    eval->add_option("--out-summary", out_summary, "JSON summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*inspect) return cmd_inspect(model, format);
        if (*arguments) return cmd_arguments(model, evidence, target, flags, format);
        if (*explain) return cmd_explain(model, evidence, target, flags, mode, descriptions, format);
        if (*eval) return cmd_eval(model, n, seed, flags, threads, out_csv, out_summary);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FactorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
