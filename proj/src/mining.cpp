#include "factorarg/mining.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace factorarg {

MiningConfig MiningConfig::defaults_for(const DiscreteNetwork& net) {
    MiningConfig c;
    if (net.size() > 12) {
        c.max_path_length = 7;
        c.complexity_limit = 3;
    }
    return c;
}

void MiningConfig::validate() const {
    if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be non-negative");
    if (max_path_length && *max_path_length < 1) throw std::invalid_argument("max_path_length must be at least 1");
    if (complexity_limit && *complexity_limit < 1) throw std::invalid_argument("complexity_limit must be at least 1");
}

namespace {

struct PathSearch {
    const FactorGraph& graph;
    std::size_t target;
    std::vector<bool> observed;
    std::optional<std::size_t> cap;
    std::vector<std::size_t> path;
    std::vector<bool> on_path;
    std::vector<std::vector<std::size_t>> found;

    void walk(std::size_t node) {
        if (node == target) {
            found.push_back(path);
            return;
        }
        if (cap && path.size() - 1 >= *cap) return;
        for (auto next : graph.neighbors(node)) {
            if (on_path[next]) continue;
            if (!graph.is_factor(next) && observed[next]) continue;
            path.push_back(next);
            on_path[next] = true;
            walk(next);
            on_path[next] = false;
            path.pop_back();
        }
    }
};

// Uniform effects carry no information; an all-zero one only arises from
// contradictory evidence and is dropped as well.
bool zero_effect(const Factor& f) {
    if (!(f.total() > 0.0)) return true;
    for (std::size_t o = 0; o < f.size(); ++o) {
        double l = implied_logodds(f, o);
        if (std::isnan(l) || std::abs(l) > 1e-12) return false;
    }
    return true;
}

std::vector<Argument> sorted_by_canonical(std::vector<Argument> args, const FactorGraph& graph) {
    std::vector<std::pair<std::string, Argument>> tagged;
    for (auto& a : args) tagged.emplace_back(canonical_string(a, graph), std::move(a));
    std::sort(tagged.begin(), tagged.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Argument> out;
    for (auto& [k, a] : tagged) out.push_back(std::move(a));
    return out;
}

bool pair_independent(const Argument& a, const Argument& b, EffectCache& cache, double threshold) {
    const Argument pair[] = {a, b};
    return is_independent(pair, cache, threshold);
}

} // namespace

std::vector<Argument> all_simple_arguments(const FactorGraph& graph, std::size_t target,
                                           const EvidenceSet& evidence,
                                           std::optional<std::size_t> max_path_length) {
    const auto& net = graph.network();
    validate_evidence(net, evidence);
    if (target >= graph.variable_count()) throw std::out_of_range("target is not a variable");
    if (evidence.count(net.variable(target).name()))
        throw std::invalid_argument("target '" + net.variable(target).name() + "' is observed");

    PathSearch search{graph, target, std::vector<bool>(graph.variable_count(), false), max_path_length, {},
                      std::vector<bool>(graph.node_count(), false), {}};
    for (const auto& [name, state] : evidence) search.observed[net.index_of(name)] = true;

    std::vector<Argument> out;
    for (const auto& [name, state] : evidence) {
        const auto v = net.index_of(name);
        search.found.clear();
        search.path = {v};
        search.on_path[v] = true;
        search.walk(v);
        search.on_path[v] = false;
        for (const auto& p : search.found)
            out.push_back(Argument::from_path(graph, p, net.variable(v).state_index(state)));
    }
    return sorted_by_canonical(std::move(out), graph);
}

std::vector<Argument> remove_subarguments(std::vector<Argument> args) {
    std::sort(args.begin(), args.end(), [](const Argument& a, const Argument& b) { return a.key() < b.key(); });
    args.erase(std::unique(args.begin(), args.end()), args.end());
    std::vector<Argument> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < args.size() && !dominated; ++j)
            dominated = i != j && is_subargument(args[i], args[j]);
        if (!dominated) out.push_back(args[i]);
    }
    return out;
}

std::vector<ScoredArgument> all_local_arguments(const FactorGraph& graph, std::size_t target,
                                                std::size_t outcome, const EvidenceSet& evidence,
                                                const MiningConfig& config) {
    config.validate();
    const auto& net = graph.network();
    if (target >= graph.variable_count()) throw std::out_of_range("target is not a variable");
    if (outcome >= net.variable(target).cardinality()) throw std::out_of_range("outcome out of range");

    const auto simple = all_simple_arguments(graph, target, evidence, config.max_path_length);
    if (simple.empty()) return {};
    const std::size_t limit = std::min(simple.size(), config.complexity_limit.value_or(simple.size()));

    EffectCache cache(graph);
    std::set<std::vector<std::uint32_t>> seen;
    std::vector<Argument> proper;

    // Depth-first over index-increasing combinations. A union that fails stays
    // failed under any superset, so the branch is cut.
    std::vector<Argument> stack;
    auto grow = [&](auto&& self, std::size_t from) -> void {
        for (std::size_t i = from; i < simple.size(); ++i) {
            std::optional<Argument> u = stack.empty() ? std::optional<Argument>(simple[i])
                                                      : try_union(stack.back(), simple[i]);
            if (!u) continue;
            if (seen.insert(u->key()).second && is_proper(*u, cache, config.threshold)) proper.push_back(*u);
            if (stack.size() + 1 < limit) {
                stack.push_back(std::move(*u));
                self(self, i + 1);
                stack.pop_back();
            }
        }
    };
    grow(grow, 0);

    auto pool = sorted_by_canonical(remove_subarguments(std::move(proper)), graph);

    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < pool.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < pool.size() && !merged; ++j) {
                if (pair_independent(pool[i], pool[j], cache, config.threshold)) continue;
                auto u = try_union(pool[i], pool[j]);
                if (!u) continue;
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
                pool.push_back(std::move(*u));
                pool = sorted_by_canonical(remove_subarguments(std::move(pool)), graph);
                merged = true;
            }
        }
    }

    std::vector<std::pair<std::string, ScoredArgument>> scored;
    for (auto& a : pool) {
        Factor e = cache.target_effect(a);
        if (zero_effect(e)) continue;
        double s = implied_logodds(e, outcome);
        scored.emplace_back(canonical_string(a, graph), ScoredArgument{std::move(a), std::move(e), s});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        const double ax = std::abs(x.second.strength), ay = std::abs(y.second.strength);
        if (ax != ay) return ax > ay;
        return x.first < y.first;
    });
    std::vector<ScoredArgument> out;
    for (auto& [k, s] : scored) out.push_back(std::move(s));
    return out;
}

nlohmann::json argument_json(const ScoredArgument& scored, const FactorGraph& graph) {
    const auto& net = graph.network();
    const auto& arg = scored.argument;
    nlohmann::json j;
    j["target"] = net.variable(arg.target()).name();
    auto nodes = nlohmann::json::array();
    for (auto n : arg.nodes()) nodes.push_back(graph.node_label(n));
    j["nodes"] = nodes;
    auto edges = nlohmann::json::array();
    for (const auto& e : arg.edges()) edges.push_back({graph.node_label(e.from), graph.node_label(e.to)});
    j["edges"] = edges;
    auto premises = nlohmann::json::object();
    for (const auto& [v, s] : arg.premises()) premises[net.variable(v).name()] = net.variable(v).states()[s];
    j["premises"] = premises;
    auto effect = nlohmann::json::object();
    const Factor e = normalize(scored.effect);
    for (std::size_t i = 0; i < e.size(); ++i) effect[net.variable(arg.target()).states()[i]] = e[i];
    j["effect"] = effect;
    j["strength"] = std::isfinite(scored.strength) ? nlohmann::json(scored.strength)
                                                   : nlohmann::json(scored.strength > 0 ? "inf" : "-inf");
    j["canonical"] = canonical_string(arg, graph);
    return j;
}

} // namespace factorarg
