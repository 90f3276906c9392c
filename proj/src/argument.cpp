#include "factorarg/argument.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace factorarg {

namespace {

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool has_cycle(const std::vector<std::size_t>& nodes, const std::vector<Edge>& edges) {
    std::map<std::size_t, std::size_t> indeg;
    std::map<std::size_t, std::vector<std::size_t>> out;
    for (auto n : nodes) indeg[n] = 0;
    for (const auto& e : edges) {
        ++indeg[e.to];
        out[e.from].push_back(e.to);
    }
    std::vector<std::size_t> ready;
    for (auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto n = ready.back();
        ready.pop_back();
        ++seen;
        for (auto m : out[n])
            if (--indeg[m] == 0) ready.push_back(m);
    }
    return seen != indeg.size();
}

} // namespace

Argument::Argument(const FactorGraph& graph, std::vector<std::size_t> nodes, std::vector<Edge> edges,
                   std::map<std::size_t, std::size_t> premises, std::size_t target)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), premises_(std::move(premises)), target_(target) {
    sort_unique(nodes_);
    sort_unique(edges_);
    const auto& net = graph.network();
    auto name = [&](std::size_t n) { return graph.node_label(n); };

    if (target_ >= graph.node_count() || graph.is_factor(target_))
        throw ArgumentError("target must be a variable node");
    if (!contains_node(target_)) throw ArgumentError("target '" + name(target_) + "' is not in the argument");
    for (auto n : nodes_)
        if (n >= graph.node_count()) throw ArgumentError("node id out of range");
    for (const auto& e : edges_) {
        if (!contains_node(e.from) || !contains_node(e.to))
            throw ArgumentError("edge endpoint outside the node set");
        const auto& nb = graph.neighbors(e.from);
        if (!std::binary_search(nb.begin(), nb.end(), e.to))
            throw ArgumentError("edge " + name(e.from) + " -> " + name(e.to) + " is not in the factor graph");
        if (contains_edge(Edge{e.to, e.from}))
            throw ArgumentError("edge " + name(e.from) + " <-> " + name(e.to) + " used in both directions");
    }
    if (premises_.empty()) throw ArgumentError("argument has no premises");
    for (const auto& [v, s] : premises_) {
        if (graph.is_factor(v) || !contains_node(v)) throw ArgumentError("premise is not a variable of the argument");
        if (s >= net.variable(v).cardinality()) throw ArgumentError("premise state out of range");
    }
    if (has_cycle(nodes_, edges_)) throw ArgumentError("argument contains a directed cycle");

    if (nodes_.size() == 1) {
        if (!is_premise(target_)) throw ArgumentError("single-node argument must be its own premise");
        return;
    }
    if (is_premise(target_)) throw ArgumentError("target cannot be a premise");
    for (auto n : nodes_) {
        const auto in = predecessors(n).size();
        const auto out = successors(n).size();
        if (graph.is_factor(n)) {
            if (in == 0 || out == 0) throw ArgumentError("rule " + name(n) + " needs premises and a conclusion");
            continue;
        }
        if (is_premise(n) && in != 0) throw ArgumentError("premise " + name(n) + " has incoming edges");
        if (!is_premise(n) && in == 0) throw ArgumentError("variable " + name(n) + " is a source but not a premise");
        if (n == target_ && out != 0) throw ArgumentError("target " + name(n) + " has outgoing edges");
        if (n != target_ && out == 0) throw ArgumentError("variable " + name(n) + " does not lead to the target");
    }
}

Argument Argument::from_path(const FactorGraph& graph, std::span<const std::size_t> path,
                             std::size_t premise_state) {
    if (path.empty()) throw ArgumentError("empty path");
    std::vector<std::size_t> nodes(path.begin(), path.end());
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) edges.push_back({path[i], path[i + 1]});
    return Argument(graph, std::move(nodes), std::move(edges), {{path.front(), premise_state}}, path.back());
}

bool Argument::contains_node(std::size_t n) const { return std::binary_search(nodes_.begin(), nodes_.end(), n); }

bool Argument::contains_edge(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

std::vector<std::size_t> Argument::predecessors(std::size_t node) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges_)
        if (e.to == node) out.push_back(e.from);
    return out;
}

std::vector<std::size_t> Argument::successors(std::size_t node) const {
    std::vector<std::size_t> out;
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{node, 0});
    for (; it != edges_.end() && it->from == node; ++it) out.push_back(it->to);
    return out;
}

std::vector<std::size_t> Argument::topological_order() const {
    std::map<std::size_t, std::size_t> indeg;
    for (auto n : nodes_) indeg[n] = 0;
    for (const auto& e : edges_) ++indeg[e.to];
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (auto& [n, d] : indeg)
        if (d == 0) ready.push(n);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (auto m : successors(n))
            if (--indeg[m] == 0) ready.push(m);
    }
    return order;
}

bool Argument::is_simple() const {
    if (premises_.size() != 1) return false;
    std::map<std::size_t, int> in, out;
    for (const auto& e : edges_) {
        if (++out[e.from] > 1) return false;
        if (++in[e.to] > 1) return false;
    }
    return true;
}

std::vector<std::uint32_t> Argument::key() const {
    std::vector<std::uint32_t> k;
    k.reserve(4 + nodes_.size() + 2 * edges_.size() + 2 * premises_.size());
    k.push_back(static_cast<std::uint32_t>(target_));
    k.push_back(static_cast<std::uint32_t>(nodes_.size()));
    for (auto n : nodes_) k.push_back(static_cast<std::uint32_t>(n));
    k.push_back(static_cast<std::uint32_t>(edges_.size()));
    for (const auto& e : edges_) {
        k.push_back(static_cast<std::uint32_t>(e.from));
        k.push_back(static_cast<std::uint32_t>(e.to));
    }
    for (const auto& [v, s] : premises_) {
        k.push_back(static_cast<std::uint32_t>(v));
        k.push_back(static_cast<std::uint32_t>(s));
    }
    return k;
}

std::string canonical_string(const Argument& arg, const FactorGraph& graph) {
    const auto& net = graph.network();
    std::vector<std::string> prem, edges;
    for (const auto& [v, s] : arg.premises()) prem.push_back(net.variable(v).name() + "=" + net.variable(v).states()[s]);
    for (const auto& e : arg.edges()) edges.push_back(graph.node_label(e.from) + "->" + graph.node_label(e.to));
    std::sort(prem.begin(), prem.end());
    std::sort(edges.begin(), edges.end());
    std::ostringstream os;
    os << "target=" << net.variable(arg.target()).name() << ";premises=";
    for (std::size_t i = 0; i < prem.size(); ++i) os << (i ? "," : "") << prem[i];
    os << ";edges=";
    for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? "," : "") << edges[i];
    return os.str();
}

Factor step_effect(const Factor& rule, std::span<const Factor> premises, const Variable& conclusion) {
    if (!rule.contains(conclusion))
        throw FactorError("conclusion '" + conclusion.name() + "' is not in the rule scope");
    Factor joint = rule;
    std::vector<std::string> seen;
    for (const auto& p : premises) {
        if (p.scope().size() != 1) throw FactorError("premise effects must be single-variable factors");
        const auto& v = p.scope()[0];
        if (v.name() == conclusion.name()) throw FactorError("premise on the conclusion variable");
        if (!rule.contains(v)) throw FactorError("premise '" + v.name() + "' is not in the rule scope");
        if (std::find(seen.begin(), seen.end(), v.name()) != seen.end())
            throw FactorError("two premises on '" + v.name() + "'");
        seen.push_back(v.name());
        joint = product(joint, p);
    }
    const std::span<const Variable> keep(&conclusion, 1);
    Factor num = marginalize(joint, keep);
    Factor den = marginalize(rule, keep);
    try {
        return divide(num, den);
    } catch (const FactorError& e) {
        throw FactorError(std::string("degenerate rule: ") + e.what());
    }
}

EffectTable argument_effect(const Argument& arg, const FactorGraph& graph) {
    const auto& net = graph.network();
    EffectTable eff;
    for (auto n : arg.topological_order()) {
        if (graph.is_factor(n)) continue;
        const Variable& var = net.variable(n);
        if (auto p = arg.premises().find(n); p != arg.premises().end()) {
            eff.emplace(n, indicator_factor(var, var.states()[p->second]));
            continue;
        }
        std::optional<Factor> acc;
        for (auto f : arg.predecessors(n)) {
            std::vector<Factor> ins;
            for (auto x : arg.predecessors(f)) ins.push_back(eff.at(x));
            Factor step = step_effect(graph.factor(f), ins, var);
            acc = acc ? product(*acc, step) : step;
        }
        eff.emplace(n, std::move(*acc));
    }
    return eff;
}

Factor target_effect(const Argument& arg, const FactorGraph& graph) {
    return argument_effect(arg, graph).at(arg.target());
}

double argument_strength(const Argument& arg, const FactorGraph& graph, std::size_t outcome) {
    return implied_logodds(target_effect(arg, graph), outcome);
}

double argument_strength(const Argument& arg, const FactorGraph& graph, std::string_view outcome) {
    return implied_logodds(target_effect(arg, graph), outcome);
}

Argument argument_union_unchecked(const Argument& a, const Argument& b) {
    Argument u;
    u.target_ = a.target_;
    std::set_union(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                   std::back_inserter(u.nodes_));
    std::set_union(a.edges_.begin(), a.edges_.end(), b.edges_.begin(), b.edges_.end(),
                   std::back_inserter(u.edges_));
    u.premises_ = a.premises_;
    u.premises_.insert(b.premises_.begin(), b.premises_.end());
    return u;
}

std::optional<Argument> try_union(const Argument& a, const Argument& b, UnionError::Kind* why) {
    auto fail = [&](UnionError::Kind k) -> std::optional<Argument> {
        if (why) *why = k;
        return std::nullopt;
    };
    if (a.target() != b.target()) return fail(UnionError::Kind::TargetMismatch);
    for (const auto& [v, s] : a.premises()) {
        auto it = b.premises().find(v);
        if (it != b.premises().end() ? it->second != s : b.contains_node(v)) return fail(UnionError::Kind::Clash);
    }
    for (const auto& [v, s] : b.premises())
        if (!a.is_premise(v) && a.contains_node(v)) return fail(UnionError::Kind::Clash);
    Argument u = argument_union_unchecked(a, b);
    for (const auto& e : u.edges())
        if (u.contains_edge(Edge{e.to, e.from})) return fail(UnionError::Kind::Cycle);
    if (has_cycle(u.nodes(), u.edges())) return fail(UnionError::Kind::Cycle);
    return u;
}

Argument argument_union(const Argument& a, const Argument& b) {
    UnionError::Kind why{};
    auto u = try_union(a, b, &why);
    if (u) return std::move(*u);
    switch (why) {
    case UnionError::Kind::TargetMismatch:
        throw UnionError(why, "arguments have different targets");
    case UnionError::Kind::Clash:
        throw UnionError(why, "a premise of one argument is an inferred node of another");
    case UnionError::Kind::Cycle:
        break;
    }
    throw UnionError(UnionError::Kind::Cycle, "union contains a directed cycle");
}

Argument argument_union(std::span<const Argument> args) {
    if (args.empty()) throw ArgumentError("union of no arguments");
    Argument acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = argument_union(acc, args[i]);
    return acc;
}

bool is_subargument(const Argument& a, const Argument& b) {
    if (a.target() != b.target()) return false;
    if (!std::includes(b.nodes().begin(), b.nodes().end(), a.nodes().begin(), a.nodes().end())) return false;
    if (!std::includes(b.edges().begin(), b.edges().end(), a.edges().begin(), a.edges().end())) return false;
    for (const auto& [v, s] : a.premises()) {
        auto it = b.premises().find(v);
        if (it == b.premises().end() || it->second != s) return false;
    }
    return true;
}

std::vector<Argument> decompose_simple(const Argument& arg, const FactorGraph& graph) {
    std::vector<Argument> out;
    std::vector<std::size_t> path;
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t node, std::size_t state) {
        path.push_back(node);
        if (node == arg.target())
            out.push_back(Argument::from_path(graph, path, state));
        else
            for (auto m : arg.successors(node)) walk(m, state);
        path.pop_back();
    };
    for (const auto& [v, s] : arg.premises()) walk(v, s);
    std::sort(out.begin(), out.end(), [](const Argument& a, const Argument& b) { return a.key() < b.key(); });
    return out;
}

namespace {

struct MaskHash {
    std::size_t operator()(std::uint64_t m) const { return std::hash<std::uint64_t>{}(m); }
};

// Target effects of unions of a fixed list of arguments, memoized by subset.
class SubsetEffects {
public:
    SubsetEffects(std::span<const Argument> parts, EffectCache& cache) : parts_(parts), cache_(cache) {}

    // nullopt when the union of the subset is undefined.
    const std::optional<Factor>& effect(std::uint64_t mask) {
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;
        std::optional<Argument> acc;
        bool ok = true;
        for (std::size_t i = 0; i < parts_.size() && ok; ++i) {
            if (!(mask >> i & 1U)) continue;
            if (!acc) {
                acc = parts_[i];
            } else {
                acc = try_union(*acc, parts_[i]);
                ok = acc.has_value();
            }
        }
        std::optional<Factor> f;
        if (ok && acc) f = cache_.target_effect(*acc);
        return memo_.emplace(mask, std::move(f)).first->second;
    }

private:
    std::span<const Argument> parts_;
    EffectCache& cache_;
    std::unordered_map<std::uint64_t, std::optional<Factor>, MaskHash> memo_;
};

// Family given as disjoint masks over SubsetEffects' parts.
bool family_independent(std::span<const std::uint64_t> blocks, SubsetEffects& eff, double threshold) {
    const std::size_t m = blocks.size();
    for (std::uint64_t sel = 1; sel < (std::uint64_t{1} << m); ++sel) {
        if (std::popcount(sel) < 2) continue;
        std::uint64_t united = 0;
        std::optional<Factor> prod;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(sel >> i & 1U)) continue;
            united |= blocks[i];
            const auto& e = eff.effect(blocks[i]);
            if (!e) return false;
            prod = prod ? product(*prod, *e) : *e;
        }
        const auto& whole = eff.effect(united);
        if (!whole) return false;
        if (!(factor_distance(*prod, *whole) <= threshold)) return false;
    }
    return true;
}

} // namespace

bool is_independent(std::span<const Argument> args, const FactorGraph& graph, double threshold) {
    EffectCache cache(graph);
    return is_independent(args, cache, threshold);
}

bool is_independent(std::span<const Argument> args, EffectCache& cache, double threshold) {
    if (args.size() > 20) throw ArgumentError("independence check limited to 20 arguments");
    if (args.size() < 2) return true;
    for (const auto& a : args)
        if (a.target() != args[0].target()) return false;
    SubsetEffects eff(args, cache);
    std::vector<std::uint64_t> blocks;
    for (std::size_t i = 0; i < args.size(); ++i) blocks.push_back(std::uint64_t{1} << i);
    return family_independent(blocks, eff, threshold);
}

bool is_proper(const Argument& arg, const FactorGraph& graph, double threshold) {
    EffectCache cache(graph);
    return is_proper(arg, cache, threshold);
}

std::size_t EffectCache::KeyHash::operator()(const std::vector<std::uint32_t>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : k) h = (h ^ x) * 1099511628211ULL;
    return h;
}

const Factor& EffectCache::target_effect(const Argument& arg) {
    auto key = arg.key();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(std::move(key), factorarg::target_effect(arg, graph_)).first->second;
}

bool is_proper(const Argument& arg, EffectCache& cache, double threshold) {
    const auto parts = decompose_simple(arg, cache.graph());
    if (parts.size() <= 1) return true;
    if (parts.size() > 20) throw ArgumentError("properness check limited to 20 simple components");
    SubsetEffects eff(parts, cache);

    // Enumerate set partitions as restricted growth strings.
    const std::size_t k = parts.size();
    std::vector<std::size_t> label(k, 0), maxp(k, 0);
    while (true) {
        const std::size_t blocks_n = *std::max_element(label.begin(), label.end()) + 1;
        if (blocks_n >= 2) {
            std::vector<std::uint64_t> blocks(blocks_n, 0);
            for (std::size_t i = 0; i < k; ++i) blocks[label[i]] |= std::uint64_t{1} << i;
            if (family_independent(blocks, eff, threshold)) return false;
        }
        std::size_t i = k;
        while (i-- > 1) {
            if (label[i] <= maxp[i - 1]) break;
        }
        if (i == 0) break;
        ++label[i];
        for (std::size_t j = i + 1; j < k; ++j) {
            label[j] = 0;
        }
        for (std::size_t j = i; j < k; ++j) maxp[j] = std::max(maxp[j - 1], label[j]);
    }
    return true;
}

} // namespace factorarg
