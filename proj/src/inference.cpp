#include "factorarg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace factorarg {

namespace {

// Variable carried by the edge between two adjacent nodes.
std::size_t edge_variable(const FactorGraph& g, std::size_t a, std::size_t b) {
    return g.is_factor(a) ? b : a;
}

std::size_t slot_of(const FactorGraph& g, std::size_t node, std::size_t neighbor) {
    const auto& n = g.neighbors(node);
    return static_cast<std::size_t>(std::lower_bound(n.begin(), n.end(), neighbor) - n.begin());
}

Factor normalized_or_zero(const Factor& f) {
    return f.total() > 0.0 ? normalize(f) : f;
}

} // namespace

MessageState init_potentials(const FactorGraph& graph, const EvidenceSet& evidence) {
    const auto& net = graph.network();
    validate_evidence(net, evidence);
    MessageState st;
    st.graph = &graph;
    st.potentials.resize(graph.node_count());
    st.inbox.resize(graph.node_count());
    for (std::size_t v = 0; v < graph.variable_count(); ++v) {
        const auto& var = net.variable(v);
        auto ev = evidence.find(var.name());
        st.potentials[v] = ev == evidence.end() ? constant_factor(var) : indicator_factor(var, ev->second);
        st.potentials[graph.factor_node(v)] = net.cpt(v);
    }
    for (std::size_t x = 0; x < graph.node_count(); ++x)
        for (auto y : graph.neighbors(x))
            st.inbox[x].push_back(constant_factor(net.variable(edge_variable(graph, x, y))));
    return st;
}

BeliefTable run_message_passing(MessageState& state, const MessagePassingOptions& opts) {
    if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const FactorGraph& g = *state.graph;
    const auto& net = g.network();

    BeliefTable out;
    for (std::size_t iter = 1; iter <= opts.max_iters; ++iter) {
        auto next = state.inbox;
        double change = 0.0;
        for (std::size_t x = 0; x < g.node_count(); ++x) {
            const auto& nbrs = g.neighbors(x);
            for (std::size_t k = 0; k < nbrs.size(); ++k) {
                const std::size_t y = nbrs[k];
                Factor acc = state.potentials[x];
                for (std::size_t j = 0; j < nbrs.size(); ++j)
                    if (j != k) acc = product(acc, state.inbox[x][j]);
                const Variable& shared = net.variable(edge_variable(g, x, y));
                Factor msg = marginalize(acc, std::span<const Variable>(&shared, 1));
                if (opts.normalize_messages) msg = normalized_or_zero(msg);
                Factor& slot = next[y][slot_of(g, y, x)];
                const Factor before = opts.normalize_messages ? slot : normalized_or_zero(slot);
                const Factor after = opts.normalize_messages ? msg : normalized_or_zero(msg);
                for (std::size_t i = 0; i < after.size(); ++i)
                    change = std::max(change, std::abs(after[i] - before[i]));
                slot = std::move(msg);
            }
        }
        state.inbox = std::move(next);
        out.iterations = iter;
        out.last_change = change;
        if (change < opts.tol) {
            out.converged = true;
            break;
        }
    }

    for (std::size_t v = 0; v < g.variable_count(); ++v) {
        Factor b = state.potentials[v];
        for (const auto& m : state.inbox[v]) b = product(b, m);
        if (!(b.total() > 0.0))
            throw ContradictionError(net.variable(v).name(),
                                     "evidence is contradictory: belief of '" + net.variable(v).name() +
                                         "' has zero mass");
        out.beliefs.push_back(normalize(b));
    }
    return out;
}

BeliefTable posterior_beliefs(const FactorGraph& graph, const EvidenceSet& evidence,
                              const MessagePassingOptions& opts) {
    auto st = init_potentials(graph, evidence);
    return run_message_passing(st, opts);
}

Factor enumerate_posterior(const DiscreteNetwork& net, const EvidenceSet& evidence,
                           std::string_view target, std::size_t max_joint) {
    validate_evidence(net, evidence);
    const std::size_t t = net.index_of(target);
    const std::size_t n = net.size();
    double joint = 1.0;
    for (const auto& v : net.variables()) joint *= static_cast<double>(v.cardinality());
    if (joint > static_cast<double>(max_joint))
        throw std::length_error("joint distribution has " + std::to_string(joint) +
                                " assignments, refusing to enumerate");

    // Observed variables are pinned; the rest are walked like an odometer.
    std::vector<std::size_t> state(n, 0);
    std::vector<bool> fixed(n, false);
    for (const auto& [name, s] : evidence) {
        auto i = net.index_of(name);
        state[i] = net.variable(i).state_index(s);
        fixed[i] = true;
    }
    std::vector<std::size_t> free_vars;
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) free_vars.push_back(i);

    // Flat offset into each CPT, scope (parents..., child).
    auto cpt_index = [&](std::size_t i) {
        std::size_t flat = 0;
        for (auto p : net.parents(i)) flat = flat * net.variable(p).cardinality() + state[p];
        return flat * net.variable(i).cardinality() + state[i];
    };

    std::vector<double> post(net.variable(t).cardinality(), 0.0);
    while (true) {
        double p = 1.0;
        for (std::size_t i = 0; i < n && p > 0.0; ++i) p *= net.cpt(i)[cpt_index(i)];
        post[state[t]] += p;
        std::size_t k = free_vars.size();
        while (k > 0) {
            auto v = free_vars[k - 1];
            if (++state[v] < net.variable(v).cardinality()) break;
            state[v] = 0;
            --k;
        }
        if (k == 0) break;
    }
    Factor f({net.variable(t)}, std::move(post));
    if (!(f.total() > 0.0))
        throw ContradictionError(net.variable(t).name(), "evidence has zero probability");
    return normalize(f);
}

double odds_of(const Factor& distribution, std::size_t outcome) {
    double rest = 0.0;
    for (std::size_t i = 0; i < distribution.size(); ++i)
        if (i != outcome) rest += distribution[i];
    if (rest == 0.0) return std::numeric_limits<double>::infinity();
    return distribution[outcome] / rest;
}

double prior_odds(const FactorGraph& graph, std::string_view target, std::string_view outcome) {
    const auto t = graph.network().index_of(target);
    const auto beliefs = posterior_beliefs(graph, {});
    return odds_of(beliefs.belief(t), graph.network().variable(t).state_index(outcome));
}

} // namespace factorarg
