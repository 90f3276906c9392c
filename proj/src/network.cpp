#include "factorarg/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

namespace factorarg {

namespace {

constexpr double kStochasticTolerance = 1e-6;

std::vector<Variable> cpt_scope(const std::vector<Variable>& vars,
                                const std::vector<std::size_t>& parents, std::size_t child) {
    std::vector<Variable> scope;
    for (auto p : parents) scope.push_back(vars[p]);
    scope.push_back(vars[child]);
    return scope;
}

} // namespace

DiscreteNetwork::DiscreteNetwork(std::string name, std::vector<Variable> variables,
                                 std::vector<std::vector<std::size_t>> parents,
                                 std::vector<Factor> cpts)
    : name_(std::move(name)), variables_(std::move(variables)), parents_(std::move(parents)),
      cpts_(std::move(cpts)) {
    const std::size_t n = variables_.size();
    if (parents_.size() != n || cpts_.size() != n)
        throw ValidationError("network needs one parent list and one CPT per variable");
    for (std::size_t i = 0; i < n; ++i)
        if (!index_.emplace(variables_[i].name(), i).second)
            throw ValidationError("duplicate variable '" + variables_[i].name() + "'");

    children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        auto& ps = parents_[i];
        for (auto p : ps) {
            if (p >= n || p == i)
                throw ValidationError("bad parent index for '" + variables_[i].name() + "'");
            children_[p].push_back(i);
        }
        std::vector<std::size_t> sorted = ps;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("repeated parent for '" + variables_[i].name() + "'");
    }
    if (topological_order().size() != n) throw ValidationError("parent relation contains a cycle");

    for (std::size_t i = 0; i < n; ++i) {
        auto scope = cpt_scope(variables_, parents_[i], i);
        const Factor& given = cpts_[i];
        if (given.scope().size() != scope.size())
            throw ValidationError("CPT of '" + variables_[i].name() + "' has the wrong scope");
        for (const auto& v : scope)
            if (given.position(v) == Factor::npos)
                throw ValidationError("CPT of '" + variables_[i].name() + "' lacks '" + v.name() + "'");
        cpts_[i] = reorder(given, scope);

        const std::size_t k = variables_[i].cardinality();
        const auto vals = cpts_[i].values();
        for (std::size_t row = 0; row * k < vals.size(); ++row) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += vals[row * k + j];
            if (std::abs(s - 1.0) > kStochasticTolerance)
                throw ValidationError("conditional of '" + variables_[i].name() + "' at " +
                                      cpts_[i].describe_assignment(row * k) + " sums to " +
                                      std::to_string(s));
        }
    }
}

std::optional<std::size_t> DiscreteNetwork::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t DiscreteNetwork::index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw ValidationError("unknown variable '" + std::string(name) + "'");
    return *i;
}

std::vector<std::size_t> DiscreteNetwork::topological_order() const {
    const std::size_t n = variables_.size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = parents_[i].size();
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    return order;
}

bool DiscreteNetwork::is_polytree() const {
    const std::size_t n = variables_.size();
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), 0);
    std::function<std::size_t(std::size_t)> find_root = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (auto p : parents_[i]) {
            auto a = find_root(i), b = find_root(p);
            if (a == b) return false;
            root[a] = b;
        }
    return true;
}

std::size_t DiscreteNetwork::parameter_count() const {
    std::size_t total = 0;
    // each CPT row sums to one, so one entry per row is determined
    for (std::size_t i = 0; i < cpts_.size(); ++i)
        total += cpts_[i].size() / variables_[i].cardinality() * (variables_[i].cardinality() - 1);
    return total;
}

void validate_evidence(const DiscreteNetwork& net, const EvidenceSet& evidence) {
    for (const auto& [var, state] : evidence) {
        auto i = net.index_of(var);
        if (!net.variable(i).has_state(state))
            throw ValidationError("variable '" + var + "' has no state '" + state + "'");
    }
}

FactorGraph::FactorGraph(std::shared_ptr<const DiscreteNetwork> net) : net_(std::move(net)) {
    const std::size_t n = net_->size();
    adj_.assign(2 * n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t f = factor_node(i);
        std::vector<std::size_t> scope = net_->parents(i);
        scope.push_back(i);
        for (auto v : scope) {
            adj_[f].push_back(v);
            adj_[v].push_back(f);
        }
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
}

std::size_t FactorGraph::edge_count() const {
    std::size_t e = 0;
    for (std::size_t v = 0; v < variable_count(); ++v) e += adj_[v].size();
    return e;
}

std::string FactorGraph::node_label(std::size_t node) const {
    if (is_factor(node)) return "CPT(" + net_->variable(factor_owner(node)).name() + ")";
    return net_->variable(node).name();
}

std::optional<std::size_t> FactorGraph::node_from_label(std::string_view label) const {
    if (label.starts_with("CPT(") && label.ends_with(")")) {
        auto inner = label.substr(4, label.size() - 5);
        if (auto v = net_->find(inner)) return factor_node(*v);
        return std::nullopt;
    }
    return net_->find(label);
}

bool FactorGraph::is_connected() const {
    if (adj_.empty()) return true;
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto y : adj_[x])
            if (!seen[y]) {
                seen[y] = true;
                ++count;
                stack.push_back(y);
            }
    }
    return count == adj_.size();
}

FactorGraph build_factor_graph(const DiscreteNetwork& net) {
    return FactorGraph(std::make_shared<const DiscreteNetwork>(net));
}

} // namespace factorarg
