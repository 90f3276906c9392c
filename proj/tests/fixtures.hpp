#pragma once

#include "factorarg/argument.hpp"
#include "factorarg/bif.hpp"
#include "factorarg/inference.hpp"

#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

using namespace factorarg;

inline std::string data_path(const std::string& file) { return std::string(FACTORARG_DATA_DIR) + "/" + file; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline const DiscreteNetwork& asia() {
    static const DiscreteNetwork net = load_bif_file(data_path("asia.bif"));
    return net;
}

inline const FactorGraph& asia_graph() {
    static const FactorGraph g = build_factor_graph(asia());
    return g;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, bool allow_zero = false) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(k);
    double s = 0;
    for (auto& x : p) s += (x = u(rng));
    for (auto& x : p) x /= s;
    if (allow_zero && k > 1 && std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
        auto i = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
        double m = p[i];
        p[i] = 0;
        for (auto& x : p) x /= (1 - m);
    }
    return p;
}

/// Random network over n variables; `polytree` restricts the skeleton to a forest.
/// Variables are named X0..X{n-1}; parents always precede children.
inline DiscreteNetwork random_network(std::mt19937_64& rng, std::size_t n, std::size_t max_states, bool polytree,
                                      std::size_t max_parents = 3) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = std::uniform_int_distribution<std::size_t>(2, max_states)(rng);
        std::vector<std::string> states;
        for (std::size_t s = 0; s < k; ++s) states.push_back("s" + std::to_string(s));
        vars.emplace_back("X" + std::to_string(i), states);
    }
    std::vector<std::vector<std::size_t>> parents(n);
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = i;
    auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<std::size_t> cand(i);
        for (std::size_t j = 0; j < i; ++j) cand[j] = j;
        std::shuffle(cand.begin(), cand.end(), rng);
        std::size_t want = std::uniform_int_distribution<std::size_t>(0, std::min(max_parents, i))(rng);
        for (auto c : cand) {
            if (parents[i].size() >= want) break;
            if (polytree) {
                if (find(c) == find(i)) continue;
                comp[find(c)] = find(i);
            }
            parents[i].push_back(c);
        }
        std::sort(parents[i].begin(), parents[i].end());
    }
    std::vector<Factor> cpts;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Variable> scope;
        std::size_t rows = 1;
        for (auto p : parents[i]) {
            scope.push_back(vars[p]);
            rows *= vars[p].cardinality();
        }
        scope.push_back(vars[i]);
        std::vector<double> vals;
        for (std::size_t r = 0; r < rows; ++r)
            for (double x : random_simplex(rng, vars[i].cardinality())) vals.push_back(x);
        cpts.emplace_back(scope, vals);
    }
    return DiscreteNetwork("random", vars, parents, cpts);
}

/// Random evidence over up to `max_k` variables other than `exclude`, drawn
/// from the joint so that it has positive probability.
inline EvidenceSet random_evidence(std::mt19937_64& rng, const DiscreteNetwork& net, std::size_t max_k,
                                   std::size_t exclude = static_cast<std::size_t>(-1)) {
    // ancestral sample
    std::vector<std::size_t> state(net.size());
    for (auto v : net.topological_order()) {
        std::size_t flat = 0;
        for (auto p : net.parents(v)) flat = flat * net.variable(p).cardinality() + state[p];
        const auto k = net.variable(v).cardinality();
        std::vector<double> row;
        for (std::size_t s = 0; s < k; ++s) row.push_back(net.cpt(v)[flat * k + s]);
        state[v] = std::discrete_distribution<std::size_t>(row.begin(), row.end())(rng);
    }
    std::vector<std::size_t> pool;
    for (std::size_t v = 0; v < net.size(); ++v)
        if (v != exclude) pool.push_back(v);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, std::min(max_k, pool.size()))(rng);
    EvidenceSet ev;
    for (std::size_t i = 0; i < k; ++i) ev[net.variable(pool[i]).name()] = net.variable(pool[i]).states()[state[pool[i]]];
    return ev;
}

inline Factor random_factor(std::mt19937_64& rng, std::vector<Variable> scope, bool allow_zero = false) {
    std::size_t size = 1;
    for (const auto& v : scope) size *= v.cardinality();
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<double> vals(size);
    for (auto& x : vals) x = (allow_zero && std::uniform_int_distribution<int>(0, 5)(rng) == 0) ? 0.0 : u(rng);
    return Factor(std::move(scope), std::move(vals));
}

/// Node id of a factor-graph label such as "CPT(lung)" or "lung".
inline std::size_t node(const FactorGraph& g, const std::string& label) { return g.node_from_label(label).value(); }

/// Chain argument from labels; the first label is the premise observed in `state`.
inline Argument chain(const FactorGraph& g, const std::vector<std::string>& labels, const std::string& state) {
    std::vector<std::size_t> path;
    for (const auto& l : labels) path.push_back(node(g, l));
    return Argument::from_path(g, path, g.network().variable(path.front()).state_index(state));
}

} // namespace fixtures
