#pragma once

#include "factorarg/factor.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace factorarg {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A discrete Bayesian network: variables in declaration order, a parent
/// list per variable and one CPT per variable.
///
/// Each CPT has scope (parents..., child) so that consecutive runs of
/// `cardinality(child)` entries are the conditional distributions for one
/// parent assignment. Construction validates acyclicity and that every
/// conditional sums to one within 1e-6.
class DiscreteNetwork {
public:
    DiscreteNetwork() = default;
    DiscreteNetwork(std::string name, std::vector<Variable> variables,
                    std::vector<std::vector<std::size_t>> parents, std::vector<Factor> cpts);

    const std::string& name() const { return name_; }
    std::size_t size() const { return variables_.size(); }

    const Variable& variable(std::size_t i) const { return variables_.at(i); }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }
    const Factor& cpt(std::size_t i) const { return cpts_.at(i); }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Like find, but throws ValidationError naming the unknown variable.
    std::size_t index_of(std::string_view name) const;

    /// Variable indices in a topological order (parents first, ties by index).
    std::vector<std::size_t> topological_order() const;

    /// True when the undirected skeleton has no cycle.
    bool is_polytree() const;

    /// Free parameters: (states - 1) per CPT row.
    std::size_t parameter_count() const;

private:
    std::string name_;
    std::vector<Variable> variables_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<Factor> cpts_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Observed states keyed by variable name.
using EvidenceSet = std::map<std::string, std::string, std::less<>>;

/// Throws ValidationError if a variable or state in `evidence` is unknown.
void validate_evidence(const DiscreteNetwork& net, const EvidenceSet& evidence);

/// Bipartite graph with one variable node per network variable and one
/// factor node per CPT. Node ids: variables are [0, V), the factor node for
/// the CPT of variable i is V + i.
class FactorGraph {
public:
    explicit FactorGraph(std::shared_ptr<const DiscreteNetwork> net);

    const DiscreteNetwork& network() const { return *net_; }
    std::shared_ptr<const DiscreteNetwork> network_ptr() const { return net_; }

    std::size_t variable_count() const { return net_->size(); }
    std::size_t node_count() const { return 2 * net_->size(); }
    bool is_factor(std::size_t node) const { return node >= net_->size(); }
    std::size_t factor_node(std::size_t variable) const { return net_->size() + variable; }
    /// Variable whose CPT the factor node holds.
    std::size_t factor_owner(std::size_t node) const { return node - net_->size(); }
    const Factor& factor(std::size_t node) const { return net_->cpt(factor_owner(node)); }

    const std::vector<std::size_t>& neighbors(std::size_t node) const { return adj_.at(node); }
    std::size_t edge_count() const;

    std::string node_label(std::size_t node) const;
    std::optional<std::size_t> node_from_label(std::string_view label) const;

    bool is_connected() const;

private:
    std::shared_ptr<const DiscreteNetwork> net_;
    std::vector<std::vector<std::size_t>> adj_;
};

FactorGraph build_factor_graph(const DiscreteNetwork& net);

} // namespace factorarg
