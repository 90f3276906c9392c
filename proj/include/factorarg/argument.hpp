#pragma once

#include "factorarg/factor.hpp"
#include "factorarg/network.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace factorarg {

class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnionError : public std::runtime_error {
public:
    enum class Kind { TargetMismatch, Clash, Cycle };
    UnionError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct Edge {
    std::size_t from;
    std::size_t to;
    auto operator<=>(const Edge&) const = default;
};

/// A directed acyclic graph overlaid on a factor graph.
///
/// Sources are premise variables carrying an observed state; the unique sink
/// is the target variable. Each factor node used by the argument is a rule:
/// its in-neighbours are the premises of the rule and every out-neighbour is
/// a conclusion drawn from all of them. Node, edge and premise sets are kept
/// sorted, so two arguments are equal exactly when their graphs are.
class Argument {
public:
    Argument() = default;
    /// Builds and validates the argument against `graph`.
    Argument(const FactorGraph& graph, std::vector<std::size_t> nodes, std::vector<Edge> edges,
             std::map<std::size_t, std::size_t> premises, std::size_t target);

    /// Chain argument along a factor-graph path [premise, factor, variable, ..., target].
    static Argument from_path(const FactorGraph& graph, std::span<const std::size_t> path,
                              std::size_t premise_state);

    const std::vector<std::size_t>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::map<std::size_t, std::size_t>& premises() const { return premises_; }
    std::size_t target() const { return target_; }

    bool contains_node(std::size_t n) const;
    bool contains_edge(const Edge& e) const;
    bool is_premise(std::size_t variable) const { return premises_.count(variable) > 0; }

    std::vector<std::size_t> predecessors(std::size_t node) const;
    std::vector<std::size_t> successors(std::size_t node) const;

    /// Nodes ordered so every edge points forward; ties broken by node id.
    std::vector<std::size_t> topological_order() const;

    /// Simple arguments are single premise-to-target paths.
    bool is_simple() const;

    /// Compact integer encoding of the graph, usable as a hash key.
    std::vector<std::uint32_t> key() const;

    friend bool operator==(const Argument&, const Argument&) = default;

private:
    friend Argument argument_union_unchecked(const Argument&, const Argument&);
    std::vector<std::size_t> nodes_;
    std::vector<Edge> edges_;
    std::map<std::size_t, std::size_t> premises_;
    std::size_t target_ = 0;
};

/// Human-readable, label-based canonical form; used for deterministic ordering.
std::string canonical_string(const Argument& arg, const FactorGraph& graph);

/// Effect Delta of an argument on each of its variables (unnormalized).
using EffectTable = std::map<std::size_t, Factor>;

/// [sum over scope minus Y of rule * premises] / [sum over scope minus Y of rule].
Factor step_effect(const Factor& rule, std::span<const Factor> premises, const Variable& conclusion);

EffectTable argument_effect(const Argument& arg, const FactorGraph& graph);

/// Effect on the target only; same value as argument_effect(...).at(target).
Factor target_effect(const Argument& arg, const FactorGraph& graph);

double argument_strength(const Argument& arg, const FactorGraph& graph, std::size_t outcome);
double argument_strength(const Argument& arg, const FactorGraph& graph, std::string_view outcome);

/// Union of graphs. Throws UnionError on differing targets, a premise that is
/// a non-premise node (or differently observed) elsewhere, or a directed cycle.
Argument argument_union(std::span<const Argument> args);
Argument argument_union(const Argument& a, const Argument& b);

/// Non-throwing union used on hot paths.
std::optional<Argument> try_union(const Argument& a, const Argument& b,
                                  UnionError::Kind* why = nullptr);

bool is_subargument(const Argument& a, const Argument& b);

/// Every premise-to-target directed path of `arg` as a chain argument, sorted.
std::vector<Argument> decompose_simple(const Argument& arg, const FactorGraph& graph);

/// Memo of target effects keyed by argument graph; not thread-safe.
class EffectCache {
public:
    explicit EffectCache(const FactorGraph& graph) : graph_(graph) {}
    const FactorGraph& graph() const { return graph_; }
    const Factor& target_effect(const Argument& arg);
    std::size_t size() const { return memo_.size(); }

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& k) const;
    };
    const FactorGraph& graph_;
    std::unordered_map<std::vector<std::uint32_t>, Factor, KeyHash> memo_;
};

/// For every subset of two or more arguments: the product of their target
/// effects is within `threshold` factor distance of the effect of their
/// union. A subset whose union is undefined makes the family dependent.
bool is_independent(std::span<const Argument> args, const FactorGraph& graph, double threshold);
bool is_independent(std::span<const Argument> args, EffectCache& cache, double threshold);

/// Simple, or no partition of its simple decomposition into two or more
/// blocks gives a threshold-independent family of block unions.
bool is_proper(const Argument& arg, const FactorGraph& graph, double threshold);
bool is_proper(const Argument& arg, EffectCache& cache, double threshold);

} // namespace factorarg
